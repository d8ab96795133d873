#include "blochctl/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace blochctl {

namespace {

struct Pole {
  double q;  // r * a_j
  double w;  // b_j^2
  int axis;
};

double sphere_rate(double r, const Vec3& n, const ProjectedSystem& p) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j)
    s += p.b[j] * n[j] - r * p.a[j] * (1.0 - n[j] * n[j]);
  return s;
}

// g(lambda) = sum_j w_j / (lambda - q_j)^2 - 4. Interior stationary
// multipliers are exactly its real roots; g is strictly convex between poles
// and every root keeps |lambda - q_j| >= sqrt(w_j)/2 (a component bound), so
// the root set is isolated by exclusion blocks around the poles.
double eval_g(const std::vector<Pole>& poles, double lam) {
  double s = -4.0;
  for (const Pole& p : poles) {
    const double d = lam - p.q;
    s += p.w / (d * d);
  }
  return s;
}

double eval_gprime(const std::vector<Pole>& poles, double lam) {
  double s = 0.0;
  for (const Pole& p : poles) {
    const double d = lam - p.q;
    s += -2.0 * p.w / (d * d * d);
  }
  return s;
}

// Safeguarded Newton/bisection for a root of g inside [lo, hi] with
// g(lo) and g(hi) of opposite (or vanishing) sign.
double polish_root(const std::vector<Pole>& poles, double lo, double hi, double glo,
                   double ghi) {
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double gx = eval_g(poles, x);
    if (gx == 0.0) return x;
    if ((gx > 0.0) == (glo > 0.0)) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
      ghi = gx;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::max(std::abs(lo), std::abs(hi))))
      return 0.5 * (lo + hi);
    const double gpx = eval_gprime(poles, x);
    double next = (gpx != 0.0) ? x - gx / gpx : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

// Location of the minimum of g on [lo, hi] (g' is increasing there).
double convex_argmin(const std::vector<Pole>& poles, double lo, double hi) {
  double dlo = eval_gprime(poles, lo);
  double dhi = eval_gprime(poles, hi);
  if (dlo >= 0.0) return lo;
  if (dhi <= 0.0) return hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(mid)))
      return mid;
    const double dm = eval_gprime(poles, mid);
    if (dm == 0.0) return mid;
    if (dm < 0.0) {
      lo = mid;
      dlo = dm;
    } else {
      hi = mid;
      dhi = dm;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<double> interior_multipliers(const std::vector<Pole>& poles) {
  std::vector<double> roots;
  if (poles.empty()) return roots;

  struct Block {
    double lo, hi;
  };
  std::vector<Block> blocks;
  for (const Pole& p : poles) {
    const double e = 0.5 * std::sqrt(p.w);
    blocks.push_back({p.q - e, p.q + e});
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& a, const Block& b) { return a.lo < b.lo; });
  std::vector<Block> merged;
  for (const Block& b : blocks) {
    if (!merged.empty() && b.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, b.hi);
    else
      merged.push_back(b);
  }

  double wtot = 0.0;
  double span = merged.back().hi - merged.front().lo;
  for (const Pole& p : poles) wtot += p.w;
  const double step0 = std::max({1.0, span, std::sqrt(wtot)});

  // Left ray: g increases from -4 to g(L) >= 0; exactly one root.
  {
    double hi = merged.front().lo;
    double ghi = eval_g(poles, hi);
    if (ghi <= 0.0) {
      roots.push_back(hi);
    } else {
      double step = step0;
      double lo = hi - step;
      double glo = eval_g(poles, lo);
      while (glo > 0.0) {
        step *= 2.0;
        lo = hi - step;
        glo = eval_g(poles, lo);
      }
      roots.push_back(polish_root(poles, lo, hi, glo, ghi));
    }
  }

  // Finite pieces between exclusion blocks: 0, 1 (tangent) or 2 roots.
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    const double lo = merged[i].hi;
    const double hi = merged[i + 1].lo;
    if (!(hi > lo)) continue;
    const double glo = eval_g(poles, lo);
    const double ghi = eval_g(poles, hi);
    const double lmin = convex_argmin(poles, lo, hi);
    const double gmin = eval_g(poles, lmin);
    if (glo <= 0.0) roots.push_back(lo);
    if (gmin <= 0.0) {
      if (glo > 0.0) roots.push_back(polish_root(poles, lo, lmin, glo, gmin));
      if (ghi > 0.0 && gmin < 0.0)
        roots.push_back(polish_root(poles, lmin, hi, gmin, ghi));
    } else if (gmin <= 1e-11) {
      roots.push_back(lmin);  // grazing pair, keep the representative
    }
    if (ghi <= 0.0) roots.push_back(hi);
  }

  // Right ray, mirror of the left one.
  {
    double lo = merged.back().hi;
    double glo = eval_g(poles, lo);
    if (glo <= 0.0) {
      roots.push_back(lo);
    } else {
      double step = step0;
      double hi = lo + step;
      double ghi = eval_g(poles, hi);
      while (ghi > 0.0) {
        step *= 2.0;
        hi = lo + step;
        ghi = eval_g(poles, hi);
      }
      roots.push_back(polish_root(poles, lo, hi, glo, ghi));
    }
  }

  std::sort(roots.begin(), roots.end());
  return roots;
}

void push_candidate(std::vector<StationaryCandidate>& out, Vec3 n, double multiplier,
                    CandidateBranch branch, bool ring, double r,
                    const ProjectedSystem& p) {
  const double len = norm(n);
  if (!(len > 0.0) || !std::isfinite(len)) return;
  n = n / len;
  for (const StationaryCandidate& c : out)
    if (norm_inf(c.n_hat - n) < 1e-9) return;
  out.push_back({n, multiplier, sphere_rate(r, n, p), branch, ring});
}

const std::array<Vec3, 6> kSignedAxes{Vec3{1, 0, 0},  Vec3{-1, 0, 0}, Vec3{0, 1, 0},
                                      Vec3{0, -1, 0}, Vec3{0, 0, 1},  Vec3{0, 0, -1}};

}  // namespace

std::vector<StationaryCandidate> stationary_candidates(double r,
                                                       const ProjectedSystem& p) {
  if (!(r > 0.0) || r > 1.0 + 1e-9)
    throw std::invalid_argument("stationary_candidates: radius outside (0, 1]");

  std::vector<StationaryCandidate> out;

  const double bnorm = norm(p.b);
  const double amax = std::max({std::abs(p.a[0]), std::abs(p.a[1]), std::abs(p.a[2])});
  if (std::max(bnorm, amax) < 1e-300) {
    // Every direction is stationary; report the six signed axes.
    for (const Vec3& axis : kSignedAxes)
      push_candidate(out, axis, 0.0, CandidateBranch::AxisBranch, true, r, p);
    return out;
  }

  const double bthresh = 1e-10 * std::max(bnorm, r * p.a[0]);
  std::array<bool, 3> driven{};  // axis has b_j != 0
  for (int j = 0; j < 3; ++j) driven[j] = std::abs(p.b[j]) > bthresh;

  // Interior branch: n_j = b_j / (2 (lambda - r a_j)) on driven axes, zero on
  // the rest; lambda runs over the real roots of g.
  std::vector<Pole> poles;
  for (int j = 0; j < 3; ++j)
    if (driven[j]) poles.push_back({r * p.a[j], p.b[j] * p.b[j], j});

  for (double lam : interior_multipliers(poles)) {
    Vec3 n{};
    bool ok = true;
    for (int j = 0; j < 3 && ok; ++j) {
      if (!driven[j]) continue;
      const double d = 2.0 * (lam - r * p.a[j]);
      if (d == 0.0) {
        ok = false;
        break;
      }
      n[j] = p.b[j] / d;
      if (!std::isfinite(n[j])) ok = false;
    }
    if (ok) push_candidate(out, n, lam, CandidateBranch::InteriorRoot, false, r, p);
  }

  // Axis branches: lambda = r a_j for undriven axes, grouped over equal a_j.
  const double group_tol = 1e-12 * std::max(1.0, amax);
  std::array<bool, 3> used{};
  for (int j = 0; j < 3; ++j) {
    if (driven[j] || used[j]) continue;
    std::vector<int> group{j};
    used[j] = true;
    for (int k = j + 1; k < 3; ++k)
      if (!driven[k] && !used[k] && std::abs(p.a[k] - p.a[j]) <= group_tol) {
        group.push_back(k);
        used[k] = true;
      }

    const double lam = r * p.a[j];
    Vec3 base{};
    double s2 = 0.0;
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      if (!driven[k]) continue;
      const double d = 2.0 * (lam - r * p.a[k]);
      if (d == 0.0) {
        ok = false;
        break;
      }
      base[k] = p.b[k] / d;
      if (!std::isfinite(base[k])) ok = false;
      s2 += base[k] * base[k];
    }
    if (!ok) continue;
    const double res2 = 1.0 - s2;
    if (res2 < -1e-12) continue;
    const double c = std::sqrt(std::max(0.0, res2));
    const bool ring = group.size() >= 2 && c > 1e-12;
    for (int f : group) {
      for (double sign : {1.0, -1.0}) {
        Vec3 n = base;
        n[f] += sign * c;
        push_candidate(out, n, lam, CandidateBranch::AxisBranch, ring, r, p);
        if (c == 0.0) break;
      }
    }
  }

  return out;
}

EnvelopePoint envelope_at(double r, const ProjectedSystem& p) {
  const std::vector<StationaryCandidate> cands = stationary_candidates(r, p);

  double fscale = 0.0;
  for (const StationaryCandidate& c : cands) fscale = std::max(fscale, std::abs(c.rate));
  const double tie = 1e-12 * std::max(1.0, fscale);

  const StationaryCandidate* best_max = &cands.front();
  const StationaryCandidate* best_min = &cands.front();
  for (const StationaryCandidate& c : cands) {
    if (c.rate > best_max->rate + tie ||
        (c.rate > best_max->rate - tie && lex_less(c.n_hat, best_max->n_hat)))
      best_max = &c;
    if (c.rate < best_min->rate - tie ||
        (c.rate < best_min->rate + tie && lex_less(c.n_hat, best_min->n_hat)))
      best_min = &c;
  }
  return {best_max->rate, best_min->rate, best_max->n_hat, best_min->n_hat};
}

std::optional<EnvelopePoint> analytic_axial_envelope(const ProjectedSystem& p, double r) {
  if (!(r > 0.0) || r > 1.0 + 1e-9)
    throw std::invalid_argument("analytic_axial_envelope: radius outside (0, 1]");
  const double bnorm = norm(p.b);
  const double tol_b = 1e-12 * std::max(1.0, bnorm);
  const double tol_a = 1e-12 * std::max(1.0, p.a[0]);
  if (std::abs(p.b[0]) > tol_b || std::abs(p.b[1]) > tol_b) return std::nullopt;
  if (std::abs(p.a[0] - p.a[1]) > tol_a || std::abs(p.a[2]) > tol_a) return std::nullopt;

  const double a1 = p.a[0];
  const double b3 = p.b[2];
  const double mag = std::abs(b3);
  const double sgn = (b3 >= 0.0) ? 1.0 : -1.0;

  // Closed-form stationary set: the two signed poles always, plus the ring
  // once it fits the sphere.
  std::vector<StationaryCandidate> cands;
  cands.push_back({Vec3{0, 0, sgn}, 0.5 * sgn * b3, mag - 2.0 * a1 * r,
                   CandidateBranch::Analytic, false});
  cands.push_back({Vec3{0, 0, -sgn}, -0.5 * sgn * b3, -mag - 2.0 * a1 * r,
                   CandidateBranch::Analytic, false});
  if (a1 > 0.0 && 2.0 * a1 * r >= mag) {
    const double n3 = b3 / (2.0 * a1 * r);
    const double c = std::sqrt(std::max(0.0, 1.0 - n3 * n3));
    cands.push_back({Vec3{c > 0.0 ? -c : 0.0, 0.0, n3}, r * a1,
                     mag * mag / (4.0 * a1 * r) - r * a1, CandidateBranch::Analytic,
                     c > 0.0});
  }

  EnvelopePoint out{cands.front().rate, cands.front().rate, cands.front().n_hat,
                    cands.front().n_hat};
  for (const StationaryCandidate& c : cands) {
    if (c.rate >= out.f_max) {
      out.f_max = c.rate;
      out.argmax = c.n_hat;
    }
    if (c.rate <= out.f_min) {
      out.f_min = c.rate;
      out.argmin = c.n_hat;
    }
  }
  return out;
}

RateEnvelope envelope_curve(const ProjectedSystem& p, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("envelope_curve: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || grid[i] > 1.0 + 1e-12)
      throw std::invalid_argument("envelope_curve: grid values must lie in (0, 1]");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw std::invalid_argument("envelope_curve: grid must be strictly increasing");
  }

  RateEnvelope env;
  env.r_grid.assign(grid.begin(), grid.end());
  env.f_max.reserve(grid.size());
  env.f_min.reserve(grid.size());
  env.argmax_dirs.reserve(grid.size());
  env.argmin_dirs.reserve(grid.size());

  const bool axial = analytic_axial_envelope(p, grid[0]).has_value();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EnvelopePoint pt;
    if (axial) {
      pt = *analytic_axial_envelope(p, grid[i]);
      if (i % 100 == 0 || i + 1 == grid.size()) {
        const EnvelopePoint numeric = envelope_at(grid[i], p);
        if (std::abs(numeric.f_max - pt.f_max) > 1e-10 ||
            std::abs(numeric.f_min - pt.f_min) > 1e-10)
          throw Error("envelope_curve: closed form and numeric path disagree");
      }
    } else {
      pt = envelope_at(grid[i], p);
    }
    env.f_max.push_back(pt.f_max);
    env.f_min.push_back(pt.f_min);
    env.argmax_dirs.push_back(pt.argmax);
    env.argmin_dirs.push_back(pt.argmin);
  }
  return env;
}

const std::vector<Vec3>& fibonacci_sphere(int count) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<std::vector<Vec3>>> cache;
  std::scoped_lock lock(mu);
  auto& slot = cache[count];
  if (!slot) {
    auto pts = std::make_unique<std::vector<Vec3>>();
    pts->reserve(static_cast<std::size_t>(count));
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    // Endpoints included: axial extremizers are common and the lattice is
    // coarsest near the poles.
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * i / (count - 1.0);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double theta = golden * i;
      pts->push_back({rho * std::cos(theta), rho * std::sin(theta), z});
    }
    slot = std::move(pts);
  }
  return *slot;
}

BruteEnvelope brute_force_envelope(double r, const ProjectedSystem& p, int count) {
  if (count < 1000)
    throw std::invalid_argument("brute_force_envelope: need at least 1000 samples");
  if (!(r > 0.0) || r > 1.0 + 1e-9)
    throw std::invalid_argument("brute_force_envelope: radius outside (0, 1]");

  const std::vector<Vec3>& pts = fibonacci_sphere(count);
  const double b0 = p.b[0], b1 = p.b[1], b2 = p.b[2];
  const double ra0 = r * p.a[0], ra1 = r * p.a[1], ra2 = r * p.a[2];
  const double rtr = ra0 + ra1 + ra2;

  BruteEnvelope out{std::numeric_limits<double>::lowest(),
                    std::numeric_limits<double>::max(), Vec3{}, Vec3{}};
  for (const Vec3& n : pts) {
    const double rate = b0 * n[0] + b1 * n[1] + b2 * n[2] +
                        ra0 * n[0] * n[0] + ra1 * n[1] * n[1] + ra2 * n[2] * n[2] - rtr;
    if (rate > out.f_max) {
      out.f_max = rate;
      out.argmax = n;
    }
    if (rate < out.f_min) {
      out.f_min = rate;
      out.argmin = n;
    }
  }
  return out;
}

}  // namespace blochctl
