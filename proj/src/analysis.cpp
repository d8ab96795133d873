#include "blochctl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace blochctl {

namespace {

bool is_singular(const Mat2& l) {
  const double n = frobenius_norm(l);
  return std::abs(det(l)) < 1e-12 * n * n;
}

// Eigenvector candidates of a traceless 2x2 operator: two directions when the
// spectrum +-mu is nondegenerate, the kernel direction when mu = 0.
std::vector<C2> eigenvector_candidates(const Mat2& l) {
  const complexd pp = l(0, 0);
  const complexd q = l(0, 1);
  const complexd s = l(1, 0);
  const complexd mu = std::sqrt(pp * pp + q * s);  // eigenvalues are +-mu

  const auto vec_for = [&](complexd m) -> C2 {
    // (l - m) v = 0; take the better-conditioned row construction.
    C2 v1{q, m - pp};
    C2 v2{m + pp, s};
    C2 v = (norm(v1) >= norm(v2)) ? v1 : v2;
    const double n = norm(v);
    return {v[0] / n, v[1] / n};
  };

  std::vector<C2> out;
  // Branch on the determinant witness: mu = sqrt(-det) amplifies rounding
  // dust in a numerically singular operator into a spurious spectral split.
  if (is_singular(l)) {
    out.push_back(vec_for(complexd(0.0)));
  } else {
    out.push_back(vec_for(mu));
    out.push_back(vec_for(-mu));
  }
  return out;
}

double eigen_residual(const Mat2& l, const C2& v) {
  const C2 lv = l * v;
  const complexd val = inner(v, lv);
  const C2 diff{lv[0] - val * v[0], lv[1] - val * v[1]};
  return norm(diff);
}

std::vector<LindbladOp> drop_zero_ops(std::span<const LindbladOp> ops) {
  std::vector<LindbladOp> kept;
  for (const LindbladOp& op : ops)
    if (frobenius_norm(op.entries) >= 1e-12) kept.push_back(op);
  return kept;
}

// Operators that are scalar multiples of an earlier one describe the same
// process; keep one representative each.
std::vector<LindbladOp> dedupe_ops(const std::vector<LindbladOp>& ops) {
  std::vector<LindbladOp> unique;
  for (const LindbladOp& op : ops) {
    bool merged = false;
    for (const LindbladOp& rep : unique) {
      complexd num(0.0), den(0.0);
      for (std::size_t i = 0; i < 4; ++i) {
        num += std::conj(rep.entries.m[i]) * op.entries.m[i];
        den += std::conj(rep.entries.m[i]) * rep.entries.m[i];
      }
      const complexd c = num / den;
      double diff2 = 0.0;
      for (std::size_t i = 0; i < 4; ++i)
        diff2 += std::norm(op.entries.m[i] - c * rep.entries.m[i]);
      if (std::sqrt(diff2) < 1e-10 * frobenius_norm(op.entries)) {
        merged = true;
        break;
      }
    }
    if (!merged) unique.push_back(op);
  }
  return unique;
}

}  // namespace

TrapReport trap_radius(const ProjectedSystem& p) {
  TrapReport report;
  const double bnorm = norm(p.b);
  const double scale = std::max(1.0, p.a[0] + bnorm);
  if (bnorm <= 1e-12 * scale) {
    report.method = TrapMethod::Analytic;
    return report;  // no trap
  }

  report.trap_exists = true;
  if (analytic_axial_envelope(p, 0.5).has_value() && p.a[0] > 0.0) {
    report.method = TrapMethod::Analytic;
    report.r_T = std::min(1.0, std::abs(p.b[2]) / (2.0 * p.a[0]));
    report.residual = std::abs(envelope_at(report.r_T, p).f_max);
    return report;
  }

  report.method = TrapMethod::Bisection;
  const double f1 = envelope_at(1.0, p).f_max;
  if (f1 >= -1e-11 * scale) {
    report.r_T = 1.0;
    report.residual = std::abs(f1);
    return report;
  }

  // f_max is strictly decreasing (b != 0 forces a1, a2 > 0), positive near 0
  // and negative at 1: bisect the unique zero.
  double lo = 1e-12;
  double hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= std::numeric_limits<double>::epsilon() * mid) break;
    if (envelope_at(mid, p).f_max > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  report.r_T = 0.5 * (lo + hi);
  report.residual = std::abs(envelope_at(report.r_T, p).f_max);
  return report;
}

bool reachable(double r_i, double r_f, const ProjectedSystem& p) {
  if (!(r_i > 0.0) || r_i > 1.0 + 1e-9 || !(r_f > 0.0) || r_f > 1.0 + 1e-9)
    throw std::invalid_argument("reachable: radii must lie in (0, 1]");
  if (r_f <= r_i) return true;
  const TrapReport trap = trap_radius(p);
  return trap.trap_exists && r_i < trap.r_T && r_f < trap.r_T;
}

double pure_state_rate(std::span<const LindbladOp> ops, const C2& psi_plus) {
  if (std::abs(norm(psi_plus) - 1.0) > 1e-10)
    throw NotUnit("pure_state_rate: state must be normalized");
  const C2 psi_minus{-std::conj(psi_plus[1]), std::conj(psi_plus[0])};
  double s = 0.0;
  for (const LindbladOp& op : ops)
    s += std::norm(inner(psi_minus, op.entries * psi_plus));
  return -2.0 * s;
}

std::optional<C2> common_eigenvector(std::span<const LindbladOp> ops) {
  const std::vector<LindbladOp> kept = drop_zero_ops(ops);
  if (kept.empty()) throw EmptyModel("common_eigenvector: all operators vanish");

  for (const C2& v : eigenvector_candidates(kept.front().entries)) {
    bool shared = true;
    for (const LindbladOp& op : kept) {
      const double tol = 1e-10 * std::max(1.0, frobenius_norm(op.entries));
      if (eigen_residual(op.entries, v) > tol) {
        shared = false;
        break;
      }
    }
    if (shared) return v;
  }
  return std::nullopt;
}

const char* to_string(PurifiabilityCategory c) {
  switch (c) {
    case PurifiabilityCategory::SingleSingular: return "single-singular";
    case PurifiabilityCategory::SingleNonsingularNonorthogonal:
      return "single-nonsingular-nonorthogonal";
    case PurifiabilityCategory::MixedSharedEigenvector:
      return "mixed-shared-eigenvector";
    case PurifiabilityCategory::NonsingularSharedEigenvector:
      return "nonsingular-shared-eigenvector";
    case PurifiabilityCategory::NotPurifiable: return "not-purifiable";
  }
  return "unknown";
}

PurifiabilityVerdict classify_purifiable(std::span<const LindbladOp> ops) {
  const std::vector<LindbladOp> kept = drop_zero_ops(ops);
  if (kept.empty()) throw EmptyModel("classify_purifiable: all operators vanish");
  const std::vector<LindbladOp> unique = dedupe_ops(kept);

  PurifiabilityVerdict verdict;
  verdict.shared_eigenvector = common_eigenvector(unique);

  const ProjectedSystem proj = project_to_six_params(gks_from_lindblad(kept));
  const bool a2_positive = proj.a[1] > 1e-12 * std::max(1.0, proj.a[0]);

  verdict.purifiable = verdict.shared_eigenvector.has_value() && a2_positive;
  if (!verdict.purifiable) {
    verdict.category = PurifiabilityCategory::NotPurifiable;
    verdict.reason = verdict.shared_eigenvector
                         ? "the dissipation is effectively a single Hermitian process "
                           "(second dissipation eigenvalue vanishes)"
                         : "no common eigenvector across the operator list";
  } else if (unique.size() == 1) {
    if (is_singular(unique.front().entries)) {
      verdict.category = PurifiabilityCategory::SingleSingular;
      verdict.reason = "one singular operator";
    } else {
      verdict.category = PurifiabilityCategory::SingleNonsingularNonorthogonal;
      verdict.reason = "one non-singular operator with non-orthogonal eigenvectors";
    }
  } else {
    const bool any_singular =
        std::any_of(unique.begin(), unique.end(),
                    [](const LindbladOp& op) { return is_singular(op.entries); });
    if (any_singular) {
      verdict.category = PurifiabilityCategory::MixedSharedEigenvector;
      verdict.reason = "one singular and several non-singular operators share an eigenvector";
    } else {
      verdict.category = PurifiabilityCategory::NonsingularSharedEigenvector;
      verdict.reason = "non-singular operators share an eigenvector";
    }
  }

  const TrapReport trap = trap_radius(proj);
  verdict.trap_radius_check = trap.r_T;
  const bool numeric_purifiable = std::abs(trap.r_T - 1.0) <= 1e-9 && trap.trap_exists;
  if (numeric_purifiable != verdict.purifiable)
    throw Error("classify_purifiable: structural verdict and trap radius disagree");
  return verdict;
}

}  // namespace blochctl
