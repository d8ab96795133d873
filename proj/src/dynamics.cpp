#include "blochctl/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace blochctl {

namespace {

double rate_unchecked(double r, const Vec3& n, const ProjectedSystem& p) {
  double s = 0.0;
  for (int j = 0; j < 3; ++j)
    s += p.b[j] * n[j] - r * p.a[j] * (1.0 - n[j] * n[j]);
  return s;
}

void require_unit(const Vec3& n_hat) {
  if (std::abs(norm(n_hat) - 1.0) > 1e-10)
    throw NotUnit("direction vector is not unit length");
}

// Derivative of f sampled at (t0,f0), (t1,f1), (t2,f2), evaluated at t1;
// exact for quadratics, handles non-uniform spacing.
Vec3 three_point_derivative(double t0, const Vec3& f0, double t1, const Vec3& f1,
                            double t2, const Vec3& f2, double at) {
  const double d01 = t1 - t0;
  const double d02 = t2 - t0;
  const double d12 = t2 - t1;
  const double w0 = (2.0 * at - t1 - t2) / (d01 * d02);
  const double w1 = (2.0 * at - t0 - t2) / (-d01 * d12);
  const double w2 = (2.0 * at - t0 - t1) / (d02 * d12);
  return w0 * f0 + w1 * f1 + w2 * f2;
}

}  // namespace

Vec3 bloch_rhs(const Vec3& n, const ControlVector& u, const ProjectedSystem& p) {
  const double tr = p.a[0] + p.a[1] + p.a[2];
  Vec3 out = p.b + 2.0 * cross(u, n);
  for (int j = 0; j < 3; ++j) out[j] += (p.a[j] - tr) * n[j];
  return out;
}

double radial_rate(double r, const Vec3& n_hat, const ProjectedSystem& p) {
  require_unit(n_hat);
  if (!(r > 0.0) || r > 1.0 + 1e-9)
    throw std::invalid_argument("radial_rate: radius outside (0, 1]");
  return rate_unchecked(r, n_hat, p);
}

Vec3 unit_rhs(const Vec3& n_hat, double r, const ControlVector& u,
              const ProjectedSystem& p) {
  if (r <= 0.0) throw ZeroRadius("unit_rhs: radius must be positive");
  require_unit(n_hat);
  const Vec3 an{p.a[0] * n_hat[0], p.a[1] * n_hat[1], p.a[2] * n_hat[2]};
  const double nan = dot(n_hat, an);
  return 2.0 * cross(u, n_hat) + (1.0 / r) * (p.b - dot(p.b, n_hat) * n_hat) +
         (an - nan * n_hat);
}

EigenPair eigenpair(const BlochState& state) {
  const double r = norm(state.n);
  if (r < 1e-12)
    throw DegenerateState("eigenpair: eigenvectors undefined at the maximally mixed state");
  const Vec3 d = state.n / r;

  EigenPair out;
  out.lambda_plus = 0.5 * (1.0 + r);
  out.lambda_minus = 0.5 * (1.0 - r);
  // Two algebraically equivalent forms, each stable on its hemisphere.
  if (d[2] >= 0.0) {
    const double denom = std::sqrt(2.0 * (1.0 + d[2]));
    out.psi_plus = {std::sqrt(0.5 * (1.0 + d[2])), complexd(d[0], d[1]) / denom};
  } else {
    const double denom = std::sqrt(2.0 * (1.0 - d[2]));
    out.psi_plus = {complexd(d[0], -d[1]) / denom, std::sqrt(0.5 * (1.0 - d[2]))};
  }
  out.psi_minus = {-std::conj(out.psi_plus[1]), std::conj(out.psi_plus[0])};
  return out;
}

Vec3 ControlSchedule::control_at(double t) const {
  if (breakpoints.empty()) return Vec3{};
  if (t <= breakpoints.front()) return controls.front();
  if (t >= breakpoints.back()) return controls.back();
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - breakpoints.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - breakpoints[lo]) / (breakpoints[hi] - breakpoints[lo]);
  return (1.0 - w) * controls[lo] + w * controls[hi];
}

ControlSchedule controls_for_path(const PathSamples& path, const ProjectedSystem& p,
                                  double radius_floor) {
  const std::size_t n = path.times.size();
  if (n < 2 || path.dirs.size() != n || path.radius.size() != n)
    throw std::invalid_argument("controls_for_path: need >= 2 consistent samples");
  if (!path.derivs.empty() && path.derivs.size() != n)
    throw std::invalid_argument("controls_for_path: derivative sample count mismatch");

  ControlSchedule sched;
  sched.breakpoints = path.times;
  sched.planned_path = path.dirs;
  sched.planned_radius = path.radius;
  sched.controls.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    require_unit(path.dirs[i]);
    if (path.radius[i] < radius_floor)
      throw RadiusUnderflow("controls_for_path: planned radius under the floor");
    if (path.radius[i] > 1.0 + 1e-9)
      throw std::invalid_argument("controls_for_path: planned radius above 1");
  }

  for (std::size_t i = 0; i < n; ++i) {
    Vec3 ddir;
    if (!path.derivs.empty()) {
      ddir = path.derivs[i];
    } else {
      const std::size_t c = std::clamp<std::size_t>(i, 1, n - 2);
      ddir = three_point_derivative(path.times[c - 1], path.dirs[c - 1], path.times[c],
                                    path.dirs[c], path.times[c + 1], path.dirs[c + 1],
                                    path.times[i]);
    }
    const Vec3& d = path.dirs[i];
    const double r = path.radius[i];
    const Vec3 ad{p.a[0] * d[0], p.a[1] * d[1], p.a[2] * d[2]};
    sched.controls[i] =
        0.5 * (cross(d, ddir) - (1.0 / r) * cross(d, p.b) - cross(d, ad));
  }
  return sched;
}

Vec3 rk4_bloch_step(const Vec3& n, double t, double h, const ControlFn& u,
                    const ProjectedSystem& p) {
  const Vec3 k1 = bloch_rhs(n, u(t), p);
  const Vec3 k2 = bloch_rhs(n + 0.5 * h * k1, u(t + 0.5 * h), p);
  const Vec3 k3 = bloch_rhs(n + 0.5 * h * k2, u(t + 0.5 * h), p);
  const Vec3 k4 = bloch_rhs(n + h * k3, u(t + h), p);
  return n + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double rk4_radial_step(double r, double t, double h, const DirectionPolicy& policy,
                       const ProjectedSystem& p) {
  const auto f = [&](double tt, double rr) {
    return rate_unchecked(rr, policy(tt, rr), p);
  };
  const double k1 = f(t, r);
  const double k2 = f(t + 0.5 * h, r + 0.5 * h * k1);
  const double k3 = f(t + 0.5 * h, r + 0.5 * h * k2);
  const double k4 = f(t + h, r + h * k3);
  return r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_bloch(const BlochState& n0, const ControlFn& u,
                           const ProjectedSystem& p, double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_bloch: dt must be positive");
  if (T < 0.0) throw std::invalid_argument("integrate_bloch: duration must be >= 0");
  if (norm(n0.n) > 1.0 + 1e-9)
    throw InvalidDensity("integrate_bloch: initial state outside the unit ball");

  Trajectory traj;
  Vec3 n = n0.n;
  double t = 0.0;
  traj.times.push_back(t);
  traj.states.push_back(n);
  traj.controls.push_back(u(t));

  while (t < T - 1e-12 * std::max(1.0, T)) {
    const double h = std::min(dt, T - t);
    n = rk4_bloch_step(n, t, h, u, p);
    t += h;
    if (norm(n) > 1.0 + 1e-6)
      throw BallViolation("integrate_bloch: state left the unit ball");
    traj.times.push_back(t);
    traj.states.push_back(n);
    traj.controls.push_back(u(t));
  }
  return traj;
}

RadialCurve integrate_radial(double r0, const DirectionPolicy& policy,
                             const ProjectedSystem& p, double T, double dt,
                             double floor) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_radial: dt must be positive");
  if (!(r0 > 0.0) || r0 > 1.0 + 1e-9)
    throw std::invalid_argument("integrate_radial: r0 outside (0, 1]");

  RadialCurve curve;
  double r = r0;
  double t = 0.0;
  curve.times.push_back(t);
  curve.radius.push_back(r);
  curve.dirs.push_back(policy(t, r));

  while (t < T - 1e-12 * std::max(1.0, T)) {
    const double h = std::min(dt, T - t);
    const double next = rk4_radial_step(r, t, h, policy, p);
    t += h;
    if (next < floor) {
      curve.hit_floor = true;
      break;
    }
    if (next > 1.0 + 1e-6)
      throw BallViolation("integrate_radial: radius left the unit interval");
    r = next;
    curve.times.push_back(t);
    curve.radius.push_back(r);
    curve.dirs.push_back(policy(t, r));
  }
  return curve;
}

}  // namespace blochctl
