#pragma once

#include <functional>
#include <vector>

#include "blochctl/core_model.hpp"

namespace blochctl {

using ControlVector = Vec3;

struct Trajectory {
  std::vector<double> times;   // strictly increasing
  std::vector<Vec3> states;    // Bloch vectors, |n| <= 1 + 1e-6
  std::vector<Vec3> controls;  // applied control at each sample
};

/// Piecewise-continuous control triple sampled on a time grid, together with
/// the plan it was synthesized for.
struct ControlSchedule {
  std::vector<double> breakpoints;  // sample times, strictly increasing
  std::vector<Vec3> controls;
  std::vector<Vec3> planned_path;     // unit vectors at each breakpoint
  std::vector<double> planned_radius; // in (0, 1]

  /// Piecewise-linear interpolation, clamped at the ends.
  Vec3 control_at(double t) const;
};

/// Sampled unit-vector path. `derivs` may be empty, in which case derivatives
/// come from finite differences (second order, one-sided at the ends).
struct PathSamples {
  std::vector<double> times;
  std::vector<Vec3> dirs;
  std::vector<double> radius;
  std::vector<Vec3> derivs;
};

/// Bloch-vector velocity b + 2 u x n + (A - tr(A) I) n in the intrinsic frame.
Vec3 bloch_rhs(const Vec3& n, const ControlVector& u, const ProjectedSystem& p);

/// Radial velocity sum_j b_j n_j - r sum_j a_j (1 - n_j^2); independent of the
/// controls. Throws NotUnit if |n_hat| is off unity by more than 1e-10.
double radial_rate(double r, const Vec3& n_hat, const ProjectedSystem& p);

/// Unit-vector velocity 2 u x n + (b - (b.n)n)/r + (A n - (n.A n) n); always
/// tangent to the sphere. Throws ZeroRadius if r <= 0.
Vec3 unit_rhs(const Vec3& n_hat, double r, const ControlVector& u, const ProjectedSystem& p);

struct EigenPair {
  double lambda_plus;
  double lambda_minus;
  C2 psi_plus;
  C2 psi_minus;
};

/// Spectral data (1 +- r)/2 of the density matrix at a Bloch state; the
/// eigenvectors depend only on the direction. Throws DegenerateState at r ~ 0.
EigenPair eigenpair(const BlochState& state);

/// Controls u(t) = 1/2 (n x dn/dt - (n x b)/r - n x (A n)) that make the full
/// Bloch flow follow the prescribed (dir, radius) path. Throws RadiusUnderflow
/// if the planned radius dips below `radius_floor` (the prescription is
/// unbounded as r -> 0).
ControlSchedule controls_for_path(const PathSamples& path, const ProjectedSystem& p,
                                  double radius_floor = 1e-6);

using ControlFn = std::function<Vec3(double)>;

/// Classical fixed-step fourth-order integration of the Bloch equation.
/// Throws BallViolation if any step leaves |n| <= 1 + 1e-6.
Trajectory integrate_bloch(const BlochState& n0, const ControlFn& u,
                           const ProjectedSystem& p, double T, double dt);

struct RadialCurve {
  std::vector<double> times;
  std::vector<double> radius;
  std::vector<Vec3> dirs;  // policy direction at each sample
  bool hit_floor = false;  // stopped because the radius reached the floor
};

using DirectionPolicy = std::function<Vec3(double t, double r)>;

/// Integrates the radial equation with the unit direction supplied by a
/// policy; stops with `hit_floor` when the solution reaches the floor.
RadialCurve integrate_radial(double r0, const DirectionPolicy& policy,
                             const ProjectedSystem& p, double T, double dt,
                             double floor = 1e-6);

// Single RK4 steps, shared with the steering planner.
Vec3 rk4_bloch_step(const Vec3& n, double t, double h, const ControlFn& u,
                    const ProjectedSystem& p);
double rk4_radial_step(double r, double t, double h, const DirectionPolicy& policy,
                       const ProjectedSystem& p);

}  // namespace blochctl
