#pragma once

#include <optional>
#include <span>
#include <vector>

#include "blochctl/dynamics.hpp"

namespace blochctl {

enum class CandidateBranch { InteriorRoot, AxisBranch, Analytic };

/// A solution of the first-order conditions b_j + 2 r a_j n_j = 2 lambda n_j
/// on the unit sphere. `ring` marks members of a continuum of solutions with
/// equal rate (reported through signed-axis representatives).
struct StationaryCandidate {
  Vec3 n_hat;
  double multiplier = 0.0;
  double rate = 0.0;
  CandidateBranch branch = CandidateBranch::InteriorRoot;
  bool ring = false;
};

struct EnvelopePoint {
  double f_max;
  double f_min;
  Vec3 argmax;
  Vec3 argmin;
};

struct RateEnvelope {
  std::vector<double> r_grid;
  std::vector<double> f_max;
  std::vector<double> f_min;
  std::vector<Vec3> argmax_dirs;
  std::vector<Vec3> argmin_dirs;
};

/// All stationary directions of the radial rate on the unit sphere at radius
/// r. The fully degenerate system (all parameters zero) returns the six
/// signed axes. The list always contains the global maximizer and minimizer.
std::vector<StationaryCandidate> stationary_candidates(double r, const ProjectedSystem& p);

/// Extremal achievable radial rates at radius r, with the achieving
/// directions (lexicographically smallest on ties).
EnvelopePoint envelope_at(double r, const ProjectedSystem& p);

/// Closed-form envelope for the axial family b = (0, 0, b3), a1 = a2, a3 = 0.
/// Empty when the system is not of that form; callers fall back to the
/// numeric path.
std::optional<EnvelopePoint> analytic_axial_envelope(const ProjectedSystem& p, double r);

/// Envelope sampled over an increasing grid in (0, 1]. Uses the closed-form
/// fast path when it applies, cross-checking it against the numeric path on
/// a 1% subsample.
RateEnvelope envelope_curve(const ProjectedSystem& p, std::span<const double> grid);

/// Unit sphere points on a Fibonacci (golden-spiral) lattice.
const std::vector<Vec3>& fibonacci_sphere(int count);

struct BruteEnvelope {
  double f_max;
  double f_min;
  Vec3 argmax;
  Vec3 argmin;
};

/// Independent sampling oracle: extremal rates over `count` Fibonacci-lattice
/// directions. Requires count >= 1000.
BruteEnvelope brute_force_envelope(double r, const ProjectedSystem& p, int count);

}  // namespace blochctl
