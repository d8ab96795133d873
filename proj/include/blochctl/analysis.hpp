#pragma once

#include <optional>
#include <span>
#include <string>

#include "blochctl/extremal.hpp"

namespace blochctl {

enum class TrapMethod { Analytic, Bisection };

/// Radius r_T below which the radial dynamics is fully controllable. When the
/// anti-symmetric part vanishes there is no trap and r_T is reported as 0.
struct TrapReport {
  double r_T = 0.0;
  bool trap_exists = false;
  TrapMethod method = TrapMethod::Bisection;
  double residual = 0.0;  // |f_max(r_T)|
};

TrapReport trap_radius(const ProjectedSystem& p);

/// Whether r_i can be steered to r_f in finite time: always when r_f <= r_i,
/// and otherwise only when both radii lie strictly inside the trap.
bool reachable(double r_i, double r_f, const ProjectedSystem& p);

/// Radial velocity at a pure state: -2 sum_j |<psi_-|L_j|psi_+>|^2, never
/// positive. Matches radial_rate at r = 1 with the Bloch direction of psi_+.
double pure_state_rate(std::span<const LindbladOp> ops, const C2& psi_plus);

/// A unit vector that is an eigenvector of every nonzero operator in the
/// list, if one exists. Throws EmptyModel when all operators vanish.
std::optional<C2> common_eigenvector(std::span<const LindbladOp> ops);

enum class PurifiabilityCategory {
  SingleSingular,
  SingleNonsingularNonorthogonal,
  MixedSharedEigenvector,
  NonsingularSharedEigenvector,
  NotPurifiable,
};

const char* to_string(PurifiabilityCategory c);

struct PurifiabilityVerdict {
  bool purifiable = false;
  PurifiabilityCategory category = PurifiabilityCategory::NotPurifiable;
  std::optional<C2> shared_eigenvector;
  std::string reason;
  double trap_radius_check = 0.0;  // r_T of the projected system
};

/// Structural purifiability classification: purifiable iff the (deduplicated)
/// operators share a common eigenvector and the projected system has a2 > 0.
/// Cross-checked against the trap radius (purifiable iff r_T = 1).
PurifiabilityVerdict classify_purifiable(std::span<const LindbladOp> ops);

}  // namespace blochctl
