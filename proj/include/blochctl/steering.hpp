#pragma once

#include <string>

#include "blochctl/analysis.hpp"

namespace blochctl {

struct SteerOptions {
  double dt = 1e-4;
  double t_max = 1000.0;       // planning horizon guard (time units)
  double radius_floor = 1e-6;
  double target_tol = 1e-4;    // required |r(T) - r_f|
};

struct SteerResult {
  bool feasible = false;
  bool floor_hit = false;
  Trajectory trajectory;
  ControlSchedule schedule;
  double duration = 0.0;
  double max_control_norm = 0.0;
  double trap = 0.0;  // r_T of the system
  std::string message;
};

/// Plans a radius transfer along the extremal-direction policy, synthesizes
/// the tracking controls, and integrates the full Bloch flow. The initial
/// state is r_i times the extremal direction at r_i.
SteerResult steer(const ProjectedSystem& p, double r_i, double r_f,
                  const SteerOptions& opts = {});

}  // namespace blochctl
