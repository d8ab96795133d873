#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blochctl/analysis.hpp"

namespace blochctl {

/// Malformed model file (bad JSON, wrong shapes, missing fields). The message
/// names the offending field.
struct ParseError : Error {
  using Error::Error;
};

/// In-memory form of a model file. Exactly one of `lindblad_ops`, `gks`,
/// `projected` is present; complex numbers are [re, im] pairs on disk.
struct ModelFile {
  std::optional<std::vector<Mat2>> lindblad_ops;
  std::optional<Mat3c> gks;
  struct ProjectedParams {
    Vec3 a;
    Vec3 b;
  };
  std::optional<ProjectedParams> projected;
  std::optional<Mat2> hamiltonian_drift;
  std::string label;
};

ModelFile parse_model_json(const std::string& text);
ModelFile load_model_file(const std::string& path);

/// A model file realized through the validation chain. `ops` is present only
/// for operator-list models; `projected` always is.
struct LoadedModel {
  std::optional<std::vector<LindbladOp>> ops;
  std::optional<GksModel> gks;
  ProjectedSystem projected;
  bool drift_discarded = false;
  std::string label;
};

LoadedModel realize_model(const ModelFile& file);

// Deterministic text output: %.17g numbers, fixed column order.
std::string envelope_csv(const RateEnvelope& env);
std::string trajectory_csv(const Trajectory& traj);

/// Control samples "t,u1,u2,u3" from CSV (header optional), linearly interpolated.
ControlFn controls_from_csv(const std::string& text);

}  // namespace blochctl
