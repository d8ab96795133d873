#include "blochctl/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace blochctl {

namespace {

using nlohmann::json;

complexd parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return complexd(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + " must be a number or an [re, im] pair");
  return complexd(j[0].get<double>(), j[1].get<double>());
}

Mat2 parse_mat2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError(where + " must be a 2x2 matrix (two rows)");
  Mat2 m;
  for (std::size_t r = 0; r < 2; ++r) {
    if (!j[r].is_array() || j[r].size() != 2)
      throw ParseError(where + " row " + std::to_string(r) + " must have 2 entries");
    for (std::size_t c = 0; c < 2; ++c)
      m(r, c) = parse_complex(j[r][c], where + "[" + std::to_string(r) + "][" +
                                           std::to_string(c) + "]");
  }
  return m;
}

Mat3c parse_mat3c(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(where + " must be a 3x3 matrix (three rows)");
  Mat3c m;
  for (std::size_t r = 0; r < 3; ++r) {
    if (!j[r].is_array() || j[r].size() != 3)
      throw ParseError(where + " row " + std::to_string(r) + " must have 3 entries");
    for (std::size_t c = 0; c < 3; ++c)
      m(r, c) = parse_complex(j[r][c], where + "[" + std::to_string(r) + "][" +
                                           std::to_string(c) + "]");
  }
  return m;
}

Vec3 parse_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(where + " must be a 3-vector");
  Vec3 v;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number())
      throw ParseError(where + "[" + std::to_string(i) + "] must be a number");
    v[i] = j[i].get<double>();
  }
  return v;
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ModelFile parse_model_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("model file must be a JSON object");

  ModelFile file;
  int forms = 0;
  if (j.contains("lindblad_ops")) {
    const json& ops = j["lindblad_ops"];
    if (!ops.is_array() ) throw ParseError("lindblad_ops must be an array of 2x2 matrices");
    std::vector<Mat2> parsed;
    for (std::size_t i = 0; i < ops.size(); ++i)
      parsed.push_back(parse_mat2(ops[i], "lindblad_ops[" + std::to_string(i) + "]"));
    file.lindblad_ops = std::move(parsed);
    ++forms;
  }
  if (j.contains("gks")) {
    file.gks = parse_mat3c(j["gks"], "gks");
    ++forms;
  }
  if (j.contains("projected")) {
    const json& pj = j["projected"];
    if (!pj.is_object() || !pj.contains("a") || !pj.contains("b"))
      throw ParseError("projected must be an object with fields a and b");
    file.projected = ModelFile::ProjectedParams{parse_vec3(pj["a"], "projected.a"),
                                                parse_vec3(pj["b"], "projected.b")};
    ++forms;
  }
  if (forms != 1)
    throw ParseError("model file must contain exactly one of lindblad_ops, gks, projected");

  if (j.contains("hamiltonian_drift"))
    file.hamiltonian_drift = parse_mat2(j["hamiltonian_drift"], "hamiltonian_drift");
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ParseError("label must be a string");
    file.label = j["label"].get<std::string>();
  }
  return file;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_json(ss.str());
}

LoadedModel realize_model(const ModelFile& file) {
  LoadedModel model;
  model.label = file.label;
  model.drift_discarded = file.hamiltonian_drift.has_value();

  if (file.lindblad_ops) {
    std::vector<LindbladOp> ops;
    for (const Mat2& m : *file.lindblad_ops) ops.push_back(make_lindblad_op(m));
    GksModel gks = gks_from_lindblad(ops);
    model.projected = project_to_six_params(gks);
    model.gks = std::move(gks);
    model.ops = std::move(ops);
  } else if (file.gks) {
    GksModel gks{*file.gks, {}};
    model.projected = project_to_six_params(gks);
    model.gks = std::move(gks);
  } else {
    model.projected = projected_from_params(file.projected->a, file.projected->b);
  }
  return model;
}

std::string envelope_csv(const RateEnvelope& env) {
  std::string out = "r,f_max,f_min,nmax1,nmax2,nmax3,nmin1,nmin2,nmin3\n";
  for (std::size_t i = 0; i < env.r_grid.size(); ++i) {
    out += fmt17(env.r_grid[i]);
    out += ',';
    out += fmt17(env.f_max[i]);
    out += ',';
    out += fmt17(env.f_min[i]);
    for (int k = 0; k < 3; ++k) {
      out += ',';
      out += fmt17(env.argmax_dirs[i][k]);
    }
    for (int k = 0; k < 3; ++k) {
      out += ',';
      out += fmt17(env.argmin_dirs[i][k]);
    }
    out += '\n';
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,n1,n2,n3,r,u1,u2,u3\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Vec3& n = traj.states[i];
    const Vec3 u = traj.controls.empty() ? Vec3{} : traj.controls[i];
    out += fmt17(traj.times[i]);
    for (int k = 0; k < 3; ++k) {
      out += ',';
      out += fmt17(n[k]);
    }
    out += ',';
    out += fmt17(norm(n));
    for (int k = 0; k < 3; ++k) {
      out += ',';
      out += fmt17(u[k]);
    }
    out += '\n';
  }
  return out;
}

ControlFn controls_from_csv(const std::string& text) {
  auto samples = std::make_shared<std::vector<std::pair<double, Vec3>>>();
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string field;
    std::array<double, 4> vals{};
    bool numeric = true;
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(ls, field, ',')) {
        numeric = false;
        break;
      }
      try {
        vals[i] = std::stod(field);
      } catch (...) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (lineno == 1) continue;  // header
      throw ParseError("controls file line " + std::to_string(lineno) +
                       " is not t,u1,u2,u3");
    }
    samples->push_back({vals[0], Vec3{vals[1], vals[2], vals[3]}});
  }
  if (samples->empty()) throw ParseError("controls file contains no samples");
  for (std::size_t i = 1; i < samples->size(); ++i)
    if ((*samples)[i].first <= (*samples)[i - 1].first)
      throw ParseError("controls file times must be strictly increasing");

  return [samples](double t) -> Vec3 {
    const auto& s = *samples;
    if (t <= s.front().first) return s.front().second;
    if (t >= s.back().first) return s.back().second;
    std::size_t lo = 0, hi = s.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (s[mid].first <= t)
        lo = mid;
      else
        hi = mid;
    }
    const double w = (t - s[lo].first) / (s[hi].first - s[lo].first);
    return (1.0 - w) * s[lo].second + w * s[hi].second;
  };
}

}  // namespace blochctl
