// blochctl: analyze controllability and purifiability of dissipative
// two-level systems through their Bloch-radius dynamics.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "blochctl/model_io.hpp"
#include "blochctl/steering.hpp"

namespace {

using blochctl::Vec3;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;     // malformed input / I/O failure
constexpr int kExitInvalid = 2;   // model fails validity checks
constexpr int kExitInfeasible = 3;
constexpr int kExitGuard = 4;     // numerical guard tripped

struct GlobalOpts {
  std::string model_path;
  std::string out_path;
  int json_indent = 2;
  unsigned long long seed = 1;
  bool quiet = false;
  bool timestamp = false;
};

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json mat3_json(const blochctl::Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i)
    rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

json c2_json(const blochctl::C2& v) {
  return json::array({json::array({v[0].real(), v[0].imag()}),
                      json::array({v[1].real(), v[1].imag()})});
}

void stamp(json& j, const GlobalOpts& g) {
  if (!g.timestamp) return;
  j["timestamp"] = static_cast<long long>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
}

void emit(const json& j, const GlobalOpts& g) {
  std::cout << j.dump(g.json_indent) << "\n";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw blochctl::ParseError("cannot open output file: " + path);
  out << text;
  if (!out) throw blochctl::ParseError("write failed: " + path);
}

blochctl::LoadedModel load(const GlobalOpts& g) {
  const blochctl::ModelFile file = blochctl::load_model_file(g.model_path);
  blochctl::LoadedModel model = blochctl::realize_model(file);
  if (model.drift_discarded && !g.quiet)
    std::cerr << "note: hamiltonian_drift discarded; constant drifts are absorbed "
                 "by re-calibrating the controls\n";
  return model;
}

Vec3 parse_triple(const std::string& text, const std::string& what) {
  Vec3 v;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &v[0], &v[1], &v[2]) != 3)
    throw blochctl::ParseError(what + " must be three comma-separated numbers");
  return v;
}

std::vector<double> uniform_grid(int n) {
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = static_cast<double>(i + 1) / n;
  return grid;
}

// ------------------------------------------------------------------ commands

int cmd_project(const GlobalOpts& g) {
  const blochctl::LoadedModel model = load(g);
  const blochctl::ProjectedSystem& p = model.projected;
  json out;
  if (!model.label.empty()) out["label"] = model.label;
  out["a"] = vec_json(p.a);
  out["b"] = vec_json(p.b);
  out["frame"] = mat3_json(p.frame);
  out["inequality_ok"] = blochctl::validate_inequality(p);
  stamp(out, g);
  emit(out, g);
  if (!g.out_path.empty()) write_file(g.out_path, out.dump(g.json_indent) + "\n");
  return kExitOk;
}

int cmd_envelope(const GlobalOpts& g, int grid_n, int oracle_check) {
  if (grid_n < 2) throw blochctl::ParseError("--grid must be at least 2");
  if (g.out_path.empty())
    throw blochctl::ParseError("envelope requires --out for the CSV curve");

  const blochctl::LoadedModel model = load(g);
  const blochctl::ProjectedSystem& p = model.projected;
  const std::vector<double> grid = uniform_grid(grid_n);
  const blochctl::RateEnvelope env = blochctl::envelope_curve(p, grid);
  write_file(g.out_path, blochctl::envelope_csv(env));

  const blochctl::TrapReport trap = blochctl::trap_radius(p);
  const blochctl::EnvelopePoint near_zero = blochctl::envelope_at(1e-8, p);
  const blochctl::EnvelopePoint at_one = blochctl::envelope_at(1.0, p);

  json out;
  if (!model.label.empty()) out["label"] = model.label;
  out["grid"] = grid_n;
  out["csv"] = g.out_path;
  out["r_T"] = trap.r_T;
  out["trap_exists"] = trap.trap_exists;
  out["trap_method"] = trap.method == blochctl::TrapMethod::Analytic ? "analytic" : "bisection";
  out["f_max_at_1"] = at_one.f_max;
  out["f_min_at_1"] = at_one.f_min;
  out["limit_r_to_0"] = {{"f_max", near_zero.f_max}, {"f_min", near_zero.f_min}};

  if (oracle_check > 0) {
    std::mt19937_64 rng(g.seed);
    std::uniform_int_distribution<int> pick(0, grid_n - 1);
    double max_dev = 0.0;
    for (int k = 0; k < oracle_check; ++k) {
      const int i = pick(rng);
      const blochctl::BruteEnvelope brute =
          blochctl::brute_force_envelope(grid[i], p, 1000000);
      max_dev = std::max(max_dev, std::abs(brute.f_max - env.f_max[i]));
      max_dev = std::max(max_dev, std::abs(brute.f_min - env.f_min[i]));
    }
    out["oracle_check"] = {{"rows", oracle_check}, {"max_deviation", max_dev}};
  }
  stamp(out, g);
  emit(out, g);
  return kExitOk;
}

int cmd_classify(const GlobalOpts& g) {
  const blochctl::ModelFile file = blochctl::load_model_file(g.model_path);
  if (!file.lindblad_ops) {
    std::cerr << "error: classify needs the model as lindblad_ops; a gks or "
                 "projected form does not determine the operator decomposition\n";
    return kExitInvalid;
  }
  const blochctl::LoadedModel model = load(g);
  const blochctl::PurifiabilityVerdict verdict =
      blochctl::classify_purifiable(*model.ops);

  json out;
  if (!model.label.empty()) out["label"] = model.label;
  out["purifiable"] = verdict.purifiable;
  out["category"] = blochctl::to_string(verdict.category);
  out["shared_eigenvector"] =
      verdict.shared_eigenvector ? c2_json(*verdict.shared_eigenvector) : json(nullptr);
  out["reason"] = verdict.reason;
  out["trap_radius_check"] = verdict.trap_radius_check;
  stamp(out, g);
  emit(out, g);
  if (!g.out_path.empty()) write_file(g.out_path, out.dump(g.json_indent) + "\n");
  return kExitOk;
}

int cmd_steer(const GlobalOpts& g, double r_from, double r_to, double dt,
              double t_max) {
  if (g.out_path.empty())
    throw blochctl::ParseError("steer requires --out for the trajectory CSV");
  const blochctl::LoadedModel model = load(g);

  blochctl::SteerOptions opts;
  opts.dt = dt;
  opts.t_max = t_max;
  const blochctl::SteerResult res = blochctl::steer(model.projected, r_from, r_to, opts);

  json out;
  if (!model.label.empty()) out["label"] = model.label;
  out["feasible"] = res.feasible;
  out["r_T"] = res.trap;
  if (!res.message.empty()) out["reason"] = res.message;
  if (res.feasible) {
    out["duration"] = res.duration;
    out["max_control_norm"] = res.max_control_norm;
    write_file(g.out_path, blochctl::trajectory_csv(res.trajectory));
    out["csv"] = g.out_path;
  }
  stamp(out, g);
  emit(out, g);
  if (!res.feasible) return res.floor_hit ? kExitGuard : kExitInfeasible;
  return kExitOk;
}

int cmd_simulate(const GlobalOpts& g, const std::string& n0_text,
                 const std::string& controls, double T, double dt) {
  if (g.out_path.empty())
    throw blochctl::ParseError("simulate requires --out for the trajectory CSV");
  const blochctl::LoadedModel model = load(g);
  const Vec3 n0 = parse_triple(n0_text, "--n0");

  blochctl::ControlFn u = [](double) { return Vec3{}; };
  if (!controls.empty() && controls != "zero") {
    std::ifstream in(controls);
    if (!in) throw blochctl::ParseError("cannot open controls file: " + controls);
    std::ostringstream ss;
    ss << in.rdbuf();
    u = blochctl::controls_from_csv(ss.str());
  }

  const blochctl::Trajectory traj = blochctl::integrate_bloch(
      blochctl::make_bloch_state(n0), u, model.projected, T, dt);
  write_file(g.out_path, blochctl::trajectory_csv(traj));

  const Vec3& nf = traj.states.back();
  json out;
  if (!model.label.empty()) out["label"] = model.label;
  out["duration"] = traj.times.back();
  out["final_n"] = vec_json(nf);
  out["final_r"] = blochctl::norm(nf);
  out["csv"] = g.out_path;
  stamp(out, g);
  emit(out, g);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloch-radius controllability analysis of dissipative two-level systems"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--model", g.model_path, "model file (JSON)")->required();
  app.add_option("--out", g.out_path, "output path for curves/trajectories");
  app.add_option("--json-indent", g.json_indent, "JSON indent width")
      ->default_val(2);
  app.add_option("--seed", g.seed, "seed for randomized oracle subsampling")
      ->default_val(1);
  app.add_flag("--quiet", g.quiet, "suppress notes on stderr");
  app.add_flag("--timestamp", g.timestamp, "include a timestamp in JSON output");

  CLI::App* project = app.add_subcommand("project", "print the six-parameter projected system");

  CLI::App* envelope = app.add_subcommand("envelope", "tabulate the extremal rate curves");
  int grid_n = 10000;
  int oracle_check = 0;
  envelope->add_option("--grid", grid_n, "number of radius samples")->default_val(10000);
  envelope->add_option("--oracle-check", oracle_check,
                       "cross-check K random rows against the sphere-sampling oracle");

  CLI::App* classify = app.add_subcommand("classify", "purifiability classification");

  CLI::App* steer = app.add_subcommand("steer", "steer the Bloch radius between two values");
  double r_from = 0.0, r_to = 0.0, steer_dt = 1e-4, steer_tmax = 1000.0;
  steer->add_option("--from", r_from, "initial radius")->required();
  steer->add_option("--to", r_to, "target radius")->required();
  steer->add_option("--dt", steer_dt, "integration step")->default_val(1e-4);
  steer->add_option("--t-max", steer_tmax, "planning horizon guard")->default_val(1000.0);

  CLI::App* simulate = app.add_subcommand("simulate", "integrate the Bloch equation");
  std::string n0_text = "0,0,0";
  std::string controls = "zero";
  double sim_T = 1.0, sim_dt = 1e-4;
  simulate->add_option("--n0", n0_text, "initial Bloch vector x,y,z")->required();
  simulate->add_option("--controls", controls, "controls CSV (t,u1,u2,u3) or 'zero'");
  simulate->add_option("--T", sim_T, "duration")->required();
  simulate->add_option("--dt", sim_dt, "integration step")->default_val(1e-4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (project->parsed()) return cmd_project(g);
    if (envelope->parsed()) return cmd_envelope(g, grid_n, oracle_check);
    if (classify->parsed()) return cmd_classify(g);
    if (steer->parsed()) return cmd_steer(g, r_from, r_to, steer_dt, steer_tmax);
    if (simulate->parsed()) return cmd_simulate(g, n0_text, controls, sim_T, sim_dt);
  } catch (const blochctl::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const blochctl::NotPsd& e) {
    std::cerr << "error: invalid model: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const blochctl::InvalidDensity& e) {
    std::cerr << "error: invalid state: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const blochctl::NonTraceless& e) {
    std::cerr << "error: invalid model: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const blochctl::EmptyModel& e) {
    std::cerr << "error: invalid model: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const blochctl::BallViolation& e) {
    std::cerr << "error: numerical guard: " << e.what() << "\n";
    return kExitGuard;
  } catch (const blochctl::RadiusUnderflow& e) {
    std::cerr << "error: numerical guard: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitParse;
}
