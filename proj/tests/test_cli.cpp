#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

// End-to-end checks of the command-line tool: exit-code contract, output
// schemas, determinism, and the project -> envelope round trip.

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("blochctl_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("BLOCHCTL_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "BLOCHCTL_BIN must point at the built binary");
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(bin) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = slurp(out);
  res.err = slurp(err);
  return res;
}

fs::path write_model(const std::string& name, const std::string& text) {
  const fs::path p = work_dir() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p;
}

const std::string kFig1Projected =
    R"({"projected": {"a": [10, 10, 0], "b": [0, 0, 12]}, "label": "axial"})";
const std::string kSigmaMinusOps =
    R"({"lindblad_ops": [[[[0,0],[0,0]],[[1,0],[0,0]]]]})";
const std::string kIsotropic = R"({"projected": {"a": [1, 1, 1], "b": [0, 0, 0]}})";
const std::string kBadGks =
    R"({"gks": [[[-1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]]})";

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("project prints the six parameters") {
  const fs::path model = write_model("sigma_minus.json", kSigmaMinusOps);
  const RunResult res = run_cli("project --model " + model.string());
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["a"][0].get<double>() == doctest::Approx(0.5));
  CHECK(j["a"][1].get<double>() == doctest::Approx(0.5));
  CHECK(j["a"][2].get<double>() == doctest::Approx(0.0));
  CHECK(j["b"][2].get<double>() == doctest::Approx(-1.0));
  CHECK(j["inequality_ok"].get<bool>());
}

TEST_CASE("project rejects a non-psd coefficient matrix with exit 2") {
  const fs::path model = write_model("bad_gks.json", kBadGks);
  const RunResult res = run_cli("project --model " + model.string());
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("not positive semidefinite") != std::string::npos);
}

TEST_CASE("malformed input exits 1") {
  const fs::path model = write_model("broken.json", "{ not json");
  CHECK(run_cli("project --model " + model.string()).exit_code == 1);
  CHECK(run_cli("project --model " + (work_dir() / "missing.json").string()).exit_code == 1);
  const fs::path both = write_model(
      "both.json", R"({"projected": {"a": [1,1,1], "b": [0,0,0]}, "gks": []})");
  CHECK(run_cli("project --model " + both.string()).exit_code == 1);
}

TEST_CASE("envelope writes the curve and a summary") {
  const fs::path model = write_model("fig1.json", kFig1Projected);
  const fs::path csv = work_dir() / "env.csv";
  const RunResult res = run_cli("envelope --model " + model.string() + " --grid 200 --out " +
                                csv.string());
  REQUIRE(res.exit_code == 0);

  const json j = json::parse(res.out);
  CHECK(j["r_T"].get<double>() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(j["trap_exists"].get<bool>());
  CHECK(j["f_max_at_1"].get<double>() == doctest::Approx(-6.4).epsilon(1e-12));
  CHECK(j["f_min_at_1"].get<double>() == doctest::Approx(-32.0).epsilon(1e-12));
  CHECK(j["limit_r_to_0"]["f_max"].get<double>() == doctest::Approx(12.0).epsilon(1e-6));

  const auto lines = csv_lines(slurp(csv));
  REQUIRE(lines.size() == 201);  // header + 200 rows
  CHECK(lines[0] == "r,f_max,f_min,nmax1,nmax2,nmax3,nmin1,nmin2,nmin3");
  // Row 60 is r = 0.3: f_max = 6, f_min = -18.
  double r, fmax, fmin;
  REQUIRE(std::sscanf(lines[60].c_str(), "%lf,%lf,%lf", &r, &fmax, &fmin) == 3);
  CHECK(r == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(fmax == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(fmin == doctest::Approx(-18.0).epsilon(1e-12));
}

TEST_CASE("identical invocations are byte identical") {
  const fs::path model = write_model("fig1_det.json", kFig1Projected);
  const fs::path csv = work_dir() / "det.csv";
  const std::string cmd =
      "envelope --model " + model.string() + " --grid 64 --out " + csv.string();
  const RunResult a = run_cli(cmd);
  const std::string csv_a = slurp(csv);
  const RunResult b = run_cli(cmd);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(csv_a == slurp(csv));
}

TEST_CASE("project output re-ingested as a projected model reproduces the curve") {
  const fs::path model = write_model("sigma_minus_rt.json", kSigmaMinusOps);
  const RunResult projected = run_cli("project --model " + model.string());
  REQUIRE(projected.exit_code == 0);
  const json j = json::parse(projected.out);
  json remodel;
  remodel["projected"]["a"] = j["a"];
  remodel["projected"]["b"] = j["b"];
  const fs::path model2 = write_model("sigma_minus_projected.json", remodel.dump());

  const fs::path csv1 = work_dir() / "rt1.csv";
  const fs::path csv2 = work_dir() / "rt2.csv";
  REQUIRE(run_cli("envelope --model " + model.string() + " --grid 50 --out " +
                  csv1.string())
              .exit_code == 0);
  REQUIRE(run_cli("envelope --model " + model2.string() + " --grid 50 --out " +
                  csv2.string())
              .exit_code == 0);
  CHECK(slurp(csv1) == slurp(csv2));
}

TEST_CASE("classify") {
  SUBCASE("purifiable jump operator") {
    const fs::path model = write_model("cls.json", kSigmaMinusOps);
    const RunResult res = run_cli("classify --model " + model.string());
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.out);
    CHECK(j["purifiable"].get<bool>());
    CHECK(j["category"].get<std::string>() == "single-singular");
    CHECK(j["trap_radius_check"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("hermitian dephasing is not purifiable") {
    const fs::path model = write_model(
        "clsz.json", R"({"lindblad_ops": [[[[1,0],[0,0]],[[0,0],[-1,0]]]]})");
    const RunResult res = run_cli("classify --model " + model.string());
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.out);
    CHECK_FALSE(j["purifiable"].get<bool>());
  }
  SUBCASE("needs the operator form") {
    const fs::path model = write_model("clsp.json", kFig1Projected);
    CHECK(run_cli("classify --model " + model.string()).exit_code == 2);
  }
}

TEST_CASE("steer") {
  const fs::path model = write_model("steer_model.json", kFig1Projected);
  SUBCASE("inside the trap") {
    const fs::path csv = work_dir() / "steer.csv";
    const RunResult res = run_cli("steer --model " + model.string() +
                                  " --from 0.2 --to 0.55 --out " + csv.string());
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.out);
    CHECK(j["feasible"].get<bool>());
    CHECK(j["duration"].get<double>() > 0.0);

    const auto lines = csv_lines(slurp(csv));
    REQUIRE(lines.size() > 2);
    CHECK(lines[0] == "t,n1,n2,n3,r,u1,u2,u3");
    double prev_r = 0.0;
    bool monotone = true;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      double t, n1, n2, n3, r;
      REQUIRE(std::sscanf(lines[i].c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &n1, &n2, &n3,
                          &r) == 5);
      if (i > 1 && r < prev_r - 1e-9) monotone = false;
      prev_r = r;
    }
    CHECK(monotone);
    CHECK(prev_r == doctest::Approx(0.55).epsilon(1e-4));
  }
  SUBCASE("escape above the trap is infeasible") {
    const fs::path csv = work_dir() / "steer_bad.csv";
    const RunResult res = run_cli("steer --model " + model.string() +
                                  " --from 0.7 --to 0.8 --out " + csv.string());
    CHECK(res.exit_code == 3);
    const json j = json::parse(res.out);
    CHECK_FALSE(j["feasible"].get<bool>());
    CHECK(j["reason"].get<std::string>().find("trap radius") != std::string::npos);
  }
  SUBCASE("zero-length transfer") {
    const fs::path csv = work_dir() / "steer_zero.csv";
    const RunResult res = run_cli("steer --model " + model.string() +
                                  " --from 0.5 --to 0.5 --out " + csv.string());
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.out);
    CHECK(j["feasible"].get<bool>());
    CHECK(j["duration"].get<double>() == 0.0);
  }
  SUBCASE("decrease is allowed from outside the trap") {
    const fs::path csv = work_dir() / "steer_down.csv";
    const RunResult res = run_cli("steer --model " + model.string() +
                                  " --from 0.8 --to 0.3 --out " + csv.string());
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.out);
    CHECK(j["feasible"].get<bool>());
    const auto lines = csv_lines(slurp(csv));
    double t, n1, n2, n3, r;
    REQUIRE(std::sscanf(lines.back().c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &n1, &n2, &n3,
                        &r) == 5);
    CHECK(r == doctest::Approx(0.3).epsilon(1e-4));
  }
}

TEST_CASE("simulate") {
  SUBCASE("isotropic decay endpoint") {
    const fs::path model = write_model("iso.json", kIsotropic);
    const fs::path csv = work_dir() / "sim.csv";
    const RunResult res = run_cli("simulate --model " + model.string() +
                                  " --n0 0,0,1 --T 1 --out " + csv.string());
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.out);
    CHECK(j["final_r"].get<double>() == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
  }
  SUBCASE("zero model holds the state") {
    const fs::path model =
        write_model("zero.json", R"({"projected": {"a": [0,0,0], "b": [0,0,0]}})");
    const fs::path csv = work_dir() / "simz.csv";
    const RunResult res = run_cli("simulate --model " + model.string() +
                                  " --n0 0.3,0.1,-0.2 --T 2 --out " + csv.string());
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.out);
    CHECK(j["final_n"][0].get<double>() == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(j["final_n"][1].get<double>() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(j["final_n"][2].get<double>() == doctest::Approx(-0.2).epsilon(1e-12));
  }
  SUBCASE("ball violation exits 4") {
    const fs::path model =
        write_model("outward.json", R"({"projected": {"a": [0,0,0], "b": [0,0,2]}})");
    const fs::path csv = work_dir() / "simb.csv";
    const RunResult res = run_cli("simulate --model " + model.string() +
                                  " --n0 0,0,0.9 --T 1 --out " + csv.string());
    CHECK(res.exit_code == 4);
  }
  SUBCASE("drift note on stderr, silenced by --quiet") {
    const fs::path model = write_model(
        "drift.json",
        R"({"projected": {"a": [1,1,1], "b": [0,0,0]},
            "hamiltonian_drift": [[[1,0],[0,0]],[[0,0],[-1,0]]]})");
    const fs::path csv = work_dir() / "simd.csv";
    const RunResult loud = run_cli("simulate --model " + model.string() +
                                   " --n0 0,0,0.5 --T 0.1 --out " + csv.string());
    REQUIRE(loud.exit_code == 0);
    CHECK(loud.err.find("hamiltonian_drift discarded") != std::string::npos);
    const RunResult quiet = run_cli("simulate --quiet --model " + model.string() +
                                    " --n0 0,0,0.5 --T 0.1 --out " + csv.string());
    REQUIRE(quiet.exit_code == 0);
    CHECK(quiet.err.empty());
  }
  SUBCASE("controls file is honored") {
    const fs::path model = write_model("zero2.json",
                                       R"({"projected": {"a": [0,0,0], "b": [0,0,0]}})");
    // Constant control around z rotates the equatorial state.
    const fs::path controls = write_model("u.csv", "t,u1,u2,u3\n0,0,0,1\n10,0,0,1\n");
    const fs::path csv = work_dir() / "simc.csv";
    const RunResult res = run_cli("simulate --model " + model.string() +
                                  " --n0 1,0,0 --T 0.5 --dt 1e-4 --controls " +
                                  controls.string() + " --out " + csv.string());
    REQUIRE(res.exit_code == 0);
    const json j = json::parse(res.out);
    // Precession angle 2|u|T = 1 radian.
    CHECK(j["final_n"][0].get<double>() == doctest::Approx(std::cos(1.0)).epsilon(1e-8));
    CHECK(j["final_n"][1].get<double>() == doctest::Approx(std::sin(1.0)).epsilon(1e-8));
    CHECK(j["final_r"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("envelope oracle subsample is reported") {
  const fs::path model = write_model("fig1_oracle.json", kFig1Projected);
  const fs::path csv = work_dir() / "envo.csv";
  const RunResult res = run_cli("envelope --model " + model.string() +
                                " --grid 100 --oracle-check 3 --seed 7 --out " +
                                csv.string());
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["oracle_check"]["rows"].get<int>() == 3);
  CHECK(j["oracle_check"]["max_deviation"].get<double>() <= 1e-4);
}
