#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "blochctl/dynamics.hpp"
#include "blochctl/extremal.hpp"
#include "test_support.hpp"

using namespace blochctl;
using namespace blochctl::testing;

namespace {

ProjectedSystem zero_system() { return ProjectedSystem{Vec3{}, Vec3{}, Mat3::identity()}; }

ProjectedSystem isotropic(double rate = 1.0) {
  return projected_from_params({rate, rate, rate}, {0, 0, 0});
}

}  // namespace

TEST_CASE("bloch_rhs canonical evaluations") {
  // At the center the velocity is b regardless of the controls.
  const ProjectedSystem f1 = fig1_system();
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec3 u{gauss(rng), gauss(rng), gauss(rng)};
    const Vec3 v = bloch_rhs(Vec3{}, u, f1);
    CHECK(norm(v - f1.b) <= 1e-15);
  }

  // Pure precession: a Hamiltonian along z turns x toward y at twice the
  // control amplitude.
  const Vec3 prec = bloch_rhs({1, 0, 0}, {0, 0, 1}, zero_system());
  CHECK(prec[0] == doctest::Approx(0.0));
  CHECK(prec[1] == doctest::Approx(2.0));
  CHECK(prec[2] == doctest::Approx(0.0));

  // Axial point of the first figure system.
  const Vec3 ax = bloch_rhs({0, 0, 0.3}, Vec3{}, f1);
  CHECK(norm(ax - Vec3{0, 0, 6.0}) <= 1e-12);
}

TEST_CASE("radial_rate canonical evaluations and validation") {
  CHECK(radial_rate(0.5, {0, 0, 1}, isotropic()) == doctest::Approx(-1.0));
  CHECK(radial_rate(0.5, normalized({1, 1, 1}), isotropic()) == doctest::Approx(-1.0));

  const ProjectedSystem f1 = fig1_system();
  CHECK(radial_rate(0.3, {0, 0, 1}, f1) == doctest::Approx(6.0));
  CHECK(radial_rate(0.3, {0, 0, -1}, f1) == doctest::Approx(-18.0));

  CHECK_THROWS_AS(radial_rate(0.3, {0, 0, 0.9}, f1), NotUnit);
  CHECK_THROWS_AS(radial_rate(0.0, {0, 0, 1}, f1), std::invalid_argument);
}

TEST_CASE("unit_rhs canonical evaluations, tangency, zero radius") {
  const Vec3 prec = unit_rhs({1, 0, 0}, 0.5, {0, 0, 1}, zero_system());
  CHECK(norm(prec - Vec3{0, 2, 0}) <= 1e-15);

  const ProjectedSystem f1 = fig1_system();
  CHECK(norm(unit_rhs({0, 0, 1}, 0.37, Vec3{}, f1)) <= 1e-12);

  ProjectedSystem bonly = zero_system();
  bonly.b = Vec3{0, 0, 12};
  const Vec3 transverse = unit_rhs({1, 0, 0}, 0.5, Vec3{}, bonly);
  CHECK(norm(transverse - Vec3{0, 0, 24}) <= 1e-12);

  CHECK_THROWS_AS(unit_rhs({1, 0, 0}, 0.0, Vec3{}, f1), ZeroRadius);

  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const ProjectedSystem p = random_system(rng);
    const Vec3 n = random_unit(rng);
    const Vec3 u{gauss(rng), gauss(rng), gauss(rng)};
    std::uniform_real_distribution<double> radius(0.05, 1.0);
    const Vec3 v = unit_rhs(n, radius(rng), u, p);
    CHECK(std::abs(dot(v, n)) <= 1e-10);
  }
}

TEST_CASE("radial rate is control independent and consistent with the splitting") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const ProjectedSystem p = random_system(rng);
    const Vec3 nh = random_unit(rng);
    std::uniform_real_distribution<double> radius(0.05, 1.0);
    const double r = radius(rng);
    const Vec3 u{gauss(rng), gauss(rng), gauss(rng)};
    const Vec3 n = r * nh;

    const double rr = radial_rate(r, nh, p);
    CHECK(std::abs(dot(nh, bloch_rhs(n, u, p)) - rr) <= 1e-10);

    // d(r n)/dt assembled from the split equations equals the full velocity.
    const Vec3 assembled = rr * nh + r * unit_rhs(nh, r, u, p);
    CHECK(norm(assembled - bloch_rhs(n, u, p)) <= 1e-10);
  }
}

TEST_CASE("eigenpair spectral data") {
  const EigenPair top = eigenpair(BlochState{{0, 0, 1}});
  CHECK(top.lambda_plus == doctest::Approx(1.0));
  CHECK(top.lambda_minus == doctest::Approx(0.0));
  CHECK(std::abs(top.psi_plus[0] - 1.0) <= 1e-12);
  CHECK(std::abs(top.psi_plus[1]) <= 1e-12);

  const EigenPair side = eigenpair(BlochState{{1, 0, 0}});
  CHECK(side.lambda_plus == doctest::Approx(1.0));
  CHECK(std::abs(side.psi_plus[0] - 1.0 / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(side.psi_plus[1] - 1.0 / std::sqrt(2.0)) <= 1e-12);

  // (0.6, 0, 0.8) is a unit vector: the top eigenvalue is 1.
  const EigenPair tilted = eigenpair(BlochState{{0.6, 0, 0.8}});
  CHECK(tilted.lambda_plus == doctest::Approx(1.0));
  // A genuinely mixed state at r = 0.8 has eigenvalue 0.9.
  const EigenPair mixed = eigenpair(BlochState{{0.48, 0, 0.64}});
  CHECK(mixed.lambda_plus == doctest::Approx(0.9));
  const Mat2 rho_mixed = density_from_bloch(make_bloch_state({0.48, 0, 0.64})).entries;
  const C2 rp_mixed = rho_mixed * mixed.psi_plus;
  CHECK(std::abs(rp_mixed[0] - 0.9 * mixed.psi_plus[0]) <= 1e-12);
  CHECK(std::abs(rp_mixed[1] - 0.9 * mixed.psi_plus[1]) <= 1e-12);

  CHECK_THROWS_AS(eigenpair(BlochState{{0, 0, 0}}), DegenerateState);

  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    Vec3 n = random_unit(rng);
    std::uniform_real_distribution<double> radius(1e-3, 1.0);
    n = radius(rng) * n;
    const EigenPair e = eigenpair(BlochState{n});
    const Mat2 rho = density_from_bloch(BlochState{n}).entries;

    const C2 rp = rho * e.psi_plus;
    const C2 rm = rho * e.psi_minus;
    CHECK(std::abs(rp[0] - e.lambda_plus * e.psi_plus[0]) <= 1e-12);
    CHECK(std::abs(rp[1] - e.lambda_plus * e.psi_plus[1]) <= 1e-12);
    CHECK(std::abs(rm[0] - e.lambda_minus * e.psi_minus[0]) <= 1e-12);
    CHECK(std::abs(rm[1] - e.lambda_minus * e.psi_minus[1]) <= 1e-12);
    CHECK(std::abs(inner(e.psi_plus, e.psi_minus)) <= 1e-12);
    CHECK(std::abs(norm(e.psi_plus) - 1.0) <= 1e-12);
  }
}

TEST_CASE("controls_for_path canonical synthesis") {
  const int samples = 21;
  PathSamples path;
  for (int i = 0; i < samples; ++i) {
    path.times.push_back(0.05 * i);
    path.dirs.push_back({0, 0, 1});
    path.radius.push_back(0.5);
  }

  SUBCASE("no dissipation, constant direction: nothing to counteract") {
    const ControlSchedule sched = controls_for_path(path, zero_system());
    for (const Vec3& u : sched.controls) CHECK(norm(u) <= 1e-12);
  }
  SUBCASE("axial direction of the first figure system") {
    const ControlSchedule sched = controls_for_path(path, fig1_system());
    for (const Vec3& u : sched.controls) CHECK(norm(u) <= 1e-12);
  }
  SUBCASE("equatorial hold requires a compensating drive") {
    PathSamples equator = path;
    for (Vec3& d : equator.dirs) d = Vec3{1, 0, 0};
    const ControlSchedule sched = controls_for_path(equator, fig1_system());
    for (const Vec3& u : sched.controls) CHECK(norm(u - Vec3{0, 12, 0}) <= 1e-12);
  }
  SUBCASE("radius floor is enforced") {
    PathSamples sunk = path;
    sunk.radius.back() = 1e-9;
    CHECK_THROWS_AS(controls_for_path(sunk, fig1_system()), RadiusUnderflow);
  }
}

TEST_CASE("integrate_bloch canonical runs") {
  const ControlFn zero_u = [](double) { return Vec3{}; };

  SUBCASE("no dynamics") {
    const Trajectory traj =
        integrate_bloch(make_bloch_state({0.3, -0.2, 0.5}), zero_u, zero_system(), 1.0, 1e-3);
    CHECK(norm(traj.states.back() - Vec3{0.3, -0.2, 0.5}) <= 1e-14);
  }
  SUBCASE("isotropic decay against the exact solution") {
    const Trajectory traj =
        integrate_bloch(make_bloch_state({0, 0, 1}), zero_u, isotropic(), 1.0, 1e-4);
    CHECK(norm(traj.states.back() - Vec3{0, 0, std::exp(-2.0)}) <= 1e-8);
  }
  SUBCASE("axial fixed point of the first figure system") {
    const Trajectory traj =
        integrate_bloch(make_bloch_state({0, 0, 0.3}), zero_u, fig1_system(), 2.0, 1e-4);
    // r(t) = 0.6 - 0.3 exp(-20 t), essentially converged by t = 2.
    CHECK(norm(traj.states.back() - Vec3{0, 0, 0.6}) <= 1e-9);
  }
  SUBCASE("ball violation is detected for an outward-driving model") {
    ProjectedSystem outward = zero_system();
    outward.b = Vec3{0, 0, 2};
    CHECK_THROWS_AS(
        integrate_bloch(make_bloch_state({0, 0, 0.9}), zero_u, outward, 1.0, 1e-3),
        BallViolation);
  }
}

TEST_CASE("integrate_radial canonical runs") {
  SUBCASE("axial policy matches the linear solution") {
    const DirectionPolicy up = [](double, double) { return Vec3{0, 0, 1}; };
    const RadialCurve curve = integrate_radial(0.3, up, fig1_system(), 1.0, 1e-4);
    CHECK_FALSE(curve.hit_floor);
    for (std::size_t i = 0; i < curve.times.size(); i += 500) {
      const double expected = 0.6 - 0.3 * std::exp(-20.0 * curve.times[i]);
      CHECK(std::abs(curve.radius[i] - expected) <= 1e-8);
    }
  }
  SUBCASE("isotropic decay is policy independent") {
    Rng rng(13);
    const DirectionPolicy wander = [&](double, double) { return random_unit(rng); };
    const RadialCurve curve = integrate_radial(0.8, wander, isotropic(), 1.0, 1e-3);
    CHECK(std::abs(curve.radius.back() - 0.8 * std::exp(-2.0)) <= 1e-8);
  }
  SUBCASE("floor stop") {
    const DirectionPolicy any = [](double, double) { return Vec3{0, 0, 1}; };
    const RadialCurve curve = integrate_radial(1e-3, any, isotropic(), 10.0, 1e-3);
    CHECK(curve.hit_floor);
    CHECK(curve.radius.back() >= 1e-6);
  }
  SUBCASE("extremal policy climbs to the trap radius and stalls") {
    const ProjectedSystem f2 = fig2_system();
    const double r_T = trap_radius(f2).r_T;
    const DirectionPolicy argmax_policy = [&](double, double r) {
      return envelope_at(std::clamp(r, 1e-12, 1.0), f2).argmax;
    };
    const RadialCurve curve = integrate_radial(0.5, argmax_policy, f2, 6.0, 1e-3);
    CHECK(curve.radius.back() == doctest::Approx(r_T).epsilon(1e-6));
    // Monotone climb.
    for (std::size_t i = 1; i < curve.radius.size(); ++i)
      CHECK(curve.radius[i] >= curve.radius[i - 1] - 1e-12);
  }
}

TEST_CASE("closed loop: synthesized controls reproduce the planned path") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    ProjectedSystem p = random_system(rng);
    while (norm(p.b) < 0.05) p = random_system(rng);
    const double r_T = trap_radius(p).r_T;
    const double r0 = std::clamp(0.5 * r_T, 0.02, 0.6);

    // Scale the rates so the radius wanders by at most half of r0 over T = 1.
    const double budget = norm(p.b) + 2.0 * (p.a[0] + p.a[1] + p.a[2]);
    const double s = 0.5 * r0 / budget;
    p.a = s * p.a;
    p.b = s * p.b;

    // Geodesic arc at a moderate angular rate.
    const Vec3 v0 = random_unit(rng);
    Vec3 v1 = random_unit(rng);
    v1 = normalized(v1 - dot(v0, v1) * v0);
    std::uniform_real_distribution<double> omega_dist(0.5, 2.0);
    const double omega = omega_dist(rng);
    const auto dir_at = [&](double t) {
      return std::cos(omega * t) * v0 + std::sin(omega * t) * v1;
    };

    const double T = 1.0, dt = 1e-4;
    const RadialCurve curve = integrate_radial(
        r0, [&](double t, double) { return dir_at(t); }, p, T, dt);
    REQUIRE_FALSE(curve.hit_floor);

    PathSamples plan;
    plan.times = curve.times;
    plan.radius = curve.radius;
    for (double t : curve.times) plan.dirs.push_back(dir_at(t));

    const ControlSchedule sched = controls_for_path(plan, p);
    const Trajectory traj = integrate_bloch(
        make_bloch_state(r0 * plan.dirs.front()),
        [&](double t) { return sched.control_at(t); }, p, T, dt);

    REQUIRE(traj.times.size() == plan.times.size());
    double max_dev = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
      max_dev = std::max(max_dev, norm(traj.states[i] - plan.radius[i] * plan.dirs[i]));
    CHECK(max_dev <= 1e-6);
  }
}

TEST_CASE("integrator endpoint error scales as dt^4") {
  // Scaled isotropic system keeps the errors above double rounding across
  // the whole dt range.
  const ProjectedSystem p = isotropic(10.0);
  const double T = 0.1;
  const Vec3 exact{0, 0, std::exp(-2.0)};
  std::vector<double> log_dt, log_err;
  for (double dt : {1e-2, 3.1622776601683794e-3, 1e-3, 3.1622776601683794e-4, 1e-4}) {
    const Trajectory traj = integrate_bloch(make_bloch_state({0, 0, 1}),
                                            [](double) { return Vec3{}; }, p, T, dt);
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(norm(traj.states.back() - exact)));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = log_dt.size();
  for (std::size_t i = 0; i < log_dt.size(); ++i) {
    sx += log_dt[i];
    sy += log_err[i];
    sxx += log_dt[i] * log_dt[i];
    sxy += log_dt[i] * log_err[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(4.0).epsilon(0.05));
}
