#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blochctl/model_io.hpp"
#include "blochctl/steering.hpp"

namespace py = pybind11;

namespace {

using namespace blochctl;

using PyMat2 = std::vector<std::vector<complexd>>;
using PyVec3 = std::array<double, 3>;

Mat2 to_mat2(const PyMat2& rows) {
  if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
    throw py::value_error("expected a 2x2 matrix");
  return Mat2{rows[0][0], rows[0][1], rows[1][0], rows[1][1]};
}

std::vector<LindbladOp> to_ops(const std::vector<PyMat2>& mats) {
  std::vector<LindbladOp> ops;
  for (const PyMat2& m : mats) ops.push_back(make_lindblad_op(to_mat2(m)));
  return ops;
}

Vec3 to_vec3(const PyVec3& v) { return Vec3{v[0], v[1], v[2]}; }
PyVec3 from_vec3(const Vec3& v) { return {v[0], v[1], v[2]}; }

py::list from_mat3(const Mat3& m) {
  py::list rows;
  for (int i = 0; i < 3; ++i) {
    py::list row;
    for (int j = 0; j < 3; ++j) row.append(m(i, j));
    rows.append(row);
  }
  return rows;
}

py::dict envelope_point_dict(const EnvelopePoint& e) {
  py::dict d;
  d["f_max"] = e.f_max;
  d["f_min"] = e.f_min;
  d["argmax"] = from_vec3(e.argmax);
  d["argmin"] = from_vec3(e.argmin);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bloch-radius controllability analysis of dissipative two-level systems";

  py::class_<ProjectedSystem>(m, "ProjectedSystem")
      .def_property_readonly("a", [](const ProjectedSystem& p) { return from_vec3(p.a); })
      .def_property_readonly("b", [](const ProjectedSystem& p) { return from_vec3(p.b); })
      .def_property_readonly("frame", [](const ProjectedSystem& p) { return from_mat3(p.frame); })
      .def("__repr__", [](const ProjectedSystem& p) {
        return "ProjectedSystem(a=(" + std::to_string(p.a[0]) + ", " +
               std::to_string(p.a[1]) + ", " + std::to_string(p.a[2]) + "), b=(" +
               std::to_string(p.b[0]) + ", " + std::to_string(p.b[1]) + ", " +
               std::to_string(p.b[2]) + "))";
      });

  m.def("project_lindblad",
        [](const std::vector<PyMat2>& mats) {
          return project_to_six_params(gks_from_lindblad(to_ops(mats)));
        },
        py::arg("ops"),
        "Project a list of 2x2 jump operators onto the six-parameter form.");

  m.def("project_gks",
        [](const std::vector<std::vector<complexd>>& rows) {
          if (rows.size() != 3) throw py::value_error("expected a 3x3 matrix");
          Mat3c a;
          for (int i = 0; i < 3; ++i) {
            if (rows[i].size() != 3) throw py::value_error("expected a 3x3 matrix");
            for (int j = 0; j < 3; ++j) a(i, j) = rows[i][j];
          }
          return project_to_six_params(GksModel{a, {}});
        },
        py::arg("matrix"));

  m.def("projected_system",
        [](const PyVec3& a, const PyVec3& b) {
          return projected_from_params(to_vec3(a), to_vec3(b));
        },
        py::arg("a"), py::arg("b"));

  m.def("validate_inequality",
        [](const ProjectedSystem& p) { return validate_inequality(p); });

  m.def("radial_rate",
        [](double r, const PyVec3& n_hat, const ProjectedSystem& p) {
          return radial_rate(r, to_vec3(n_hat), p);
        },
        py::arg("r"), py::arg("n_hat"), py::arg("system"));

  m.def("bloch_rhs",
        [](const PyVec3& n, const PyVec3& u, const ProjectedSystem& p) {
          return from_vec3(bloch_rhs(to_vec3(n), to_vec3(u), p));
        },
        py::arg("n"), py::arg("u"), py::arg("system"));

  m.def("envelope_at",
        [](double r, const ProjectedSystem& p) {
          return envelope_point_dict(envelope_at(r, p));
        },
        py::arg("r"), py::arg("system"));

  m.def("envelope_curve",
        [](const ProjectedSystem& p, const std::vector<double>& grid) {
          const RateEnvelope env = envelope_curve(p, grid);
          py::dict d;
          d["r"] = env.r_grid;
          d["f_max"] = env.f_max;
          d["f_min"] = env.f_min;
          std::vector<PyVec3> amax, amin;
          for (const Vec3& v : env.argmax_dirs) amax.push_back(from_vec3(v));
          for (const Vec3& v : env.argmin_dirs) amin.push_back(from_vec3(v));
          d["argmax"] = amax;
          d["argmin"] = amin;
          return d;
        },
        py::arg("system"), py::arg("grid"));

  m.def("brute_force_envelope",
        [](double r, const ProjectedSystem& p, int count) {
          const BruteEnvelope b = brute_force_envelope(r, p, count);
          py::dict d;
          d["f_max"] = b.f_max;
          d["f_min"] = b.f_min;
          d["argmax"] = from_vec3(b.argmax);
          d["argmin"] = from_vec3(b.argmin);
          return d;
        },
        py::arg("r"), py::arg("system"), py::arg("count") = 1000000);

  m.def("trap_radius",
        [](const ProjectedSystem& p) {
          const TrapReport t = trap_radius(p);
          py::dict d;
          d["r_T"] = t.r_T;
          d["trap_exists"] = t.trap_exists;
          d["method"] = t.method == TrapMethod::Analytic ? "analytic" : "bisection";
          d["residual"] = t.residual;
          return d;
        },
        py::arg("system"));

  m.def("reachable",
        [](double r_i, double r_f, const ProjectedSystem& p) {
          return reachable(r_i, r_f, p);
        },
        py::arg("r_i"), py::arg("r_f"), py::arg("system"));

  m.def("pure_state_rate",
        [](const std::vector<PyMat2>& mats, const std::vector<complexd>& psi) {
          if (psi.size() != 2) throw py::value_error("expected a 2-component state");
          return pure_state_rate(to_ops(mats), C2{psi[0], psi[1]});
        },
        py::arg("ops"), py::arg("psi_plus"));

  m.def("common_eigenvector",
        [](const std::vector<PyMat2>& mats) -> py::object {
          const auto v = common_eigenvector(to_ops(mats));
          if (!v) return py::none();
          return py::make_tuple((*v)[0], (*v)[1]);
        },
        py::arg("ops"));

  m.def("classify",
        [](const std::vector<PyMat2>& mats) {
          const PurifiabilityVerdict v = classify_purifiable(to_ops(mats));
          py::dict d;
          d["purifiable"] = v.purifiable;
          d["category"] = to_string(v.category);
          d["shared_eigenvector"] =
              v.shared_eigenvector
                  ? py::object(py::make_tuple((*v.shared_eigenvector)[0],
                                              (*v.shared_eigenvector)[1]))
                  : py::object(py::none());
          d["reason"] = v.reason;
          d["trap_radius_check"] = v.trap_radius_check;
          return d;
        },
        py::arg("ops"));

  m.def("eigenpair",
        [](const PyVec3& n) {
          const EigenPair e = eigenpair(BlochState{to_vec3(n)});
          py::dict d;
          d["lambda_plus"] = e.lambda_plus;
          d["lambda_minus"] = e.lambda_minus;
          d["psi_plus"] = py::make_tuple(e.psi_plus[0], e.psi_plus[1]);
          d["psi_minus"] = py::make_tuple(e.psi_minus[0], e.psi_minus[1]);
          return d;
        },
        py::arg("n"));

  m.def("integrate_bloch",
        [](const PyVec3& n0, py::object u, const ProjectedSystem& p, double T,
           double dt) {
          ControlFn fn = [](double) { return Vec3{}; };
          if (!u.is_none()) {
            if (py::isinstance<py::function>(u)) {
              auto pyfn = u.cast<py::function>();
              fn = [pyfn](double t) {
                return to_vec3(pyfn(t).cast<PyVec3>());
              };
            } else {
              const Vec3 constant = to_vec3(u.cast<PyVec3>());
              fn = [constant](double) { return constant; };
            }
          }
          const Trajectory traj =
              integrate_bloch(make_bloch_state(to_vec3(n0)), fn, p, T, dt);
          py::dict d;
          d["times"] = traj.times;
          std::vector<PyVec3> states, controls;
          for (const Vec3& v : traj.states) states.push_back(from_vec3(v));
          for (const Vec3& v : traj.controls) controls.push_back(from_vec3(v));
          d["states"] = states;
          d["controls"] = controls;
          return d;
        },
        py::arg("n0"), py::arg("u"), py::arg("system"), py::arg("T"),
        py::arg("dt") = 1e-4);

  m.def("steer",
        [](const ProjectedSystem& p, double r_i, double r_f, double dt) {
          SteerOptions opts;
          opts.dt = dt;
          const SteerResult res = steer(p, r_i, r_f, opts);
          py::dict d;
          d["feasible"] = res.feasible;
          d["duration"] = res.duration;
          d["max_control_norm"] = res.max_control_norm;
          d["r_T"] = res.trap;
          d["message"] = res.message;
          if (res.feasible) {
            std::vector<PyVec3> states;
            for (const Vec3& v : res.trajectory.states) states.push_back(from_vec3(v));
            d["times"] = res.trajectory.times;
            d["states"] = states;
          }
          return d;
        },
        py::arg("system"), py::arg("r_i"), py::arg("r_f"), py::arg("dt") = 1e-4);

  py::register_exception<NotPsd>(m, "NotPsdError");
  py::register_exception<NonTraceless>(m, "NonTracelessError");
  py::register_exception<InvalidDensity>(m, "InvalidDensityError");
  py::register_exception<EmptyModel>(m, "EmptyModelError");
  py::register_exception<BallViolation>(m, "BallViolationError");
}
