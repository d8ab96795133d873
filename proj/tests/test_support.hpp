#pragma once

// Shared generators and reference fixtures for the test suites.

#include <cmath>
#include <random>
#include <vector>

#include "blochctl/analysis.hpp"
#include "blochctl/core_model.hpp"

namespace blochctl::testing {

using Rng = std::mt19937_64;

inline double gauss(Rng& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(rng);
}

inline complexd cgauss(Rng& rng) { return {gauss(rng), gauss(rng)}; }

inline Mat2 random_mat2(Rng& rng) {
  return Mat2{cgauss(rng), cgauss(rng), cgauss(rng), cgauss(rng)};
}

inline std::vector<LindbladOp> random_ops(Rng& rng, int count) {
  std::vector<LindbladOp> ops;
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    ops.push_back(make_lindblad_op(random_mat2(rng)));
    const double n = frobenius_norm(ops.back().entries);
    total += n * n;
  }
  const double s = 1.0 / std::sqrt(std::max(total, 1e-12));
  for (LindbladOp& op : ops) op.entries = s * op.entries;
  return ops;
}

/// Random positive-semidefinite coefficient matrix B B^dagger.
inline GksModel random_gks(Rng& rng) {
  Mat3c b;
  for (std::size_t i = 0; i < 9; ++i) b.m[i] = cgauss(rng);
  GksModel g;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        g.a(i, j) += b(i, k) * std::conj(b(j, k));
  return g;
}

/// Random realizable projected system, normalized so a1 + |b| = 1.
inline ProjectedSystem random_system(Rng& rng) {
  ProjectedSystem p = project_to_six_params(random_gks(rng));
  const double s = 1.0 / (p.a[0] + norm(p.b));
  p.a = s * p.a;
  p.b = s * p.b;
  return p;
}

/// Random real-symmetric (b = 0) positive-semidefinite system.
inline ProjectedSystem random_symmetric_system(Rng& rng) {
  Mat3 g;
  for (std::size_t i = 0; i < 9; ++i) g.m[i] = gauss(rng);
  GksModel model;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += g(i, k) * g(j, k);
      model.a(i, j) = s;
    }
  ProjectedSystem p = project_to_six_params(model);
  const double s = 1.0 / std::max(p.a[0], 1e-12);
  p.a = s * p.a;
  return p;
}

inline Vec3 random_unit(Rng& rng) {
  Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
  return v / norm(v);
}

inline C2 random_state(Rng& rng) {
  C2 v{cgauss(rng), cgauss(rng)};
  const double n = norm(v);
  return {v[0] / n, v[1] / n};
}

// Figure fixtures.
inline ProjectedSystem fig1_system() {
  return projected_from_params(Vec3{10.0, 10.0, 0.0}, Vec3{0.0, 0.0, 12.0});
}
inline ProjectedSystem fig2_system() {
  return projected_from_params(Vec3{10.0, 5.0, 0.3},
                               Vec3{0.15 * std::sqrt(0.6), 0.9, 3.0 * std::sqrt(6.0)});
}

inline Mat2 outer(const C2& x, const C2& y) {
  return Mat2{x[0] * std::conj(y[0]), x[0] * std::conj(y[1]),
              x[1] * std::conj(y[0]), x[1] * std::conj(y[1])};
}

inline C2 orthogonal_state(const C2& v) {
  return {-std::conj(v[1]), std::conj(v[0])};
}

}  // namespace blochctl::testing
