#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace blochctl {

using complexd = std::complex<double>;

// ------------------------------------------------------------------ Vec3

struct Vec3 {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  Vec3() = default;
  Vec3(double x, double y, double z) : c{x, y, z} {}

  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 operator*(const Vec3& a, double s) { return s * a; }
inline Vec3 operator/(const Vec3& a, double s) { return {a[0] / s, a[1] / s, a[2] / s}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a = a + b; return a; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1],
          a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm_inf(const Vec3& a) {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}
inline Vec3 normalized(const Vec3& a) { return a / norm(a); }

// Lexicographic (n1, n2, n3) order, used for deterministic tie-breaking.
inline bool lex_less(const Vec3& a, const Vec3& b) {
  for (int i = 0; i < 3; ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// ------------------------------------------------------------------ Mat3 (real, row-major)

struct Mat3 {
  std::array<double, 9> m{};

  double& operator()(std::size_t i, std::size_t j) { return m[3 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const { return m[3 * i + j]; }

  static Mat3 identity() {
    Mat3 r;
    r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
    return r;
  }
};

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
  Vec3 r;
  for (std::size_t i = 0; i < 3; ++i)
    r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
  return r;
}

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) r(i, j) += a(i, k) * b(k, j);
  return r;
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

inline double det(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

// ------------------------------------------------------------------ complex 2-vectors and 2x2 matrices

using C2 = std::array<complexd, 2>;

inline complexd inner(const C2& a, const C2& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}
inline double norm(const C2& a) { return std::sqrt(std::norm(a[0]) + std::norm(a[1])); }

struct Mat2 {
  std::array<complexd, 4> m{};

  Mat2() = default;
  Mat2(complexd a, complexd b, complexd c, complexd d) : m{a, b, c, d} {}

  complexd& operator()(std::size_t i, std::size_t j) { return m[2 * i + j]; }
  complexd operator()(std::size_t i, std::size_t j) const { return m[2 * i + j]; }

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (std::size_t i = 0; i < 4; ++i) r.m[i] = a.m[i] + b.m[i];
  return r;
}
inline Mat2 operator-(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (std::size_t i = 0; i < 4; ++i) r.m[i] = a.m[i] - b.m[i];
  return r;
}
inline Mat2 operator*(complexd s, const Mat2& a) {
  Mat2 r;
  for (std::size_t i = 0; i < 4; ++i) r.m[i] = s * a.m[i];
  return r;
}
inline Mat2 operator*(double s, const Mat2& a) { return complexd(s) * a; }
inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}
inline C2 operator*(const Mat2& a, const C2& v) {
  return {a(0, 0) * v[0] + a(0, 1) * v[1], a(1, 0) * v[0] + a(1, 1) * v[1]};
}
inline Mat2& operator+=(Mat2& a, const Mat2& b) { a = a + b; return a; }

inline Mat2 adjoint(const Mat2& a) {
  return {std::conj(a(0, 0)), std::conj(a(1, 0)), std::conj(a(0, 1)), std::conj(a(1, 1))};
}
inline complexd trace(const Mat2& a) { return a(0, 0) + a(1, 1); }
inline complexd det(const Mat2& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }
inline double frobenius_norm(const Mat2& a) {
  double s = 0.0;
  for (const auto& z : a.m) s += std::norm(z);
  return std::sqrt(s);
}
inline double max_abs(const Mat2& a) {
  double s = 0.0;
  for (const auto& z : a.m) s = std::max(s, std::abs(z));
  return s;
}

// ------------------------------------------------------------------ complex 3x3 matrices

struct Mat3c {
  std::array<complexd, 9> m{};

  complexd& operator()(std::size_t i, std::size_t j) { return m[3 * i + j]; }
  complexd operator()(std::size_t i, std::size_t j) const { return m[3 * i + j]; }
};

inline double frobenius_norm(const Mat3c& a) {
  double s = 0.0;
  for (const auto& z : a.m) s += std::norm(z);
  return std::sqrt(s);
}

/// Deviation from Hermitian symmetry, max over entries of |a_jk - conj(a_kj)|.
inline double hermiticity_defect(const Mat3c& a) {
  double d = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
  return d;
}

// ------------------------------------------------------------------ eigensolvers

/// Eigendecomposition of a real symmetric 3x3 matrix (cyclic Jacobi).
/// Eigenvalues are sorted descending. `frame` maps input coordinates to the
/// eigenbasis (rows are the eigenvectors); it is orthogonal with det +1 and
/// each row is sign-fixed so its largest-magnitude entry is positive.
struct SymEig3 {
  Vec3 eigenvalues;
  Mat3 frame;
};
SymEig3 eig_sym3(const Mat3& s);

/// Eigenvalues of a complex Hermitian 3x3 matrix, sorted descending.
Vec3 hermitian_eigenvalues(const Mat3c& h);

}  // namespace blochctl
