#include "blochctl/linalg.hpp"

#include <algorithm>

namespace blochctl {

namespace {

// One Jacobi rotation zeroing a(p,q); accumulates the rotation into v (columns).
void jacobi_rotate(Mat3& a, Mat3& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  const double app = a(p, p);
  const double aqq = a(q, q);
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = akp - s * (akq + tau * akp);
    a(p, k) = a(k, p);
    a(k, q) = akq + s * (akp - tau * akq);
    a(q, k) = a(k, q);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = vkp - s * (vkq + tau * vkp);
    v(k, q) = vkq + s * (vkp - tau * vkq);
  }
}

double off_diag_norm(const Mat3& a) {
  return std::sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2));
}

}  // namespace

SymEig3 eig_sym3(const Mat3& s) {
  Mat3 a = s;
  // Work on the symmetrized copy so tiny asymmetries cannot leak through.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = m;
      a(j, i) = m;
    }

  Mat3 v = Mat3::identity();
  double scale = 0.0;
  for (double x : a.m) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) scale = 1.0;

  for (int sweep = 0; sweep < 64; ++sweep) {
    if (off_diag_norm(a) <= 1e-16 * scale) break;
    jacobi_rotate(a, v, 0, 1);
    jacobi_rotate(a, v, 0, 2);
    jacobi_rotate(a, v, 1, 2);
  }

  std::array<int, 3> order{0, 1, 2};
  const Vec3 d{a(0, 0), a(1, 1), a(2, 2)};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return d[i] > d[j]; });

  SymEig3 out;
  Mat3 frame;  // rows are eigenvectors
  for (std::size_t r = 0; r < 3; ++r) {
    const int col = order[r];
    out.eigenvalues[r] = d[col];
    for (std::size_t k = 0; k < 3; ++k) frame(r, k) = v(k, col);
  }

  // Sign canonicalization: largest-magnitude entry of each eigenvector positive
  // (first index wins ties).
  for (std::size_t r = 0; r < 3; ++r) {
    std::size_t imax = 0;
    for (std::size_t k = 1; k < 3; ++k)
      if (std::abs(frame(r, k)) > std::abs(frame(r, imax))) imax = k;
    if (frame(r, imax) < 0.0)
      for (std::size_t k = 0; k < 3; ++k) frame(r, k) = -frame(r, k);
  }
  if (det(frame) < 0.0)
    for (std::size_t k = 0; k < 3; ++k) frame(2, k) = -frame(2, k);

  out.frame = frame;
  return out;
}

Vec3 hermitian_eigenvalues(const Mat3c& h) {
  // Real symmetric embedding [[Re H, -Im H], [Im H, Re H]]: its spectrum is
  // that of H with every eigenvalue doubled. Jacobi keeps degenerate pairs
  // accurate to machine precision, unlike the closed-form cubic.
  constexpr int n = 6;
  std::array<double, n * n> a{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double re = 0.5 * (h(i, j).real() + h(j, i).real());
      const double im = 0.5 * (h(i, j).imag() - h(j, i).imag());
      a[i * n + j] = re;
      a[(i + 3) * n + (j + 3)] = re;
      a[i * n + (j + 3)] = -im;
      a[(i + 3) * n + j] = im;
    }

  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return {0.0, 0.0, 0.0};

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (std::sqrt(off) <= 1e-16 * scale) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        a[p * n + p] -= t * apq;
        a[q * n + q] += t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = akp - s * (akq + tau * akp);
          a[p * n + k] = a[k * n + p];
          a[k * n + q] = akq + s * (akp - tau * akq);
          a[q * n + k] = a[k * n + q];
        }
      }
  }

  std::array<double, n> diag;
  for (int i = 0; i < n; ++i) diag[i] = a[i * n + i];
  std::sort(diag.begin(), diag.end(), std::greater<double>());
  return {diag[0], diag[2], diag[4]};
}

}  // namespace blochctl
