#include "blochctl/core_model.hpp"

#include <algorithm>
#include <cmath>

namespace blochctl {

namespace {

const std::array<const Mat2*, 3> kPauli{&kSigmaX, &kSigmaY, &kSigmaZ};

double scaled_tol(double base, double scale) { return base * std::max(1.0, scale); }

}  // namespace

LindbladOp make_lindblad_op(const Mat2& m) {
  const complexd half_trace = 0.5 * trace(m);
  Mat2 out = m;
  out(0, 0) -= half_trace;
  out(1, 1) -= half_trace;
  return LindbladOp{out};
}

C3 pauli_expand(const Mat2& m) {
  const double scale = frobenius_norm(m);
  if (std::abs(trace(m)) > 1e-10 * std::max(scale, 1e-300))
    throw NonTraceless("pauli_expand: matrix has a nonzero trace component");
  // c_j = tr(sigma_j m) / 2
  return C3{
      0.5 * (m(1, 0) + m(0, 1)),
      0.5 * complexd(0.0, 1.0) * (m(0, 1) - m(1, 0)),
      0.5 * (m(0, 0) - m(1, 1)),
  };
}

GksModel gks_from_lindblad(std::span<const LindbladOp> ops) {
  GksModel g;
  for (const LindbladOp& op : ops) {
    const C3 c = pauli_expand(op.entries);
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        g.a(j, k) += 2.0 * c[j] * std::conj(c[k]);
    g.source_ops.push_back(op);
  }
  return g;
}

void validate_gks(const GksModel& g) {
  const double scale = frobenius_norm(g.a);
  if (hermiticity_defect(g.a) > scaled_tol(1e-12, scale))
    throw NotPsd("gks matrix is not Hermitian");
  const Vec3 eig = hermitian_eigenvalues(g.a);
  if (eig[2] < -scaled_tol(1e-12, scale))
    throw NotPsd("gks matrix is not positive semidefinite");
}

ProjectedSystem project_to_six_params(const GksModel& g) {
  validate_gks(g);

  // Symmetric part (A + A^T)/2 of a Hermitian matrix is its entrywise real part.
  Mat3 sym;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) sym(i, j) = g.a(i, j).real();

  // b_l = sum_jk i a_jk eps_jkl, real for Hermitian a.
  const Vec3 b_pauli{-2.0 * g.a(1, 2).imag(), -2.0 * g.a(2, 0).imag(),
                     -2.0 * g.a(0, 1).imag()};

  const SymEig3 eig = eig_sym3(sym);
  ProjectedSystem p;
  p.a = eig.eigenvalues;
  p.frame = eig.frame;
  p.b = eig.frame * b_pauli;
  return p;
}

ProjectedSystem projected_from_params(const Vec3& a, const Vec3& b) {
  const double scale = std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a[i] > a[j]; });

  ProjectedSystem p;
  Mat3 frame;  // signed permutation mapping input axes to sorted axes
  for (std::size_t r = 0; r < 3; ++r) {
    p.a[r] = a[order[r]];
    p.b[r] = b[order[r]];
    frame(r, order[r]) = 1.0;
  }
  if (det(frame) < 0.0) {
    for (std::size_t k = 0; k < 3; ++k) frame(2, k) = -frame(2, k);
    p.b[2] = -p.b[2];
  }
  p.frame = frame;

  if (p.a[2] < -scaled_tol(1e-12, scale))
    throw NotPsd("projected system has a negative dissipation eigenvalue");
  if (!validate_inequality(p))
    throw NotPsd("projected system violates the six-parameter inequality");
  return p;
}

bool validate_inequality(const ProjectedSystem& p) {
  const double lhs = p.a[0] * p.b[0] * p.b[0] + p.a[1] * p.b[1] * p.b[1] +
                     p.a[2] * p.b[2] * p.b[2];
  const double rhs = 4.0 * p.a[0] * p.a[1] * p.a[2];
  const double scale = std::max({1.0, p.a[0], std::abs(p.b[0]), std::abs(p.b[1]),
                                 std::abs(p.b[2])});
  return lhs <= rhs + 1e-9 * scale * scale * scale;
}

BlochState make_bloch_state(const Vec3& n) {
  if (norm(n) > 1.0 + 1e-9)
    throw InvalidDensity("bloch vector lies outside the unit ball");
  return BlochState{n};
}

DensityMatrix make_density_matrix(const Mat2& rho) {
  const double scale = std::max(1.0, frobenius_norm(rho));
  if (std::abs(rho(0, 1) - std::conj(rho(1, 0))) > 1e-12 * scale ||
      std::abs(rho(0, 0).imag()) > 1e-12 * scale ||
      std::abs(rho(1, 1).imag()) > 1e-12 * scale)
    throw InvalidDensity("density matrix is not Hermitian");
  if (std::abs(trace(rho) - 1.0) > 1e-12 * scale)
    throw InvalidDensity("density matrix does not have unit trace");
  // Hermitian 2x2 eigenvalues: tr/2 +- sqrt((tr/2)^2 - det).
  const double half_tr = 0.5 * trace(rho).real();
  const double disc = half_tr * half_tr - det(rho).real();
  const double root = std::sqrt(std::max(0.0, disc));
  if (half_tr - root < -1e-12 * scale)
    throw InvalidDensity("density matrix has a negative eigenvalue");
  return DensityMatrix{rho};
}

BlochState bloch_from_density(const DensityMatrix& rho) {
  const Mat2& r = rho.entries;
  return BlochState{Vec3{2.0 * r(0, 1).real(), -2.0 * r(0, 1).imag(),
                         (r(0, 0) - r(1, 1)).real()}};
}

DensityMatrix density_from_bloch(const BlochState& state) {
  if (norm(state.n) > 1.0 + 1e-9)
    throw InvalidDensity("bloch vector lies outside the unit ball");
  const Vec3& n = state.n;
  Mat2 rho = 0.5 * Mat2::identity();
  rho += 0.5 * (n[0] * kSigmaX + n[1] * kSigmaY + n[2] * kSigmaZ);
  return DensityMatrix{rho};
}

Mat2 apply_lindblad_dissipator(std::span<const LindbladOp> ops, const Mat2& rho) {
  Mat2 out;
  for (const LindbladOp& op : ops) {
    const Mat2& l = op.entries;
    const Mat2 ld = adjoint(l);
    const Mat2 ldl = ld * l;
    out += l * rho * ld - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

Mat2 apply_gks_dissipator(const Mat3c& a, const Mat2& rho) {
  Mat2 out;
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k) {
      const complexd ajk = a(j, k);
      if (ajk == complexd(0.0)) continue;
      const Mat2& sj = *kPauli[j];
      const Mat2& sk = *kPauli[k];
      const Mat2 skj = sk * sj;
      out += 0.5 * ajk * (sj * rho * sk - 0.5 * (skj * rho + rho * skj));
    }
  return out;
}

}  // namespace blochctl
