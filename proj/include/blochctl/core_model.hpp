#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "blochctl/linalg.hpp"

namespace blochctl {

// ------------------------------------------------------------------ errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonTraceless : Error { using Error::Error; };
struct NotPsd : Error { using Error::Error; };
struct InvalidDensity : Error { using Error::Error; };
struct NotUnit : Error { using Error::Error; };
struct ZeroRadius : Error { using Error::Error; };
struct DegenerateState : Error { using Error::Error; };
struct RadiusUnderflow : Error { using Error::Error; };
struct BallViolation : Error { using Error::Error; };
struct EmptyModel : Error { using Error::Error; };

// ------------------------------------------------------------------ Pauli basis

inline const Mat2 kSigmaX{0.0, 1.0, 1.0, 0.0};
inline const Mat2 kSigmaY{0.0, complexd(0.0, -1.0), complexd(0.0, 1.0), 0.0};
inline const Mat2 kSigmaZ{1.0, 0.0, 0.0, -1.0};
inline const Mat2 kSigmaMinus{0.0, 0.0, 1.0, 0.0};
inline const Mat2 kSigmaPlus{0.0, 1.0, 0.0, 0.0};

// ------------------------------------------------------------------ domain types

/// Traceless 2x2 jump operator (units rate^1/2). Construct with
/// make_lindblad_op, which removes any identity component.
struct LindbladOp {
  Mat2 entries;
};

LindbladOp make_lindblad_op(const Mat2& m);

/// Dissipator coefficient matrix over the Pauli axes, plus the operator list
/// it was built from (when known).
struct GksModel {
  Mat3c a;
  std::vector<LindbladOp> source_ops;
};

/// Throws NotPsd unless `a` is Hermitian and positive semidefinite
/// (tolerance 1e-12, scaled by the matrix norm above unit scale).
void validate_gks(const GksModel& g);

/// Six-parameter form of the radial dynamics: eigenvalues a1 >= a2 >= a3 of
/// the symmetric dissipation part, the axial vector b of the anti-symmetric
/// part, both in the intrinsic eigenframe. `frame` maps Pauli-axis
/// coordinates to intrinsic coordinates (rows are eigenvectors, det +1).
struct ProjectedSystem {
  Vec3 a;
  Vec3 b;
  Mat3 frame = Mat3::identity();
};

struct BlochState {
  Vec3 n;
};

struct DensityMatrix {
  Mat2 entries;
};

BlochState make_bloch_state(const Vec3& n);          // throws InvalidDensity if |n| > 1 + 1e-9
DensityMatrix make_density_matrix(const Mat2& rho);  // throws InvalidDensity

// ------------------------------------------------------------------ operations

using C3 = std::array<complexd, 3>;

/// Coefficients c with m = c_x sigma_x + c_y sigma_y + c_z sigma_z.
/// Throws NonTraceless if |tr m| > 1e-10 * ||m||.
C3 pauli_expand(const Mat2& m);

/// Coefficient matrix of the Pauli-basis dissipator equivalent to the given
/// jump-operator dissipators: a_jk = 2 sum_m c_j^(m) conj(c_k^(m)).
GksModel gks_from_lindblad(std::span<const LindbladOp> ops);

/// Eigendecomposition of the symmetric part plus the axial vector of the
/// anti-symmetric part, expressed in the intrinsic frame.
ProjectedSystem project_to_six_params(const GksModel& g);

/// Builds a ProjectedSystem from raw (a, b) parameters: sorts a descending
/// (permuting b alongside, frame = signed permutation with det +1) and
/// validates a3 >= -1e-12 and the six-parameter inequality.
ProjectedSystem projected_from_params(const Vec3& a, const Vec3& b);

/// a1 b1^2 + a2 b2^2 + a3 b3^2 <= 4 a1 a2 a3, within a scaled slack.
bool validate_inequality(const ProjectedSystem& p);

BlochState bloch_from_density(const DensityMatrix& rho);
DensityMatrix density_from_bloch(const BlochState& state);

/// Dissipator sum L rho L^dag - 1/2 {L^dag L, rho} over the operator list.
Mat2 apply_lindblad_dissipator(std::span<const LindbladOp> ops, const Mat2& rho);

/// Pauli-basis dissipator 1/2 sum_jk a_jk (sigma_j rho sigma_k - 1/2 {sigma_k sigma_j, rho}).
Mat2 apply_gks_dissipator(const Mat3c& a, const Mat2& rho);

}  // namespace blochctl
