#pragma once

// Small-dimension complex linear algebra for pair and ancilla states.
//
// Tensor ordering: the first subsystem of a factorization is the most
// significant digit of a basis index. Qubit basis |0> is spin up along z.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkdlab/rng.hpp"
#include "qkdlab/types.hpp"

namespace qkdlab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Photon = Eigen::Vector2cd;      // single qubit
using PairState = Eigen::Vector4cd;   // |alice bob>, index 2*a + b

inline constexpr double kAlgebraTolerance = 1e-9;
inline constexpr double kEigenvalueTolerance = 1e-6;
inline constexpr double kAxisTolerance = 1e-12;
/// Largest joint state vector handled exactly: 6 pairs and a 16-dim ancilla.
inline constexpr std::size_t kMaxJointDimension = std::size_t{1} << 16;

struct Subsystem {
  std::string label;
  std::size_t dim = 2;

  bool operator==(const Subsystem&) const = default;
};

using Factorization = std::vector<Subsystem>;

std::size_t total_dimension(const Factorization& factorization);

/// Qubits A0, B0, A1, B1, ... followed by an ancilla R when ancilla_dim > 0.
Factorization pair_factorization(std::size_t n_pairs, std::size_t ancilla_dim = 0);

class DensityMatrix;

/// Normalized pure state with a subsystem factorization.
class QuantumState {
 public:
  /// Rejects amplitudes whose squared norm differs from 1 by more than 1e-9,
  /// or whose length does not match the factorization.
  QuantumState(CVector amplitudes, Factorization factorization);

  /// Rescales to unit norm; rejects the zero vector.
  static QuantumState normalized(CVector amplitudes, Factorization factorization);

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  const Factorization& factorization() const noexcept { return factorization_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }

  /// <this|other>
  Complex inner(const QuantumState& other) const;
  QuantumState tensor(const QuantumState& other) const;
  DensityMatrix density() const;

 private:
  CVector amplitudes_;
  Factorization factorization_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  /// Rejects non-Hermitian (1e-9), non-unit-trace (1e-9), or
  /// eigenvalues below -1e-9.
  DensityMatrix(CMatrix entries, Factorization factorization);

  static DensityMatrix maximally_mixed(Factorization factorization);

  const CMatrix& entries() const noexcept { return entries_; }
  const Factorization& factorization() const noexcept { return factorization_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }

  DensityMatrix tensor(const DensityMatrix& other) const;

 private:
  CMatrix entries_;
  Factorization factorization_;
};

/// Unit vector on the Bloch sphere.
class MeasurementAxis {
 public:
  /// Rejects vectors whose squared norm differs from 1 by more than 1e-12.
  MeasurementAxis(double x, double y, double z);

  static MeasurementAxis x_axis() { return {1.0, 0.0, 0.0}; }
  static MeasurementAxis y_axis() { return {0.0, 1.0, 0.0}; }
  static MeasurementAxis z_axis() { return {0.0, 0.0, 1.0}; }
  static MeasurementAxis for_basis(Basis basis) {
    return basis == Basis::rectilinear ? z_axis() : x_axis();
  }
  /// Uniform on the sphere (normalized Gaussian triple).
  static MeasurementAxis random(Rng& rng);

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }

  /// Eigenvector of axis.sigma with eigenvalue +1 (up) or -1 (down).
  Photon spinor(Spin spin) const;

  bool operator==(const MeasurementAxis&) const = default;

 private:
  double x_, y_, z_;
};

struct SpinProjectors {
  Eigen::Matrix2cd up;
  Eigen::Matrix2cd down;
};

/// P_up = (I + axis.sigma)/2, P_down = I - P_up.
SpinProjectors spin_projectors(const MeasurementAxis& axis);

/// Pauli matrices; index 0 is the identity.
const std::array<Eigen::Matrix2cd, 4>& pauli_matrices();

/// exp(-i angle axis.sigma / 2)
Eigen::Matrix2cd rotation(const MeasurementAxis& axis, double angle);

/// Haar-random SU(2) element.
Eigen::Matrix2cd random_rotation(Rng& rng);

/// psi0 = (|01>-|10>)/sqrt2, psi1 = (|01>+|10>)/sqrt2,
/// psi2 = (|00>+|11>)/sqrt2, psi3 = (|00>-|11>)/sqrt2.
std::array<QuantumState, 4> bell_basis();

/// Columns are the Bell vectors in the computational basis.
const Eigen::Matrix4cd& bell_matrix();

PairState bell_pair(BellLabel label);

/// <psi0|M|psi0> for a two-qubit density matrix.
double fidelity(const DensityMatrix& pair);

/// Applies `op` (dim x dim of that subsystem) to one subsystem.
CVector apply_local(const CVector& amplitudes, const std::vector<std::size_t>& dims,
                    std::size_t subsystem, const CMatrix& op);
QuantumState apply_unitary(const QuantumState& state, std::size_t subsystem, const CMatrix& unitary);

/// Same rotation on both qubits of every pair slot (subsystems 2k, 2k+1).
QuantumState rotate_pairs(const QuantumState& state, std::span<const Eigen::Matrix2cd> rotations);

/// Which two subsystems hold the members of a pair.
struct PairSlot {
  std::size_t alice;
  std::size_t bob;

  static PairSlot of_pair(std::size_t pair_index) { return {2 * pair_index, 2 * pair_index + 1}; }
};

struct PairMeasurement {
  Spin outcome_a;
  Spin outcome_b;
  QuantumState post_state;
};

/// Born-rule sample of spin measurements on both members of a pair.
PairMeasurement measure_pair(const QuantumState& state, PairSlot slot,
                             const MeasurementAxis& axis_a, const MeasurementAxis& axis_b,
                             Rng& rng);

struct PairOutcome {
  Spin a;
  Spin b;
};

/// Fast path for an isolated pure pair; collapses `pair` to the product outcome.
PairOutcome measure_pair(PairState& pair, const MeasurementAxis& axis_a,
                         const MeasurementAxis& axis_b, Rng& rng);

/// Measures one member (0 = Alice, 1 = Bob) of an isolated pair and collapses it.
Spin measure_member(PairState& pair, int member, const MeasurementAxis& axis, Rng& rng);

Spin measure_photon(Photon& photon, const MeasurementAxis& axis, Rng& rng);

/// Keeps the listed subsystems in factorization order. Rejects an empty set.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// Reduced state of a pure state without forming the full density matrix.
DensityMatrix reduced_state(const QuantumState& state, std::span<const std::size_t> keep);

/// Entropy in bits. Eigenvalues in [-1e-6, 0) are treated as 0; anything
/// more negative is rejected as non-physical.
double von_neumann_entropy(const DensityMatrix& rho);
double von_neumann_entropy(const CMatrix& hermitian);

/// Bell-product layout: index = ((i_1*4 + i_2)*4 + ...)*tail_dim + r.
/// Computational layout follows pair_factorization.
CVector bell_to_computational(const CVector& bell_amplitudes, std::size_t n_pairs,
                              std::size_t tail_dim);
CVector computational_to_bell(const CVector& amplitudes, std::size_t n_pairs,
                              std::size_t tail_dim);

/// Number of non-singlet labels in a base-4 Bell-product index of n_pairs digits.
std::size_t non_singlet_count(std::size_t label_index, std::size_t n_pairs) noexcept;

}  // namespace qkdlab
