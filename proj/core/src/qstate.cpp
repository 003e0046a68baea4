#include "qkdlab/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qkdlab {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI{0.0, 1.0};

std::vector<std::size_t> dims_of(const Factorization& factorization) {
  std::vector<std::size_t> dims;
  dims.reserve(factorization.size());
  for (const auto& s : factorization) dims.push_back(s.dim);
  return dims;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Factorization concat(const Factorization& a, const Factorization& b) {
  Factorization out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Sorted, unique, in-range subsystem list.
std::vector<std::size_t> checked_keep(std::span<const std::size_t> keep, std::size_t count) {
  if (keep.empty()) throw std::invalid_argument("partial trace: keep set is empty");
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("partial trace: keep set has duplicates");
  if (sorted.back() >= count) throw std::invalid_argument("partial trace: subsystem out of range");
  return sorted;
}

// full_index[k * traced_dim + t] for kept index k and traced index t.
struct SplitIndex {
  std::size_t kept_dim = 1;
  std::size_t traced_dim = 1;
  std::vector<std::size_t> full_index;
};

SplitIndex split_index(const std::vector<std::size_t>& dims, const std::vector<std::size_t>& keep) {
  SplitIndex split;
  std::vector<bool> kept(dims.size(), false);
  for (auto k : keep) kept[k] = true;
  for (std::size_t s = 0; s < dims.size(); ++s) (kept[s] ? split.kept_dim : split.traced_dim) *= dims[s];

  const std::size_t total = split.kept_dim * split.traced_dim;
  split.full_index.assign(total, 0);
  std::vector<std::size_t> digits(dims.size(), 0);
  for (std::size_t full = 0; full < total; ++full) {
    std::size_t rem = full;
    for (std::size_t s = dims.size(); s-- > 0;) {
      digits[s] = rem % dims[s];
      rem /= dims[s];
    }
    std::size_t k = 0, t = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) {
      if (kept[s]) k = k * dims[s] + digits[s];
      else t = t * dims[s] + digits[s];
    }
    split.full_index[k * split.traced_dim + t] = full;
  }
  return split;
}

Factorization subset(const Factorization& f, const std::vector<std::size_t>& keep) {
  Factorization out;
  for (auto k : keep) out.push_back(f[k]);
  return out;
}

template <typename Vec>
std::size_t sample_index(const Vec& probabilities, Rng& rng) {
  const double total = probabilities.sum();
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_nonzero = static_cast<std::size_t>(i);
    acc += probabilities[i];
    if (u < acc) return last_nonzero;
  }
  return last_nonzero;
}

}  // namespace

std::size_t total_dimension(const Factorization& factorization) {
  std::size_t dim = 1;
  for (const auto& s : factorization) dim *= s.dim;
  return dim;
}

Factorization pair_factorization(std::size_t n_pairs, std::size_t ancilla_dim) {
  Factorization f;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    f.push_back({"A" + std::to_string(k), 2});
    f.push_back({"B" + std::to_string(k), 2});
  }
  if (ancilla_dim > 0) f.push_back({"R", ancilla_dim});
  return f;
}

// ---------------------------------------------------------------------------
// QuantumState / DensityMatrix

QuantumState::QuantumState(CVector amplitudes, Factorization factorization)
    : amplitudes_(std::move(amplitudes)), factorization_(std::move(factorization)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != total_dimension(factorization_))
    throw std::invalid_argument("state length does not match factorization");
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > kAlgebraTolerance)
    throw std::invalid_argument("state is not normalized");
}

QuantumState QuantumState::normalized(CVector amplitudes, Factorization factorization) {
  const double norm = amplitudes.norm();
  if (norm == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return QuantumState(amplitudes / norm, std::move(factorization));
}

Complex QuantumState::inner(const QuantumState& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("inner product: dimension mismatch");
  return amplitudes_.dot(other.amplitudes_);  // conjugates the left operand
}

QuantumState QuantumState::tensor(const QuantumState& other) const {
  return QuantumState(kron(amplitudes_, other.amplitudes_),
                      concat(factorization_, other.factorization_));
}

DensityMatrix QuantumState::density() const {
  return DensityMatrix(amplitudes_ * amplitudes_.adjoint(), factorization_);
}

DensityMatrix::DensityMatrix(CMatrix entries, Factorization factorization)
    : entries_(std::move(entries)), factorization_(std::move(factorization)) {
  if (entries_.rows() != entries_.cols()) throw std::invalid_argument("density matrix is not square");
  if (static_cast<std::size_t>(entries_.rows()) != total_dimension(factorization_))
    throw std::invalid_argument("density matrix size does not match factorization");
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTolerance)
    throw std::invalid_argument("density matrix is not Hermitian");
  const Complex trace = entries_.trace();
  if (std::abs(trace.real() - 1.0) > kAlgebraTolerance || std::abs(trace.imag()) > kAlgebraTolerance)
    throw std::invalid_argument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(entries_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kAlgebraTolerance)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::maximally_mixed(Factorization factorization) {
  const auto dim = static_cast<Eigen::Index>(total_dimension(factorization));
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim), std::move(factorization));
}

DensityMatrix DensityMatrix::tensor(const DensityMatrix& other) const {
  return DensityMatrix(kron(entries_, other.entries_), concat(factorization_, other.factorization_));
}

// ---------------------------------------------------------------------------
// Axes, projectors, rotations

MeasurementAxis::MeasurementAxis(double x, double y, double z) : x_(x), y_(y), z_(z) {
  if (std::abs(x * x + y * y + z * z - 1.0) > kAxisTolerance)
    throw std::invalid_argument("measurement axis is not a unit vector");
}

MeasurementAxis MeasurementAxis::random(Rng& rng) {
  for (;;) {
    const double x = rng.normal(), y = rng.normal(), z = rng.normal();
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (norm > 1e-8) return {x / norm, y / norm, z / norm};
  }
}

Photon MeasurementAxis::spinor(Spin spin) const {
  Photon up;
  const double a = std::sqrt(std::max(0.0, (1.0 + z_) / 2.0));
  if (a > 1e-12) up << a, Complex(x_, y_) / (2.0 * a);
  else up << 0.0, 1.0;
  up.normalize();
  if (spin == Spin::up) return up;
  Photon down;
  down << -std::conj(up(1)), std::conj(up(0));
  return down;
}

const std::array<Eigen::Matrix2cd, 4>& pauli_matrices() {
  static const std::array<Eigen::Matrix2cd, 4> paulis = [] {
    std::array<Eigen::Matrix2cd, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -kI, kI, 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return paulis;
}

SpinProjectors spin_projectors(const MeasurementAxis& axis) {
  const auto& p = pauli_matrices();
  const Eigen::Matrix2cd n_sigma = axis.x() * p[1] + axis.y() * p[2] + axis.z() * p[3];
  SpinProjectors out;
  out.up = (p[0] + n_sigma) / 2.0;
  out.down = (p[0] - n_sigma) / 2.0;
  return out;
}

Eigen::Matrix2cd rotation(const MeasurementAxis& axis, double angle) {
  const auto& p = pauli_matrices();
  const Eigen::Matrix2cd n_sigma = axis.x() * p[1] + axis.y() * p[2] + axis.z() * p[3];
  return std::cos(angle / 2.0) * p[0] - kI * std::sin(angle / 2.0) * n_sigma;
}

Eigen::Matrix2cd random_rotation(Rng& rng) {
  const auto& p = pauli_matrices();
  for (;;) {
    Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    const double norm = q.norm();
    if (norm < 1e-8) continue;
    q /= norm;
    return q(0) * p[0] - kI * (q(1) * p[1] + q(2) * p[2] + q(3) * p[3]);
  }
}

// ---------------------------------------------------------------------------
// Bell basis

const Eigen::Matrix4cd& bell_matrix() {
  static const Eigen::Matrix4cd bell = [] {
    Eigen::Matrix4cd b = Eigen::Matrix4cd::Zero();
    // rows: |00>, |01>, |10>, |11>
    b(1, 0) = kInvSqrt2;  b(2, 0) = -kInvSqrt2;
    b(1, 1) = kInvSqrt2;  b(2, 1) = kInvSqrt2;
    b(0, 2) = kInvSqrt2;  b(3, 2) = kInvSqrt2;
    b(0, 3) = kInvSqrt2;  b(3, 3) = -kInvSqrt2;
    return b;
  }();
  return bell;
}

PairState bell_pair(BellLabel label) {
  if (label > 3) throw std::invalid_argument("Bell label out of range");
  return bell_matrix().col(label);
}

std::array<QuantumState, 4> bell_basis() {
  const auto f = pair_factorization(1);
  return {QuantumState(bell_pair(0), f), QuantumState(bell_pair(1), f),
          QuantumState(bell_pair(2), f), QuantumState(bell_pair(3), f)};
}

double fidelity(const DensityMatrix& pair) {
  if (pair.dim() != 4) throw std::invalid_argument("fidelity: expected a 4x4 pair density matrix");
  const PairState singlet = bell_pair(0);
  return (singlet.adjoint() * pair.entries() * singlet)(0, 0).real();
}

// ---------------------------------------------------------------------------
// Local operations and measurement

CVector apply_local(const CVector& amplitudes, const std::vector<std::size_t>& dims,
                    std::size_t subsystem, const CMatrix& op) {
  if (subsystem >= dims.size()) throw std::invalid_argument("subsystem out of range");
  const std::size_t d = dims[subsystem];
  if (static_cast<std::size_t>(op.rows()) != d || static_cast<std::size_t>(op.cols()) != d)
    throw std::invalid_argument("operator dimension does not match subsystem");
  std::size_t stride = 1;
  for (std::size_t s = subsystem + 1; s < dims.size(); ++s) stride *= dims[s];
  const std::size_t outer = static_cast<std::size_t>(amplitudes.size()) / (d * stride);

  CVector out(amplitudes.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < stride; ++i) {
      const std::size_t base = o * d * stride + i;
      for (std::size_t r = 0; r < d; ++r) {
        Complex acc = 0.0;
        for (std::size_t k = 0; k < d; ++k)
          acc += op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) *
                 amplitudes(static_cast<Eigen::Index>(base + k * stride));
        out(static_cast<Eigen::Index>(base + r * stride)) = acc;
      }
    }
  }
  return out;
}

QuantumState apply_unitary(const QuantumState& state, std::size_t subsystem, const CMatrix& unitary) {
  return QuantumState::normalized(
      apply_local(state.amplitudes(), dims_of(state.factorization()), subsystem, unitary),
      state.factorization());
}

QuantumState rotate_pairs(const QuantumState& state, std::span<const Eigen::Matrix2cd> rotations) {
  const auto dims = dims_of(state.factorization());
  if (2 * rotations.size() > dims.size()) throw std::invalid_argument("more rotations than pairs");
  CVector v = state.amplitudes();
  for (std::size_t k = 0; k < rotations.size(); ++k) {
    v = apply_local(v, dims, 2 * k, rotations[k]);
    v = apply_local(v, dims, 2 * k + 1, rotations[k]);
  }
  return QuantumState::normalized(std::move(v), state.factorization());
}

PairMeasurement measure_pair(const QuantumState& state, PairSlot slot,
                             const MeasurementAxis& axis_a, const MeasurementAxis& axis_b,
                             Rng& rng) {
  const auto dims = dims_of(state.factorization());
  if (slot.alice >= dims.size() || slot.bob >= dims.size() || slot.alice == slot.bob ||
      dims[slot.alice] != 2 || dims[slot.bob] != 2)
    throw std::invalid_argument("pair slot does not name two distinct qubits");

  const auto pa = spin_projectors(axis_a);
  const auto pb = spin_projectors(axis_b);
  const CVector a_up = apply_local(state.amplitudes(), dims, slot.alice, pa.up);
  const CVector a_down = apply_local(state.amplitudes(), dims, slot.alice, pa.down);
  std::array<CVector, 4> branches = {
      apply_local(a_up, dims, slot.bob, pb.up), apply_local(a_up, dims, slot.bob, pb.down),
      apply_local(a_down, dims, slot.bob, pb.up), apply_local(a_down, dims, slot.bob, pb.down)};
  Eigen::Vector4d probabilities;
  for (int k = 0; k < 4; ++k) probabilities(k) = branches[k].squaredNorm();

  const std::size_t chosen = sample_index(probabilities, rng);
  if (probabilities(static_cast<Eigen::Index>(chosen)) <= 1e-300)
    throw std::logic_error("measure_pair: selected a zero-norm branch");
  return {chosen < 2 ? Spin::up : Spin::down, chosen % 2 == 0 ? Spin::up : Spin::down,
          QuantumState::normalized(std::move(branches[chosen]), state.factorization())};
}

PairOutcome measure_pair(PairState& pair, const MeasurementAxis& axis_a,
                         const MeasurementAxis& axis_b, Rng& rng) {
  const Photon a_spinors[2] = {axis_a.spinor(Spin::up), axis_a.spinor(Spin::down)};
  const Photon b_spinors[2] = {axis_b.spinor(Spin::up), axis_b.spinor(Spin::down)};
  Eigen::Vector4d probabilities;
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) {
      Complex amp = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          amp += std::conj(a_spinors[s](i)) * std::conj(b_spinors[t](j)) * pair(2 * i + j);
      probabilities(2 * s + t) = std::norm(amp);
    }
  const std::size_t chosen = sample_index(probabilities, rng);
  const int s = static_cast<int>(chosen / 2), t = static_cast<int>(chosen % 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) pair(2 * i + j) = a_spinors[s](i) * b_spinors[t](j);
  return {static_cast<Spin>(s), static_cast<Spin>(t)};
}

Spin measure_member(PairState& pair, int member, const MeasurementAxis& axis, Rng& rng) {
  if (member != 0 && member != 1) throw std::invalid_argument("pair member must be 0 or 1");
  const auto projectors = spin_projectors(axis);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix4cd up =
      member == 0 ? Eigen::Matrix4cd(kron(CMatrix(projectors.up), CMatrix(id))) : Eigen::Matrix4cd(kron(CMatrix(id), CMatrix(projectors.up)));
  PairState projected = up * pair;
  const double p_up = projected.squaredNorm();
  if (rng.uniform() < p_up) {
    pair = projected / std::sqrt(p_up);
    return Spin::up;
  }
  projected = pair - projected;
  pair = projected / projected.norm();
  return Spin::down;
}

Spin measure_photon(Photon& photon, const MeasurementAxis& axis, Rng& rng) {
  const Photon up = axis.spinor(Spin::up);
  const double p_up = std::norm(up.dot(photon));
  if (rng.uniform() < p_up) {
    photon = up;
    return Spin::up;
  }
  photon = axis.spinor(Spin::down);
  return Spin::down;
}

// ---------------------------------------------------------------------------
// Partial trace and entropy

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const auto kept = checked_keep(keep, rho.factorization().size());
  const auto split = split_index(dims_of(rho.factorization()), kept);
  const auto kd = static_cast<Eigen::Index>(split.kept_dim);
  CMatrix out = CMatrix::Zero(kd, kd);
  for (std::size_t k1 = 0; k1 < split.kept_dim; ++k1)
    for (std::size_t k2 = 0; k2 < split.kept_dim; ++k2) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < split.traced_dim; ++t)
        acc += rho.entries()(static_cast<Eigen::Index>(split.full_index[k1 * split.traced_dim + t]),
                             static_cast<Eigen::Index>(split.full_index[k2 * split.traced_dim + t]));
      out(static_cast<Eigen::Index>(k1), static_cast<Eigen::Index>(k2)) = acc;
    }
  return DensityMatrix(std::move(out), subset(rho.factorization(), kept));
}

DensityMatrix reduced_state(const QuantumState& state, std::span<const std::size_t> keep) {
  const auto kept = checked_keep(keep, state.factorization().size());
  const auto split = split_index(dims_of(state.factorization()), kept);
  CMatrix m(static_cast<Eigen::Index>(split.kept_dim), static_cast<Eigen::Index>(split.traced_dim));
  for (std::size_t k = 0; k < split.kept_dim; ++k)
    for (std::size_t t = 0; t < split.traced_dim; ++t)
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
          state.amplitudes()(static_cast<Eigen::Index>(split.full_index[k * split.traced_dim + t]));
  CMatrix rho = m * m.adjoint();
  rho = (rho + rho.adjoint()) / 2.0;
  return DensityMatrix(std::move(rho), subset(state.factorization(), kept));
}

double von_neumann_entropy(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda < -kEigenvalueTolerance)
      throw std::invalid_argument("entropy: eigenvalue below -1e-6, not a physical state");
    if (lambda > 0.0) entropy -= lambda * std::log2(lambda);
  }
  return std::max(0.0, entropy);
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.entries()); }

// ---------------------------------------------------------------------------
// Bell-product basis

CVector bell_to_computational(const CVector& bell_amplitudes, std::size_t n_pairs,
                              std::size_t tail_dim) {
  std::vector<std::size_t> dims(n_pairs, 4);
  dims.push_back(tail_dim);
  if (static_cast<std::size_t>(bell_amplitudes.size()) !=
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>()))
    throw std::invalid_argument("Bell-product vector length mismatch");
  CVector v = bell_amplitudes;
  const CMatrix b = bell_matrix();
  for (std::size_t k = 0; k < n_pairs; ++k) v = apply_local(v, dims, k, b);
  return v;
}

CVector computational_to_bell(const CVector& amplitudes, std::size_t n_pairs, std::size_t tail_dim) {
  std::vector<std::size_t> dims(n_pairs, 4);
  dims.push_back(tail_dim);
  if (static_cast<std::size_t>(amplitudes.size()) !=
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>()))
    throw std::invalid_argument("computational vector length mismatch");
  CVector v = amplitudes;
  const CMatrix b_inv = bell_matrix().adjoint();
  for (std::size_t k = 0; k < n_pairs; ++k) v = apply_local(v, dims, k, b_inv);
  return v;
}

std::size_t non_singlet_count(std::size_t label_index, std::size_t n_pairs) noexcept {
  std::size_t count = 0;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    if (label_index % 4 != 0) ++count;
    label_index /= 4;
  }
  return count;
}

}  // namespace qkdlab
