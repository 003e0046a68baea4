#include <cmath>
#include <stdexcept>

#include "qkdlab/adversary.hpp"

namespace qkdlab {

namespace {

CMatrix gaussian_matrix(std::size_t dim, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  CMatrix z(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = Complex(rng.normal(), rng.normal());
  return z;
}

// Q R with the phases of diag(R) moved into Q; Haar distributed when the
// input is complex Gaussian.
CMatrix orthonormalize(const CMatrix& z) {
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double magnitude = std::abs(r(j, j));
    if (magnitude > 0.0) q.col(j) *= r(j, j) / magnitude;
  }
  return q;
}

// Unitary whose first column is the unit vector v.
CMatrix basis_starting_with(const CVector& v, Rng& rng) {
  CMatrix z = gaussian_matrix(static_cast<std::size_t>(v.size()), rng);
  z.col(0) = v;
  CMatrix q = orthonormalize(z);
  const Complex phase = v.dot(q.col(0));  // q0 = phase * v
  q.col(0) /= phase;
  return q;
}

CMatrix ancilla_block(const CVector& composite, Eigen::Index ancilla_dim) {
  // rows: qubit index, cols: ancilla index
  CMatrix m(2, ancilla_dim);
  for (Eigen::Index q = 0; q < 2; ++q)
    for (Eigen::Index r = 0; r < ancilla_dim; ++r) m(q, r) = composite(q * ancilla_dim + r);
  return m;
}

double holevo_two(const CMatrix& rho1, const CMatrix& rho2) {
  const CMatrix average = (rho1 + rho2) / 2.0;
  return std::max(0.0, von_neumann_entropy(average) -
                           0.5 * (von_neumann_entropy(rho1) + von_neumann_entropy(rho2)));
}

}  // namespace

CMatrix random_unitary(std::size_t dim, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("random_unitary: dimension must be positive");
  return orthonormalize(gaussian_matrix(dim, rng));
}

CMatrix signal_preserving_unitary(const CVector& ancilla_init, Rng& rng) {
  const auto d = ancilla_init.size();
  if (d == 0 || std::abs(ancilla_init.squaredNorm() - 1.0) > kAlgebraTolerance)
    throw std::invalid_argument("ancilla initial state must be a unit vector");
  const CMatrix from = basis_starting_with(ancilla_init, rng);
  const CVector target = random_unitary(static_cast<std::size_t>(d), rng) * ancilla_init;
  const CMatrix to = basis_starting_with(target, rng);

  // In the coordinates q*d + k (k indexes the `from`/`to` bases) the span of
  // k = 0 maps to itself identically; the complement gets a random unitary.
  const Eigen::Index dim = 2 * d;
  CMatrix middle = CMatrix::Zero(dim, dim);
  middle(0, 0) = 1.0;
  middle(d, d) = 1.0;
  if (d > 1) {
    std::vector<Eigen::Index> rest;
    for (Eigen::Index q = 0; q < 2; ++q)
      for (Eigen::Index k = 1; k < d; ++k) rest.push_back(q * d + k);
    const CMatrix w = random_unitary(rest.size(), rng);
    for (std::size_t i = 0; i < rest.size(); ++i)
      for (std::size_t j = 0; j < rest.size(); ++j)
        middle(rest[i], rest[j]) = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  CMatrix lift_from = CMatrix::Zero(dim, dim), lift_to = CMatrix::Zero(dim, dim);
  lift_from.block(0, 0, d, d) = from;
  lift_from.block(d, d, d, d) = from;
  lift_to.block(0, 0, d, d) = to;
  lift_to.block(d, d, d, d) = to;
  return lift_to * middle * lift_from.adjoint();
}

InteractionOutcome evaluate_interaction(const Photon& u1, const Photon& u2, const CMatrix& unitary,
                                        const CVector& ancilla_init) {
  const auto d = ancilla_init.size();
  if (unitary.rows() != 2 * d || unitary.cols() != 2 * d)
    throw std::invalid_argument("interaction unitary must act on qubit x ancilla");
  if (std::abs(u1.squaredNorm() - 1.0) > kAlgebraTolerance ||
      std::abs(u2.squaredNorm() - 1.0) > kAlgebraTolerance)
    throw std::invalid_argument("signal states must be normalized");

  InteractionOutcome out;
  CMatrix ancilla_states[2];
  CVector phis[2];
  const Photon signals[2] = {u1, u2};
  for (int i = 0; i < 2; ++i) {
    CVector input(2 * d);
    input.head(d) = signals[i](0) * ancilla_init;
    input.tail(d) = signals[i](1) * ancilla_init;
    const CMatrix block = ancilla_block(unitary * input, d);
    const CMatrix rho_signal = block * block.adjoint();
    const double kept = (signals[i].adjoint() * rho_signal * signals[i])(0, 0).real();
    out.fidelity_deficit = std::max(out.fidelity_deficit, 1.0 - kept);
    ancilla_states[i] = block.transpose() * block.conjugate();
    phis[i] = block.transpose() * signals[i].conjugate();  // (<u_i| x 1) U |u_i>|init>
  }
  const double n1 = phis[0].norm(), n2 = phis[1].norm();
  out.ancilla_overlap = (n1 > 0.0 && n2 > 0.0) ? std::abs(phis[0].dot(phis[1])) / (n1 * n2) : 0.0;
  out.information_bits = holevo_two(ancilla_states[0], ancilla_states[1]);
  return out;
}

}  // namespace qkdlab
