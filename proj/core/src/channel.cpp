#include "qkdlab/channel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>


namespace qkdlab {

namespace {

void check_fidelity(double fidelity) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0))
    throw std::invalid_argument("fidelity must lie in [0, 1], got " + std::to_string(fidelity));
}

}  // namespace

ErrorRate::ErrorRate(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw std::invalid_argument("error rate must lie in [0, 1], got " + std::to_string(value));
}

ChannelModel::ChannelModel(double fidelity) : fidelity_(fidelity) { check_fidelity(fidelity); }

ChannelModel ChannelModel::from_error_rate(ErrorRate epsilon) {
  return ChannelModel(fidelity_from_epsilon(epsilon));
}

ErrorRate ChannelModel::error_rate() const { return epsilon_from_fidelity(fidelity_); }

BellLabel ChannelModel::sample(Rng& rng) const { return sample_pair_label(fidelity_, rng); }

DensityMatrix werner_state(double fidelity) {
  check_fidelity(fidelity);
  const auto& bell = bell_matrix();
  CMatrix rho = fidelity * bell.col(0) * bell.col(0).adjoint();
  const double other = (1.0 - fidelity) / 3.0;
  for (int i = 1; i < 4; ++i) rho += other * bell.col(i) * bell.col(i).adjoint();
  return DensityMatrix(std::move(rho), pair_factorization(1));
}

double antiparallel_prob(double fidelity) {
  check_fidelity(fidelity);
  return (1.0 + 2.0 * fidelity) / 3.0;
}

ErrorRate epsilon_from_fidelity(double fidelity) {
  check_fidelity(fidelity);
  return ErrorRate(2.0 * (1.0 - fidelity) / 3.0);
}

double fidelity_from_epsilon(ErrorRate epsilon) {
  if (epsilon.value() > 2.0 / 3.0 + 1e-12)
    throw std::invalid_argument("no Werner fidelity has error rate above 2/3");
  return std::max(0.0, 1.0 - 1.5 * epsilon.value());
}

BellLabel sample_pair_label(double fidelity, Rng& rng) {
  check_fidelity(fidelity);
  const double u = rng.uniform();
  if (u < fidelity) return 0;
  // Remaining mass split evenly across the three non-singlet labels.
  const double rest = (u - fidelity) / (1.0 - fidelity);
  const auto label = static_cast<BellLabel>(1 + static_cast<int>(rest * 3.0));
  return label > 3 ? BellLabel{3} : label;
}

const Eigen::Matrix2cd& label_pauli(BellLabel label) {
  static const std::array<Eigen::Matrix2cd, 4> map = [] {
    const auto& p = pauli_matrices();
    return std::array<Eigen::Matrix2cd, 4>{p[0], p[3], p[2], p[1]};
  }();
  if (label > 3) throw std::invalid_argument("Bell label out of range");
  return map[label];
}

}  // namespace qkdlab
