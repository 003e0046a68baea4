#pragma once

// Spherically symmetric noisy pair channel: a Werner mixture of Bell states
// parameterized by its singlet fidelity F.

#include "qkdlab/qstate.hpp"
#include "qkdlab/rng.hpp"
#include "qkdlab/types.hpp"

namespace qkdlab {

/// Probability of a parallel outcome on a random common axis.
class ErrorRate {
 public:
  explicit ErrorRate(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

class ChannelModel {
 public:
  /// F must lie in [0, 1].
  explicit ChannelModel(double fidelity);

  static ChannelModel ideal() { return ChannelModel(1.0); }
  static ChannelModel from_error_rate(ErrorRate epsilon);

  double fidelity() const noexcept { return fidelity_; }
  ErrorRate error_rate() const;

  /// Bell label of one transmitted pair.
  BellLabel sample(Rng& rng) const;

 private:
  double fidelity_;
};

/// F |psi0><psi0| + (1-F)/3 sum_{i=1..3} |psi_i><psi_i|
DensityMatrix werner_state(double fidelity);

/// (1 + 2F) / 3
double antiparallel_prob(double fidelity);

/// epsilon = 2(1 - F)/3
ErrorRate epsilon_from_fidelity(double fidelity);

/// Inverse of epsilon_from_fidelity; rejects epsilon > 2/3, where F would be negative.
double fidelity_from_epsilon(ErrorRate epsilon);

/// Label 0 with probability F, each of 1..3 with probability (1-F)/3.
BellLabel sample_pair_label(double fidelity, Rng& rng);

/// Pauli that maps the singlet onto Bell state `label` when applied to Bob's
/// qubit (up to a global phase): identity, Z, Y, X for labels 0..3.
const Eigen::Matrix2cd& label_pauli(BellLabel label);

}  // namespace qkdlab
