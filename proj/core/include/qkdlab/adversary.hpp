#pragma once

// Eavesdropping strategies and exact analysis of coherent attacks.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qkdlab/public_channel.hpp"
#include "qkdlab/qstate.hpp"
#include "qkdlab/rng.hpp"
#include "qkdlab/types.hpp"

namespace qkdlab {

inline constexpr std::size_t kMaxCoherentPairs = 6;
inline constexpr std::size_t kMaxAncillaDim = 16;

/// Joint state of N pairs and an ancilla, stored in the Bell-product basis:
///   sum a_{i1..iN, r} |psi_i1>...|psi_iN>|r>
/// with index ((i1*4 + i2)*4 + ...)*ancilla_dim + r.
class CoherentAttack {
 public:
  /// Rejects N > 6, ancilla_dim > 16, length mismatch, and any state whose
  /// squared norm is off by more than 1e-9. Never renormalizes.
  CoherentAttack(std::size_t n_pairs, std::size_t ancilla_dim, CVector bell_amplitudes);

  /// Tensor product of Bell labels with one ancilla state.
  static CoherentAttack product(std::span<const BellLabel> labels, const CVector& ancilla);

  std::size_t n_pairs() const noexcept { return n_pairs_; }
  std::size_t ancilla_dim() const noexcept { return ancilla_dim_; }
  const CVector& bell_amplitudes() const noexcept { return amplitudes_; }

  /// Computational-basis state over pair_factorization(N, ancilla_dim).
  QuantumState joint_state() const;

 private:
  std::size_t n_pairs_;
  std::size_t ancilla_dim_;
  CVector amplitudes_;
};

enum class InterceptPolicy : std::uint8_t { rectilinear, diagonal, random };

struct NoAttack {};

struct InterceptResendAttack {
  InterceptPolicy policy = InterceptPolicy::random;
};

struct SubstitutionAttack {
  double fraction = 0.0;
  /// Weights over Bell labels 0..3; label 0 must carry no weight.
  std::array<double, 4> label_weights{0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

using AttackSpec = std::variant<NoAttack, InterceptResendAttack, SubstitutionAttack, CoherentAttack>;

std::string attack_name(const AttackSpec& attack);

/// Hooks a session exposes to an eavesdropper. Transit hooks run while the
/// particles are in flight; they receive the public board, which carries no
/// basis information until Bob has acknowledged delivery.
class Eavesdropper {
 public:
  virtual ~Eavesdropper() = default;

  /// A coherent attacker prepares the whole N-pair source herself.
  virtual std::optional<CoherentAttack> joint_source() const { return std::nullopt; }

  /// May rewrite the Bell labels leaving the source.
  virtual void tamper_source(std::span<BellLabel> /*labels*/, Rng& /*rng*/) {}

  /// Acts on Bob's half of an EPR pair in transit.
  virtual void intercept_pair(std::size_t /*index*/, PairState& /*pair*/,
                              const PublicChannel& /*board*/, Rng& /*rng*/) {}

  /// Acts on a BB84 photon in transit.
  virtual void intercept_photon(std::size_t /*index*/, Photon& /*photon*/,
                                const PublicChannel& /*board*/, Rng& /*rng*/) {}
};

std::unique_ptr<Eavesdropper> make_eavesdropper(const AttackSpec& attack);

// ---------------------------------------------------------------------------
// Individual strategies

struct InterceptResult {
  Photon resent;
  Basis eve_basis;
  std::uint8_t eve_bit;
};

/// Eve measures the photon in a basis chosen by `policy` and resends the
/// eigenstate she observed.
InterceptResult intercept_resend(const Photon& photon, InterceptPolicy policy, Rng& rng);

class InterceptResendEavesdropper final : public Eavesdropper {
 public:
  explicit InterceptResendEavesdropper(InterceptPolicy policy) : policy_(policy) {}

  void intercept_pair(std::size_t index, PairState& pair, const PublicChannel& board,
                      Rng& rng) override;
  void intercept_photon(std::size_t index, Photon& photon, const PublicChannel& board,
                        Rng& rng) override;

  const std::vector<Basis>& bases() const noexcept { return bases_; }
  const BitString& recorded_bits() const noexcept { return bits_; }

 private:
  InterceptPolicy policy_;
  std::vector<Basis> bases_;
  BitString bits_;
};

/// round(a*N) uniformly chosen positions get a non-singlet label drawn from
/// `label_weights`; the rest stay singlets.
std::vector<BellLabel> substitute_pairs(std::size_t n, double fraction,
                                        const std::array<double, 4>& label_weights, Rng& rng);

/// In-place variant that substitutes into labels already drawn from a channel.
void substitute_pairs(std::span<BellLabel> labels, double fraction,
                      const std::array<double, 4>& label_weights, Rng& rng);

// ---------------------------------------------------------------------------
// Coherent attack analysis

/// Test pairs, their common measurement axes, and the tolerated error counts.
struct TestPlan {
  std::vector<std::size_t> indices;
  std::vector<MeasurementAxis> axes;
  AcceptanceRange accept = AcceptanceRange::strict();

  /// Rejects duplicate or out-of-range indices and axis count mismatches.
  void validate(std::size_t n_pairs) const;
};

/// Exact Born-rule probability that the plan's test passes.
double passing_probability(const CoherentAttack& attack, const TestPlan& plan);

struct AveragedPassing {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Passing probability averaged over uniformly random test sets of size m and
/// uniformly random common axes. Each sample is evaluated exactly.
AveragedPassing averaged_passing_probability(const CoherentAttack& attack, std::size_t m,
                                             AcceptanceRange accept, std::size_t samples,
                                             Rng& rng);

/// Ancilla state conditioned on the test passing. Throws std::domain_error
/// when the passing probability is zero.
DensityMatrix conditional_ancilla_state(const CoherentAttack& attack, const TestPlan& plan);

/// Holevo bound on Eve's information: S(rho_R) in bits.
double eve_info_bound(const DensityMatrix& rho_r);

struct TypicalitySplit {
  std::size_t threshold = 0;
  double typical_weight = 0.0;
  double atypical_weight = 0.0;
};

/// Weight on Bell-product vectors with >= T non-singlet slots (typical) and
/// fewer (atypical), with T = ceil(2 N epsilon).
TypicalitySplit typicality_split(std::size_t n_pairs, double epsilon, const QuantumState& joint_state);
TypicalitySplit typicality_split(const CoherentAttack& attack, std::size_t threshold);

// ---------------------------------------------------------------------------
// Text format: one amplitude per line, "<labels> <ancilla index> <re> <im>",
// e.g. "0102 3 0.5 0". Blank lines and '#' comments are ignored. An optional
// "ancilla_dim D" line fixes the ancilla dimension; otherwise it is one more
// than the largest index seen.

CoherentAttack parse_coherent_attack(std::istream& in);
CoherentAttack load_coherent_attack(const std::string& path);
void write_coherent_attack(std::ostream& out, const CoherentAttack& attack);

// ---------------------------------------------------------------------------
// Generalized no-cloning check on a single qubit coupled to an ancilla.
// Composite ordering is qubit (most significant) then ancilla.

struct InteractionOutcome {
  /// |<Phi1|Phi2>| for the normalized ancilla components along each signal.
  double ancilla_overlap = 0.0;
  /// Holevo quantity of the two ancilla states with equal priors, in bits.
  double information_bits = 0.0;
  /// max_i (1 - <u_i|rho_i|u_i>) over the two signals.
  double fidelity_deficit = 0.0;
};

InteractionOutcome evaluate_interaction(const Photon& u1, const Photon& u2, const CMatrix& unitary,
                                        const CVector& ancilla_init);

/// Haar-random unitary of the given dimension.
CMatrix random_unitary(std::size_t dim, Rng& rng);

/// Random unitary on qubit x ancilla that maps |x>|init> to |x>|Phi> for
/// every qubit state x, hence leaves both signals undisturbed.
CMatrix signal_preserving_unitary(const CVector& ancilla_init, Rng& rng);

}  // namespace qkdlab
