#include "qkdlab/adversary.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qkdlab/bounds.hpp"

namespace qkdlab {

namespace {

Basis choose_basis(InterceptPolicy policy, Rng& rng) {
  switch (policy) {
    case InterceptPolicy::rectilinear: return Basis::rectilinear;
    case InterceptPolicy::diagonal: return Basis::diagonal;
    case InterceptPolicy::random: break;
  }
  return rng.bernoulli(0.5) ? Basis::diagonal : Basis::rectilinear;
}

BellLabel draw_label(const std::array<double, 4>& weights, double total, Rng& rng) {
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (BellLabel label = 1; label < 4; ++label) {
    acc += weights[label];
    if (u < acc) return label;
  }
  for (BellLabel label = 3; label >= 1; --label)
    if (weights[label] > 0.0) return label;
  return 3;
}

double check_label_weights(const std::array<double, 4>& weights) {
  if (weights[0] != 0.0)
    throw std::invalid_argument("substitution weights must not include the singlet label");
  double total = 0.0;
  for (int i = 1; i < 4; ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("substitution weights must be non-negative");
    total += weights[i];
  }
  if (total <= 0.0) throw std::invalid_argument("substitution weights sum to zero");
  return total;
}

// In-place 2x2 unitary on the qubit whose index bit has value `stride`.
void rotate_qubit(CVector& v, std::size_t stride, const Eigen::Matrix2cd& u) {
  const auto size = static_cast<std::size_t>(v.size());
  for (std::size_t block = 0; block < size; block += 2 * stride) {
    for (std::size_t lo = 0; lo < stride; ++lo) {
      const auto i0 = static_cast<Eigen::Index>(block + lo);
      const auto i1 = static_cast<Eigen::Index>(block + lo + stride);
      const Complex a = v(i0), b = v(i1);
      v(i0) = u(0, 0) * a + u(0, 1) * b;
      v(i1) = u(1, 0) * a + u(1, 1) * b;
    }
  }
}

// Unitary whose rows are the up/down spinors: maps the axis eigenbasis to |0>,|1>.
Eigen::Matrix2cd eigenbasis_map(const MeasurementAxis& axis) {
  Eigen::Matrix2cd u;
  u.row(0) = axis.spinor(Spin::up).adjoint();
  u.row(1) = axis.spinor(Spin::down).adjoint();
  return u;
}

// Rotates every tested pair into its measurement eigenbasis and marks which
// particle basis indices correspond to a passing outcome string.
struct PassingBranches {
  CVector rotated;
  std::vector<char> passes;  // per particle index in [0, 4^N)
};

PassingBranches passing_branches(const CVector& computational, std::size_t n_pairs,
                                 std::size_t ancilla_dim, const TestPlan& plan) {
  PassingBranches out{computational, {}};
  const std::size_t qubits = 2 * n_pairs;
  for (std::size_t t = 0; t < plan.indices.size(); ++t) {
    const Eigen::Matrix2cd u = eigenbasis_map(plan.axes[t]);
    const std::size_t pair = plan.indices[t];
    rotate_qubit(out.rotated, (std::size_t{1} << (qubits - 1 - 2 * pair)) * ancilla_dim, u);
    rotate_qubit(out.rotated, (std::size_t{1} << (qubits - 2 - 2 * pair)) * ancilla_dim, u);
  }
  const std::size_t particle_dim = std::size_t{1} << qubits;
  out.passes.assign(particle_dim, 0);
  for (std::size_t p = 0; p < particle_dim; ++p) {
    std::int64_t errors = 0;
    for (auto pair : plan.indices) {
      const auto a = (p >> (qubits - 1 - 2 * pair)) & 1u;
      const auto b = (p >> (qubits - 2 - 2 * pair)) & 1u;
      errors += (a == b);
    }
    out.passes[p] = plan.accept.contains(errors) ? 1 : 0;
  }
  return out;
}

double passing_mass(const PassingBranches& branches, std::size_t ancilla_dim) {
  double total = 0.0;
  for (std::size_t p = 0; p < branches.passes.size(); ++p) {
    if (!branches.passes[p]) continue;
    total += branches.rotated.segment(static_cast<Eigen::Index>(p * ancilla_dim),
                                      static_cast<Eigen::Index>(ancilla_dim))
                 .squaredNorm();
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// CoherentAttack

CoherentAttack::CoherentAttack(std::size_t n_pairs, std::size_t ancilla_dim, CVector bell_amplitudes)
    : n_pairs_(n_pairs), ancilla_dim_(ancilla_dim), amplitudes_(std::move(bell_amplitudes)) {
  if (n_pairs == 0 || n_pairs > kMaxCoherentPairs)
    throw std::invalid_argument("coherent attack supports 1 to 6 pairs, got " + std::to_string(n_pairs));
  if (ancilla_dim == 0 || ancilla_dim > kMaxAncillaDim)
    throw std::invalid_argument("ancilla dimension must lie in [1, 16], got " + std::to_string(ancilla_dim));
  const std::size_t expected = (std::size_t{1} << (2 * n_pairs)) * ancilla_dim;
  if (static_cast<std::size_t>(amplitudes_.size()) != expected)
    throw std::invalid_argument("coherent attack amplitude count does not match 4^N * ancilla_dim");
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > kAlgebraTolerance)
    throw std::invalid_argument("coherent attack state is not normalized");
}

CoherentAttack CoherentAttack::product(std::span<const BellLabel> labels, const CVector& ancilla) {
  std::size_t index = 0;
  for (auto label : labels) {
    if (label > 3) throw std::invalid_argument("Bell label out of range");
    index = index * 4 + label;
  }
  const auto d = static_cast<std::size_t>(ancilla.size());
  CVector amps = CVector::Zero(static_cast<Eigen::Index>((std::size_t{1} << (2 * labels.size())) * d));
  amps.segment(static_cast<Eigen::Index>(index * d), static_cast<Eigen::Index>(d)) = ancilla;
  return CoherentAttack(labels.size(), d, std::move(amps));
}

QuantumState CoherentAttack::joint_state() const {
  return QuantumState::normalized(bell_to_computational(amplitudes_, n_pairs_, ancilla_dim_),
                                  pair_factorization(n_pairs_, ancilla_dim_));
}

std::string attack_name(const AttackSpec& attack) {
  struct Visitor {
    std::string operator()(const NoAttack&) const { return "none"; }
    std::string operator()(const InterceptResendAttack&) const { return "intercept-resend"; }
    std::string operator()(const SubstitutionAttack&) const { return "substitute"; }
    std::string operator()(const CoherentAttack&) const { return "coherent"; }
  };
  return std::visit(Visitor{}, attack);
}

// ---------------------------------------------------------------------------
// Strategies

InterceptResult intercept_resend(const Photon& photon, InterceptPolicy policy, Rng& rng) {
  const Basis basis = choose_basis(policy, rng);
  Photon state = photon;
  const Spin outcome = measure_photon(state, MeasurementAxis::for_basis(basis), rng);
  return {state, basis, static_cast<std::uint8_t>(outcome)};
}

void InterceptResendEavesdropper::intercept_pair(std::size_t, PairState& pair, const PublicChannel&,
                                                 Rng& rng) {
  const Basis basis = choose_basis(policy_, rng);
  const Spin outcome = measure_member(pair, 1, MeasurementAxis::for_basis(basis), rng);
  bases_.push_back(basis);
  bits_.push_back(static_cast<std::uint8_t>(outcome));
}

void InterceptResendEavesdropper::intercept_photon(std::size_t, Photon& photon, const PublicChannel&,
                                                   Rng& rng) {
  const InterceptResult result = intercept_resend(photon, policy_, rng);
  photon = result.resent;
  bases_.push_back(result.eve_basis);
  bits_.push_back(result.eve_bit);
}

namespace {

class SubstitutionEavesdropper final : public Eavesdropper {
 public:
  explicit SubstitutionEavesdropper(SubstitutionAttack spec) : spec_(spec) {}
  void tamper_source(std::span<BellLabel> labels, Rng& rng) override {
    substitute_pairs(labels, spec_.fraction, spec_.label_weights, rng);
  }

 private:
  SubstitutionAttack spec_;
};

class CoherentEavesdropper final : public Eavesdropper {
 public:
  explicit CoherentEavesdropper(CoherentAttack attack) : attack_(std::move(attack)) {}
  std::optional<CoherentAttack> joint_source() const override { return attack_; }

 private:
  CoherentAttack attack_;
};

class PassiveEavesdropper final : public Eavesdropper {};

}  // namespace

std::unique_ptr<Eavesdropper> make_eavesdropper(const AttackSpec& attack) {
  struct Visitor {
    std::unique_ptr<Eavesdropper> operator()(const NoAttack&) const {
      return std::make_unique<PassiveEavesdropper>();
    }
    std::unique_ptr<Eavesdropper> operator()(const InterceptResendAttack& a) const {
      return std::make_unique<InterceptResendEavesdropper>(a.policy);
    }
    std::unique_ptr<Eavesdropper> operator()(const SubstitutionAttack& a) const {
      check_label_weights(a.label_weights);
      if (!(a.fraction >= 0.0 && a.fraction <= 1.0))
        throw std::invalid_argument("substitution fraction must lie in [0, 1]");
      return std::make_unique<SubstitutionEavesdropper>(a);
    }
    std::unique_ptr<Eavesdropper> operator()(const CoherentAttack& a) const {
      return std::make_unique<CoherentEavesdropper>(a);
    }
  };
  return std::visit(Visitor{}, attack);
}

void substitute_pairs(std::span<BellLabel> labels, double fraction,
                      const std::array<double, 4>& label_weights, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::invalid_argument("substitution fraction must lie in [0, 1]");
  const double total = check_label_weights(label_weights);
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(labels.size())));
  for (auto position : random_subset(labels.size(), count, rng))
    labels[position] = draw_label(label_weights, total, rng);
}

std::vector<BellLabel> substitute_pairs(std::size_t n, double fraction,
                                        const std::array<double, 4>& label_weights, Rng& rng) {
  std::vector<BellLabel> labels(n, 0);
  substitute_pairs(labels, fraction, label_weights, rng);
  return labels;
}

// ---------------------------------------------------------------------------
// Coherent analysis

void TestPlan::validate(std::size_t n_pairs) const {
  if (indices.size() != axes.size()) throw std::invalid_argument("test plan: one axis per test pair");
  std::vector<char> seen(n_pairs, 0);
  for (auto index : indices) {
    if (index >= n_pairs) throw std::invalid_argument("test plan: index out of range");
    if (seen[index]) throw std::invalid_argument("test plan: duplicate index");
    seen[index] = 1;
  }
}

double passing_probability(const CoherentAttack& attack, const TestPlan& plan) {
  plan.validate(attack.n_pairs());
  const CVector v = bell_to_computational(attack.bell_amplitudes(), attack.n_pairs(), attack.ancilla_dim());
  return passing_mass(passing_branches(v, attack.n_pairs(), attack.ancilla_dim(), plan),
                      attack.ancilla_dim());
}

AveragedPassing averaged_passing_probability(const CoherentAttack& attack, std::size_t m,
                                             AcceptanceRange accept, std::size_t samples, Rng& rng) {
  if (m == 0 || m > attack.n_pairs()) throw std::invalid_argument("test size must lie in [1, N]");
  if (samples < 2) throw std::invalid_argument("need at least two samples for a standard error");
  const CVector v = bell_to_computational(attack.bell_amplitudes(), attack.n_pairs(), attack.ancilla_dim());
  double sum = 0.0, sum_sq = 0.0;
  TestPlan plan;
  plan.accept = accept;
  for (std::size_t s = 0; s < samples; ++s) {
    plan.indices = random_subset(attack.n_pairs(), m, rng);
    plan.axes.clear();
    for (std::size_t t = 0; t < m; ++t) plan.axes.push_back(MeasurementAxis::random(rng));
    const double p = passing_mass(passing_branches(v, attack.n_pairs(), attack.ancilla_dim(), plan),
                                  attack.ancilla_dim());
    sum += p;
    sum_sq += p * p;
  }
  const auto n = static_cast<double>(samples);
  AveragedPassing out;
  out.samples = samples;
  out.mean = sum / n;
  const double variance = std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0));
  out.standard_error = std::sqrt(variance / n);
  return out;
}

DensityMatrix conditional_ancilla_state(const CoherentAttack& attack, const TestPlan& plan) {
  plan.validate(attack.n_pairs());
  const std::size_t d = attack.ancilla_dim();
  const CVector v = bell_to_computational(attack.bell_amplitudes(), attack.n_pairs(), d);
  const auto branches = passing_branches(v, attack.n_pairs(), d, plan);
  const auto di = static_cast<Eigen::Index>(d);
  CMatrix rho = CMatrix::Zero(di, di);
  double total = 0.0;
  for (std::size_t p = 0; p < branches.passes.size(); ++p) {
    if (!branches.passes[p]) continue;
    const auto segment = branches.rotated.segment(static_cast<Eigen::Index>(p * d), di);
    rho.noalias() += segment * segment.adjoint();
    total += segment.squaredNorm();
  }
  if (total < 1e-15) throw std::domain_error("passing probability is zero; no conditional state");
  rho /= total;
  rho = (rho + rho.adjoint()) / 2.0;
  return DensityMatrix(std::move(rho), Factorization{{"R", d}});
}

double eve_info_bound(const DensityMatrix& rho_r) { return von_neumann_entropy(rho_r); }

TypicalitySplit typicality_split(const CoherentAttack& attack, std::size_t threshold) {
  TypicalitySplit split;
  split.threshold = threshold;
  const std::size_t d = attack.ancilla_dim();
  const std::size_t labels = std::size_t{1} << (2 * attack.n_pairs());
  for (std::size_t i = 0; i < labels; ++i) {
    const double w = attack.bell_amplitudes()
                         .segment(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(d))
                         .squaredNorm();
    (non_singlet_count(i, attack.n_pairs()) >= threshold ? split.typical_weight : split.atypical_weight) += w;
  }
  return split;
}

TypicalitySplit typicality_split(std::size_t n_pairs, double epsilon, const QuantumState& joint_state) {
  if (n_pairs == 0 || n_pairs > kMaxCoherentPairs)
    throw std::invalid_argument("typicality split supports 1 to 6 pairs");
  const std::size_t particle_dim = std::size_t{1} << (2 * n_pairs);
  if (joint_state.dim() > kMaxJointDimension) throw std::invalid_argument("joint state exceeds dimension cap");
  if (joint_state.dim() % particle_dim != 0)
    throw std::invalid_argument("joint state does not factor as N pairs times an ancilla");
  for (std::size_t q = 0; q < 2 * n_pairs; ++q)
    if (q >= joint_state.factorization().size() || joint_state.factorization()[q].dim != 2)
      throw std::invalid_argument("the first 2N subsystems must be qubits");
  const std::size_t d = joint_state.dim() / particle_dim;
  CoherentAttack attack(n_pairs, d, computational_to_bell(joint_state.amplitudes(), n_pairs, d));
  return typicality_split(attack, typicality_threshold(n_pairs, epsilon));
}

}  // namespace qkdlab
