#pragma once

// Closed-form information-theoretic quantities: binary entropy, binomial
// counting, the atypical-subspace dimension chain and capacity bounds.

#include <cstddef>
#include <optional>

#include <boost/multiprecision/cpp_int.hpp>

#include "qkdlab/rng.hpp"

namespace qkdlab {

using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(std::size_t n, std::size_t k);

/// log2 of a positive big integer; -inf for zero.
double log2_big(const BigInt& value);

/// H(x) in bits with 0 log 0 = 0. Rejects x outside [0, 1].
double binary_entropy(double x);

struct EntropyInequality {
  double lhs_log2 = 0.0;  // log2 C(N, r)
  double rhs = 0.0;       // N H(r/N)
  bool holds = false;     // decided exactly: C(N,r) r^r (N-r)^(N-r) <= N^N
};

EntropyInequality binomial_entropy_inequality(std::size_t n, std::size_t r);

/// ceil(2 N epsilon), with a 1e-9 guard against representation error.
std::size_t typicality_threshold(std::size_t n, double epsilon);

/// sum_{j<T} C(N, j) 3^j: Bell-product vectors with fewer than T non-singlet slots.
BigInt atypical_count_exact(std::size_t n, std::size_t threshold);

struct MuPolicy {
  /// Unset: mu = 3 log2(T^3) / N.
  std::optional<double> fixed;
};

/// Every line of the atypical-dimension chain. Lines L3..L5 are evaluated at
/// epsilon_eff = T / (2N), the error rate the integer threshold actually
/// encodes; L3 at the nominal epsilon is reported alongside.
struct BoundReport {
  std::size_t n = 0;
  double epsilon = 0.0;
  std::size_t threshold = 0;
  double epsilon_eff = 0.0;

  BigInt exact_atypical_count;
  BigInt l1;
  BigInt l2;
  double log2_exact = 0.0;
  double log2_l1 = 0.0;
  double log2_l2 = 0.0;
  double log2_l3 = 0.0;
  double log2_l3_nominal = 0.0;
  double log2_l4 = 0.0;
  double log2_l5 = 0.0;
  double mu = 0.0;
  double implied_k = 0.0;

  double kprime = 0.0;
  double capacity_lower_bound = 0.0;

  bool exact_le_l1 = false;
  bool l1_le_l2 = false;
  bool l2_le_l3 = false;
  bool l3_le_l4 = false;
  bool l4_le_l5 = false;

  bool ordered() const noexcept { return exact_le_l1 && l1_le_l2 && l2_le_l3 && l3_le_l4 && l4_le_l5; }
  /// N - log2 L5: how far the bound sits below 2^N, in bits.
  double margin_bits() const noexcept { return static_cast<double>(n) - log2_l5; }
};

/// Requires 0 < epsilon < 1/4, N epsilon >= 1/2 and T <= N/2; throws
/// RegimeError naming the parameter otherwise.
BoundReport atypical_dim_chain(std::size_t n, double epsilon, MuPolicy mu = {}, double kprime = 10.0);

/// log2 of the exact atypical dimension plus N theta.
double eve_info_upper(const BoundReport& report, double theta);

/// Same quantity without the chain's regime checks. T is at least 1, so the
/// all-singlet vector is always counted and epsilon = 0 gives N theta.
double eve_info_upper(std::size_t n, double epsilon, double theta);

/// max(0, 1 + k' epsilon log2 epsilon) for epsilon in [0, 1/4).
double secrecy_lower_bound(double epsilon, double kprime);

struct MixtureReport {
  double expected_rate = 0.0;  // a x + b y
  double observed_rate = 0.0;
  double sigma = 0.0;
  std::size_t positions = 0;
  std::size_t errors = 0;
  bool within_3sigma = false;
  /// Lower bound at the mixed rate and the a:b mix of the endpoint bounds;
  /// empty when a rate leaves the bound's domain.
  std::optional<double> bound_at_mixture;
  std::optional<double> mixed_bound;
};

/// Eve applies a channel of error rate x on a fraction a of the positions and
/// y on the rest; each pair is measured on a random common axis.
MixtureReport mixture_error_rate(double x, double y, double a, double b, std::size_t positions,
                                 Rng& rng, double kprime = 10.0);

}  // namespace qkdlab
