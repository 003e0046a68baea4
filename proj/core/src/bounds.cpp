#include "qkdlab/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qkdlab/channel.hpp"
#include "qkdlab/errors.hpp"
#include "qkdlab/qstate.hpp"

namespace qkdlab {

namespace {

constexpr double kLogTolerance = 1e-9;

bool log_le(double lhs, double rhs) { return lhs <= rhs + kLogTolerance * std::max(1.0, std::abs(rhs)); }

BigInt power(std::size_t base, std::size_t exponent) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

// Row n of Pascal's triangle truncated to k < limit.
std::vector<BigInt> pascal_row(std::size_t n, std::size_t limit) {
  std::vector<BigInt> row;
  row.reserve(limit);
  BigInt c = 1;
  for (std::size_t k = 0; k < limit && k <= n; ++k) {
    row.push_back(c);
    c = c * (n - k) / (k + 1);
  }
  return row;
}

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt c = 1;
  for (std::size_t j = 0; j < k; ++j) c = c * (n - j) / (j + 1);
  return c;
}

// GCC 11 misreports the limb copy inside cpp_int's right shift.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wstringop-overflow"
#pragma GCC diagnostic ignored "-Wstringop-overread"
#endif
double log2_big(const BigInt& value) {
  if (value <= 0) return -std::numeric_limits<double>::infinity();
  const std::size_t bits = boost::multiprecision::msb(value) + 1;
  if (bits <= 1000) return std::log2(value.convert_to<double>());
  const std::size_t shift = bits - 64;
  const BigInt top = value >> shift;
  return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
}
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif

double binary_entropy(double x) {
  check_unit(x, "entropy argument");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -(x * std::log2(x) + (1.0 - x) * std::log2(1.0 - x));
}

EntropyInequality binomial_entropy_inequality(std::size_t n, std::size_t r) {
  if (r > n) throw std::invalid_argument("binomial_entropy_inequality: r exceeds N");
  EntropyInequality out;
  out.lhs_log2 = log2_big(binomial(n, r));
  out.rhs = n == 0 ? 0.0 : static_cast<double>(n) * binary_entropy(static_cast<double>(r) / n);
  // 2^{N H(r/N)} = N^N / (r^r (N-r)^(N-r)); pow(0, 0) is 1.
  out.holds = binomial(n, r) * power(r, r) * power(n - r, n - r) <= power(n, n);
  return out;
}

std::size_t typicality_threshold(std::size_t n, double epsilon) {
  const double t = std::ceil(2.0 * static_cast<double>(n) * epsilon - 1e-9);
  return t <= 0.0 ? 0 : static_cast<std::size_t>(t);
}

BigInt atypical_count_exact(std::size_t n, std::size_t threshold) {
  if (threshold > n + 1) throw std::invalid_argument("atypical_count_exact: T exceeds N + 1");
  BigInt total = 0;
  BigInt c = 1;
  BigInt three = 1;
  for (std::size_t j = 0; j < threshold; ++j) {
    total += c * three;
    c = c * (n - j) / (j + 1);
    three *= 3;
  }
  return total;
}

BoundReport atypical_dim_chain(std::size_t n, double epsilon, MuPolicy mu, double kprime) {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw RegimeError("epsilon", "the dimension chain needs 0 < epsilon < 1/4");
  if (static_cast<double>(n) * epsilon < 0.5)
    throw RegimeError("n", "the dimension chain needs N epsilon >= 1/2");
  const std::size_t t = typicality_threshold(n, epsilon);
  if (2 * t > n) throw RegimeError("epsilon", "threshold T = ceil(2 N epsilon) exceeds N/2");

  BoundReport r;
  r.n = n;
  r.epsilon = epsilon;
  r.threshold = t;
  r.epsilon_eff = static_cast<double>(t) / (2.0 * static_cast<double>(n));
  const double nd = static_cast<double>(n);

  r.exact_atypical_count = atypical_count_exact(n, t);

  // L1 = sum_{a,b,c<T} C(N,a) C(N-a,b) C(N-a-b,c); the innermost sum is a
  // truncated row sum of Pascal's triangle, shared across (a, b).
  std::vector<BigInt> row_prefix(2 * t + 1);  // row N - s, s = a + b
  for (std::size_t s = 0; s <= 2 * t - 2; ++s) {
    BigInt sum = 0;
    for (const auto& c : pascal_row(n - s, t)) sum += c;
    row_prefix[s] = sum;
  }
  const auto outer = pascal_row(n, t);
  r.l1 = 0;
  for (std::size_t a = 0; a < t; ++a) {
    const auto middle = pascal_row(n - a, t);
    BigInt inner = 0;
    for (std::size_t b = 0; b < middle.size(); ++b) inner += middle[b] * row_prefix[a + b];
    r.l1 += outer[a] * inner;
  }

  const BigInt cube_t = power(t, 3);
  const BigInt c_nt = binomial(n, t);
  r.l2 = cube_t * c_nt * c_nt * c_nt;

  const double log2_cube_t = 3.0 * std::log2(static_cast<double>(t));
  r.log2_exact = log2_big(r.exact_atypical_count);
  r.log2_l1 = log2_big(r.l1);
  r.log2_l2 = log2_big(r.l2);
  r.log2_l3 = log2_cube_t + 3.0 * nd * binary_entropy(2.0 * r.epsilon_eff);
  r.log2_l3_nominal = log2_cube_t + 3.0 * nd * binary_entropy(2.0 * epsilon);
  r.mu = mu.fixed ? *mu.fixed : 3.0 * log2_cube_t / nd;
  r.log2_l4 = nd * (6.0 * binary_entropy(r.epsilon_eff) + r.mu);
  const double per_k = -r.epsilon_eff * std::log2(r.epsilon_eff);
  r.implied_k = r.log2_l4 / (nd * per_k);
  r.log2_l5 = nd * r.implied_k * per_k;

  r.kprime = kprime;
  r.capacity_lower_bound = secrecy_lower_bound(epsilon, kprime);

  r.exact_le_l1 = r.exact_atypical_count <= r.l1;
  r.l1_le_l2 = r.l1 <= r.l2;
  r.l2_le_l3 = log_le(r.log2_l2, r.log2_l3);
  r.l3_le_l4 = log_le(r.log2_l3, r.log2_l4);
  r.l4_le_l5 = log_le(r.log2_l4, r.log2_l5);
  return r;
}

double eve_info_upper(const BoundReport& report, double theta) {
  return report.log2_exact + static_cast<double>(report.n) * theta;
}

double eve_info_upper(std::size_t n, double epsilon, double theta) {
  check_unit(epsilon, "epsilon");
  const std::size_t t = std::max<std::size_t>(1, std::min(typicality_threshold(n, epsilon), n + 1));
  return log2_big(atypical_count_exact(n, t)) + static_cast<double>(n) * theta;
}

double secrecy_lower_bound(double epsilon, double kprime) {
  if (!(kprime > 0.0)) throw ConfigError("kprime", "k' must be positive");
  if (!(epsilon >= 0.0 && epsilon < 0.25))
    throw RegimeError("epsilon", "the secrecy bound holds for 0 <= epsilon < 1/4");
  if (epsilon == 0.0) return 1.0;
  return std::max(0.0, 1.0 + kprime * epsilon * std::log2(epsilon));
}

MixtureReport mixture_error_rate(double x, double y, double a, double b, std::size_t positions,
                                 Rng& rng, double kprime) {
  if (!(a >= 0.0 && b >= 0.0) || std::abs(a + b - 1.0) > 1e-12)
    throw std::invalid_argument("mixture weights must be nonnegative and sum to 1");
  if (positions == 0) throw std::invalid_argument("mixture needs at least one position");
  const ChannelModel first = ChannelModel::from_error_rate(ErrorRate(x));
  const ChannelModel second = ChannelModel::from_error_rate(ErrorRate(y));

  MixtureReport out;
  out.positions = positions;
  out.expected_rate = a * x + b * y;
  for (std::size_t i = 0; i < positions; ++i) {
    const ChannelModel& channel = rng.uniform() < a ? first : second;
    PairState pair = bell_pair(channel.sample(rng));
    const MeasurementAxis axis = MeasurementAxis::random(rng);
    const PairOutcome o = measure_pair(pair, axis, axis, rng);
    if (o.a == o.b) ++out.errors;
  }
  const double p = out.expected_rate;
  out.observed_rate = static_cast<double>(out.errors) / static_cast<double>(positions);
  out.sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(positions));
  out.within_3sigma = std::abs(out.observed_rate - p) <= 3.0 * out.sigma + 1e-15;

  const auto in_domain = [](double e) { return e >= 0.0 && e < 0.25; };
  if (in_domain(x) && in_domain(y)) {
    out.bound_at_mixture = secrecy_lower_bound(out.expected_rate, kprime);
    out.mixed_bound = a * secrecy_lower_bound(x, kprime) + b * secrecy_lower_bound(y, kprime);
  }
  return out;
}

}  // namespace qkdlab
