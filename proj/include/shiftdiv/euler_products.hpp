#pragma once

// Real-axis analytic engine near s = 1: zeta, prime zeta, truncated Euler
// products with prime-zeta tail reconstruction, the constants of the bound
// 4 K(a) x / (ln x)^{3/2}, and the functions J_d, I, H, G_d with their
// derivatives at s = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "shiftdiv/compensated.hpp"
#include "shiftdiv/core_arith.hpp"
#include "shiftdiv/error.hpp"
#include "shiftdiv/series.hpp"

namespace shiftdiv {

struct PrecisionBudget {
  std::uint64_t prime_cutoff = 10'000;
  std::size_t series_order = 12;
  int target_digits = 10;

  void validate() const {
    if (prime_cutoff < 100) throw DomainError("prime_cutoff must be >= 100");
    if (series_order < 4) throw DomainError("series_order must be >= 4");
    if (target_digits < 1 || target_digits > 14) throw DomainError("target_digits must be in [1, 14]");
  }

  PrecisionBudget doubled() const {
    PrecisionBudget b = *this;
    b.prime_cutoff *= 2;
    return b;
  }
};

// ---------------------------------------------------------------------------
// zeta

namespace detail {

// B_2, B_4, ..., B_24
inline constexpr std::array<double, 12> kBernoulliEven = {
    1.0 / 6.0,          -1.0 / 30.0,       1.0 / 42.0,           -1.0 / 30.0,
    5.0 / 66.0,         -691.0 / 2730.0,   7.0 / 6.0,            -3617.0 / 510.0,
    43867.0 / 798.0,    -174611.0 / 330.0, 854513.0 / 138.0,     -236364091.0 / 2730.0};

// zeta(s) - 1 by Euler-Maclaurin with N = 16 and 12 correction terms; valid for s != 1.
inline double zeta_minus_one_em(double s) {
  constexpr int kN = 16;
  CompensatedSum acc;
  for (int n = 2; n < kN; ++n) acc += std::pow(static_cast<double>(n), -s);
  const double N = kN;
  const double Ns = std::pow(N, -s);
  acc += N * Ns / (s - 1.0);
  acc += 0.5 * Ns;
  // term_k = B_2k / (2k)! * s (s+1) ... (s+2k-2) * N^{-s-2k+1}
  double rising = s;            // s (s+1) ... (s+2k-2)
  double fact = 2.0;            // (2k)!
  double npow = Ns / N;         // N^{-s-2k+1}
  for (std::size_t k = 1; k <= kBernoulliEven.size(); ++k) {
    acc += kBernoulliEven[k - 1] / fact * rising * npow;
    rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
    fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    npow /= N * N;
  }
  return acc.value();
}

inline std::span<const std::uint64_t> primes_upto(std::uint64_t bound) {
  static const std::vector<std::uint64_t> primes = primes_in(1, 4'000'001);
  if (bound > 4'000'000) throw RangeError("prime cutoff above 4e6 is not supported");
  const auto end = std::upper_bound(primes.begin(), primes.end(), bound);
  return {primes.data(), static_cast<std::size_t>(end - primes.begin())};
}

}  // namespace detail

/// Riemann zeta on the real window [0.6, 64] away from the pole.
inline double zeta_real(double s) {
  if (!(s >= 0.6 && s <= 64.0)) throw DomainError("zeta_real supports s in [0.6, 64]");
  if (std::fabs(s - 1.0) < 1e-6) throw DomainError("zeta_real: s too close to 1, use zeta_times_s_minus_1");
  return 1.0 + detail::zeta_minus_one_em(s);
}

/// (s - 1) zeta(s), analytic through s = 1, from the alternating eta series
/// with Borwein's acceleration.
inline double zeta_times_s_minus_1(double s) {
  if (!(s >= 0.6 && s <= 2.0)) throw DomainError("zeta_times_s_minus_1 supports s in [0.6, 2]");
  constexpr int n = 32;
  std::array<double, n + 1> d{};
  double term = 1.0 / n;  // (n+i-1)! 4^i / ((n-i)! (2i)!) at i = 0
  double acc = term;
  d[0] = n * acc;
  for (int i = 1; i <= n; ++i) {
    term *= static_cast<double>(n + i - 1) * 4.0 * (n - i + 1) / ((2.0 * i - 1.0) * (2.0 * i));
    acc += term;
    d[i] = n * acc;
  }
  CompensatedSum eta;
  for (int k = 0; k < n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    eta += sign * (d[k] - d[n]) / std::pow(k + 1.0, s);
  }
  const double eta_s = -eta.value() / d[n];
  const double t = s - 1.0;
  const double factor = (t == 0.0) ? 1.0 / std::numbers::ln2 : t / -std::expm1(-t * std::numbers::ln2);
  return eta_s * factor;
}

/// P(s) = sum_p p^{-s} = sum_n mu(n)/n ln zeta(ns).
inline double prime_zeta(double s) {
  if (!(s > 1.0 && s <= 64.0)) throw DomainError("prime_zeta supports s in (1, 64]");
  CompensatedSum acc;
  for (std::uint64_t n = 1;; ++n) {
    const double zm1 = detail::zeta_minus_one_em(static_cast<double>(n) * s);
    if (zm1 < 1e-18) break;
    const int mu = mobius(n);
    if (mu != 0) acc += mu * std::log1p(zm1) / static_cast<double>(n);
  }
  return acc.value();
}

/// sum over primes p > cutoff of p^{-s}.
inline double prime_zeta_tail(double s, std::uint64_t cutoff) {
  CompensatedSum head;
  for (const auto p : detail::primes_upto(cutoff)) head += std::pow(static_cast<double>(p), -s);
  if (s > 40.0) return 0.0;
  return prime_zeta(s) - head.value();
}

// ---------------------------------------------------------------------------
// Euler products

/// A local factor f(p) expressed through u = p^{-s}: exact ln f(u) and the
/// coefficients of ln f(u) = sum_k e_k u^k. Convergent products need
/// e_0 = e_1 = 0.
struct LocalFactor {
  std::string name;
  std::function<double(double)> log_value;
  std::vector<double> log_coeffs;

  /// f(u) = 1 + sum_{k>=1} poly[k] u^k (poly[0] ignored).
  static LocalFactor polynomial(std::vector<double> poly, std::size_t order, std::string name = "polynomial") {
    poly.resize(std::max(poly.size(), std::size_t{1}));
    poly[0] = 1.0;
    const PowerSeries series(poly, order + 1);
    LocalFactor f;
    f.name = std::move(name);
    f.log_coeffs = series.log().coeffs();
    f.log_value = [poly](double u) {
      double r = 0.0;
      for (std::size_t k = poly.size(); k-- > 1;) r = (r + poly[k]) * u;
      return std::log1p(r);
    };
    return f;
  }
};

namespace detail {

// -ln(1-u)/u = sum u^m/(m+1)
inline PowerSeries log_ratio_series(std::size_t order) {
  return PowerSeries::from([](std::size_t m) { return 1.0 / static_cast<double>(m + 1); }, order);
}
inline PowerSeries one_minus_u(std::size_t order) { return PowerSeries::constant(1.0, order) - PowerSeries::x(order); }

inline double log_ratio(double u) { return -std::log1p(-u) / u; }

}  // namespace detail

/// sqrt(p^{2s} - p^s) ln(p^s / (p^s - 1)): the Euler factor of H(s).
inline LocalFactor h_local_factor(std::size_t order) {
  const std::size_t n = order + 1;
  const PowerSeries log_f = 0.5 * detail::one_minus_u(n).log() + detail::log_ratio_series(n).log();
  return {"H", [](double u) { return 0.5 * std::log1p(-u) + std::log(detail::log_ratio(u)); }, log_f.coeffs()};
}

/// sqrt(p/(p-1)) (p ln(p/(p-1)) - 1/(p-1)): the Euler factor of K.
inline LocalFactor k_local_factor(std::size_t order) {
  const std::size_t n = order + 1;
  const PowerSeries inner = detail::log_ratio_series(n) - PowerSeries::x(n) * detail::one_minus_u(n).inverse();
  const PowerSeries log_f = -0.5 * detail::one_minus_u(n).log() + inner.log();
  return {"K",
          [](double u) { return -0.5 * std::log1p(-u) + std::log(detail::log_ratio(u) - u / (1.0 - u)); },
          log_f.coeffs()};
}

/// g(p) as a function of u = 1/p: u / ((1-u) (-ln(1-u)/u)).
inline double sieve_density_of_u(double u) { return u / ((1.0 - u) * detail::log_ratio(u)); }

/// (1 - g(p)) (1 - 1/p)^{-1}: the Euler factor of the sieve constant C.
inline LocalFactor c_local_factor(std::size_t order) {
  const std::size_t n = order + 1;
  const PowerSeries g = PowerSeries::x(n) * (detail::one_minus_u(n) * detail::log_ratio_series(n)).inverse();
  const PowerSeries log_f = (PowerSeries::constant(1.0, n) - g).log() - detail::one_minus_u(n).log();
  return {"C", [](double u) { return std::log1p(-sieve_density_of_u(u)) - std::log1p(-u); }, log_f.coeffs()};
}

/// (1 - p^{-6}) / ((1 - p^{-2})(1 - p^{-3})): Euler factor of zeta(2)zeta(3)/zeta(6).
inline LocalFactor titchmarsh_local_factor(std::size_t order) {
  const std::size_t n = order + 1;
  auto power_term = [n](std::size_t k) {
    PowerSeries s = PowerSeries::constant(1.0, n);
    if (k < n) s[k] = -1.0;
    return s.log();
  };
  const PowerSeries log_f = power_term(6) - power_term(2) - power_term(3);
  return {"titchmarsh",
          [](double u) { return std::log1p(-std::pow(u, 6)) - std::log1p(-u * u) - std::log1p(-u * u * u); },
          log_f.coeffs()};
}

/// prod_p f(p^{-s}) = exp(sum_{p <= cutoff} ln f + sum_{k>=2} e_k P_{>cutoff}(k s)).
inline double euler_product(const LocalFactor& factor, const PrecisionBudget& budget, double s = 1.0) {
  budget.validate();
  const auto& e = factor.log_coeffs;
  if (e.size() < 2) throw DomainError("local factor '" + factor.name + "' has no series data");
  if (std::fabs(e[0]) > 1e-14 || std::fabs(e[1]) > 1e-14) {
    throw DomainError("local factor '" + factor.name + "' is not 1 + O(p^-2): product diverges");
  }
  if (!(s >= 0.6 && s <= 64.0)) throw DomainError("euler_product supports s in [0.6, 64]");
  const std::size_t order = std::min(budget.series_order, e.size() - 1);
  constexpr double kSeriesSwitch = 1e-3;

  CompensatedSum acc;
  for (const auto p : detail::primes_upto(budget.prime_cutoff)) {
    const double u = std::pow(static_cast<double>(p), -s);
    if (u > kSeriesSwitch) {
      acc += factor.log_value(u);
    } else {
      double v = 0.0;
      for (std::size_t k = order; k >= 2; --k) v = (v + e[k]) * u;
      acc += v * u;
    }
  }
  for (std::size_t k = 2; k <= order; ++k) {
    if (e[k] != 0.0) acc += e[k] * prime_zeta_tail(static_cast<double>(k) * s, budget.prime_cutoff);
  }
  return std::exp(acc.value());
}

// ---------------------------------------------------------------------------
// sieve density g, h

struct DensityPair {
  double g = 0.0;
  double h = 0.0;
};

/// g(p) = 1/(p (p-1) ln(1/(1-1/p))), h(p) = g/(1-g); no primality check.
inline DensityPair density_unchecked(std::uint64_t p) {
  const double u = 1.0 / static_cast<double>(p);
  const double g = sieve_density_of_u(u);
  return {g, g / (1.0 - g)};
}

inline DensityPair g_h_values(std::uint64_t p) {
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  return density_unchecked(p);
}

// ---------------------------------------------------------------------------
// constants

struct ConstantsReport {
  std::int64_t a = 1;
  double K = 0.0;
  double beta_a = 1.0;
  double K_a = 0.0;
  double a0 = 0.0;
  double c_titchmarsh = 0.0;
  double sieve_C = 0.0;                 // prod (1 - g(p)) (1 - 1/p)^{-1}
  double H1 = 0.0;                      // H(1) = sqrt(pi) a0
  double K_two_route_rel_delta = 0.0;   // |K_product - H(1) C / sqrt(pi)| / K
  double c_product_rel_delta = 0.0;     // zeta route vs Euler product route
  double achieved_digits = 0.0;         // from budget doubling
  PrecisionBudget budget;
};

/// beta(a) = prod_{p | a} (1 + 1/(p (p-1) ln(p/(p-1)) - 1)) = prod_{p|a} (1 + h(p)).
inline double beta(std::int64_t a) {
  if (a < 1) throw DomainError("beta requires a >= 1");
  double b = 1.0;
  for (const auto p : prime_factors(static_cast<std::uint64_t>(a))) b *= 1.0 + density_unchecked(p).h;
  return b;
}

namespace detail {

struct ConstantValues {
  double K_product = 0.0;
  double H1 = 0.0;
  double C = 0.0;
  double c_product = 0.0;
};

inline ConstantValues constant_values(const PrecisionBudget& b) {
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  ConstantValues v;
  v.K_product = inv_sqrt_pi * euler_product(k_local_factor(b.series_order), b);
  v.H1 = euler_product(h_local_factor(b.series_order), b);
  v.C = euler_product(c_local_factor(b.series_order), b);
  v.c_product = euler_product(titchmarsh_local_factor(b.series_order), b);
  return v;
}

inline double rel_delta(double x, double y) { return std::fabs(x - y) / std::max(std::fabs(x), 1e-300); }

inline double digits_from(double rel) { return rel <= 1e-16 ? 16.0 : -std::log10(rel); }

}  // namespace detail

inline ConstantsReport constants(std::int64_t a, const PrecisionBudget& budget = {}) {
  if (a < 1) throw DomainError("constants requires a >= 1");
  budget.validate();
  const auto base = detail::constant_values(budget);
  const auto twice = detail::constant_values(budget.doubled());

  ConstantsReport r;
  r.a = a;
  r.budget = budget;
  r.K = base.K_product;
  r.beta_a = beta(a);
  r.K_a = r.K * r.beta_a;
  r.H1 = base.H1;
  r.a0 = base.H1 / std::sqrt(std::numbers::pi);
  r.sieve_C = base.C;
  r.c_titchmarsh = zeta_real(2.0) * zeta_real(3.0) / zeta_real(6.0);
  r.K_two_route_rel_delta = detail::rel_delta(base.K_product, base.H1 * base.C / std::sqrt(std::numbers::pi));
  r.c_product_rel_delta = detail::rel_delta(r.c_titchmarsh, base.c_product);

  const double worst = std::max({detail::rel_delta(base.K_product, twice.K_product),
                                 detail::rel_delta(base.H1, twice.H1), detail::rel_delta(base.C, twice.C),
                                 detail::rel_delta(base.c_product, twice.c_product)});
  r.achieved_digits = std::min(detail::digits_from(worst),
                               detail::digits_from(std::max(r.K_two_route_rel_delta, r.c_product_rel_delta)));
  if (r.achieved_digits < budget.target_digits) {
    throw PrecisionError("constants reached " + std::to_string(r.achieved_digits) + " digits, target " +
                             std::to_string(budget.target_digits),
                         r.achieved_digits);
  }
  return r;
}

// ---------------------------------------------------------------------------
// J_d, I, H, G_d

namespace detail {

inline std::vector<std::uint64_t> squarefree_primes(std::uint64_t d) {
  if (d < 1) throw DomainError("d must be >= 1");
  const auto f = factorize(d);
  if (!f.squarefree()) throw DomainError(std::to_string(d) + " is not squarefree");
  std::vector<std::uint64_t> ps;
  for (const auto& pp : f.factors) ps.push_back(pp.prime);
  return ps;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// J_d(s) = prod_{p | d} (p^s ln(p^s / (p^s - 1)))^{-1}.
inline double J_eval(std::uint64_t d, double s) {
  if (!(s >= 0.9 && s <= 2.0)) throw DomainError("J_eval supports s in [0.9, 2]");
  double j = 1.0;
  for (const auto p : detail::squarefree_primes(d)) {
    const double u = std::pow(static_cast<double>(p), -s);
    j *= 1.0 / detail::log_ratio(u);
  }
  return j;
}

/// f(s;p) = ln p / ((p^s - 1) ln(p^s/(p^s - 1))) - ln p, evaluated in closed form.
inline double f_closed(double s, std::uint64_t p) {
  const double lp = std::log(static_cast<double>(p));
  const double ps = std::pow(static_cast<double>(p), s);
  return lp / ((ps - 1.0) * -std::log1p(-1.0 / ps)) - lp;
}

inline constexpr int kMaxDerivativeOrder = 8;

/// f^{(m)}(1;p) = (-1)^m (ln p)^{m+1} sum_{k>=1} d_k k^m p^{-k}, d_1 = 1/2.
inline double f_derivative_at_one(std::uint64_t p, int m) {
  if (m < 0 || m > kMaxDerivativeOrder) throw DomainError("derivative order must be in [0, 8]");
  const auto& d = gregory_d_table();
  const double lp = std::log(static_cast<double>(p));
  const double inv_p = 1.0 / static_cast<double>(p);
  const double k_peak = m / lp + 1.0;
  CompensatedSum acc;
  double pk = 1.0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    pk *= inv_p;
    const double term = d[k] * std::pow(static_cast<double>(k), m) * pk;
    acc += term;
    if (static_cast<double>(k) > k_peak && std::fabs(term) < 1e-18 * std::max(1.0, std::fabs(acc.value()))) break;
  }
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(lp, m + 1) * acc.value();
}

/// I^{(m)}(1) = sum_{p | d} f^{(m)}(1;p) for 0 <= m <= m_max.
inline std::vector<double> I_derivatives(std::uint64_t d, int m_max) {
  if (m_max < 0 || m_max > kMaxDerivativeOrder) throw DomainError("m_max must be in [0, 8]");
  std::vector<double> out(m_max + 1, 0.0);
  for (const auto p : detail::squarefree_primes(d)) {
    for (int m = 0; m <= m_max; ++m) out[m] += f_derivative_at_one(p, m);
  }
  return out;
}

/// J_d^{(l)}(1) from J' = J I and the Leibniz rule.
inline std::vector<double> J_derivatives(std::uint64_t d, int l_max) {
  if (l_max < 0 || l_max > kMaxDerivativeOrder) throw DomainError("l_max must be in [0, 8]");
  const auto I = I_derivatives(d, std::max(l_max - 1, 0));
  std::vector<double> J(l_max + 1, 0.0);
  J[0] = J_eval(d, 1.0);
  for (int r = 0; r + 1 <= l_max; ++r) {
    double acc = 0.0;
    for (int j = 0; j <= r; ++j) acc += detail::binomial(r, j) * J[j] * I[r - j];
    J[r + 1] = acc;
  }
  return J;
}

/// H(s) = (1/s) sqrt(zeta(s)(s-1)) prod_p sqrt(p^{2s} - p^s) ln(p^s/(p^s-1)).
inline double H_eval(double s, const PrecisionBudget& budget = {}) {
  if (!(s >= 0.8 && s <= 2.0)) throw DomainError("H_eval supports s in [0.8, 2]");
  return std::sqrt(zeta_times_s_minus_1(s)) / s * euler_product(h_local_factor(budget.series_order), budget, s);
}

inline constexpr int kMaxHOrder = 4;

/// H^{(k)}(1), 0 <= k <= k_max, by central differences with two Richardson
/// levels. step_scale multiplies every base step (used for stability checks).
inline std::vector<double> H_derivatives(int k_max, const PrecisionBudget& budget = {}, double step_scale = 1.0) {
  if (k_max < 0 || k_max > kMaxHOrder) throw DomainError("H_derivatives supports k_max <= 4");
  constexpr std::array<double, kMaxHOrder + 1> kBaseStep = {0.0, 1e-3, 1e-2, 2e-2, 4e-2};
  const double h0 = H_eval(1.0, budget);
  std::vector<double> out(k_max + 1, 0.0);
  out[0] = h0;
  auto H = [&](double s) { return H_eval(s, budget); };
  auto central = [&](int k, double h) {
    switch (k) {
      case 1:
        return (H(1 + h) - H(1 - h)) / (2 * h);
      case 2:
        return (H(1 + h) - 2 * h0 + H(1 - h)) / (h * h);
      case 3:
        return (H(1 + 2 * h) - 2 * H(1 + h) + 2 * H(1 - h) - H(1 - 2 * h)) / (2 * h * h * h);
      default:
        return (H(1 + 2 * h) - 4 * H(1 + h) + 6 * h0 - 4 * H(1 - h) + H(1 - 2 * h)) / (h * h * h * h);
    }
  };
  for (int k = 1; k <= k_max; ++k) {
    const double h = kBaseStep[k] * step_scale;
    const double d0 = central(k, h), d1 = central(k, h / 2), d2 = central(k, h / 4);
    const double r0 = (4 * d1 - d0) / 3, r1 = (4 * d2 - d1) / 3;
    out[k] = (16 * r1 - r0) / 15;
  }
  return out;
}

/// G_d^{(k)}(1) = sum_l binom(k,l) H^{(k-l)}(1) J_d^{(l)}(1).
inline std::vector<double> G_derivatives(std::span<const double> H_vals, std::span<const double> J_vals) {
  const int k_max = static_cast<int>(std::min(H_vals.size(), J_vals.size())) - 1;
  std::vector<double> G(k_max + 1, 0.0);
  for (int k = 0; k <= k_max; ++k) {
    for (int l = 0; l <= k; ++l) G[k] += detail::binomial(k, l) * H_vals[k - l] * J_vals[l];
  }
  return G;
}

inline std::vector<double> G_derivatives(std::uint64_t d, int k_max, const PrecisionBudget& budget = {}) {
  if (k_max < 0 || k_max > kMaxHOrder) throw DomainError("G_derivatives supports k_max <= 4");
  const auto H = H_derivatives(k_max, budget);
  const auto J = J_derivatives(d, k_max);
  return G_derivatives(H, J);
}

struct AnalyticDerivatives {
  std::uint64_t d = 1;
  int order_max = 0;
  std::vector<double> J_vals;
  std::vector<double> I_vals;
  std::vector<double> H_vals;
  std::vector<double> G_vals;
};

inline AnalyticDerivatives analytic_derivatives(std::uint64_t d, int order_max, const PrecisionBudget& budget = {}) {
  if (order_max < 0 || order_max > kMaxHOrder) throw DomainError("order_max must be in [0, 4]");
  AnalyticDerivatives a;
  a.d = d;
  a.order_max = order_max;
  a.J_vals = J_derivatives(d, order_max);
  a.I_vals = I_derivatives(d, order_max);
  a.H_vals = H_derivatives(order_max, budget);
  a.G_vals = G_derivatives(a.H_vals, a.J_vals);
  return a;
}

/// kappa(d) = (omega(d) + 2)^10
inline double kappa_weight(std::uint64_t d) { return std::pow(factorize(d).omega() + 2.0, 10.0); }

/// (x / sqrt(pi ln x)) sum_{k<=m} (-1)^k binom(2k,k) 4^{-k} G^{(k)}(1) / (ln x)^k
inline double lemma4_mainterm(double x, std::span<const double> G_vals, int m) {
  if (!(x >= 100.0)) throw DomainError("lemma4_mainterm requires x >= 100");
  if (m < 0 || m > kMaxHOrder || static_cast<std::size_t>(m) >= G_vals.size()) {
    throw DomainError("lemma4_mainterm order out of range");
  }
  const double lx = std::log(x);
  double sum = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double a_k = ((k % 2 == 0) ? 1.0 : -1.0) * detail::binomial(2 * k, k) / std::pow(4.0, k);
    sum += a_k * G_vals[k] / std::pow(lx, k);
  }
  return x / std::sqrt(std::numbers::pi * lx) * sum;
}

inline double lemma4_mainterm(double x, std::uint64_t d, int m, const PrecisionBudget& budget = {}) {
  const auto G = G_derivatives(d, m, budget);
  return lemma4_mainterm(x, G, m);
}

}  // namespace shiftdiv
