#pragma once

// Gregory coefficients c_k of x / (-ln(1 - x)) and their running sums d_k,
// plus a small truncated power-series type used to expand Euler-product
// local factors.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "shiftdiv/error.hpp"

namespace shiftdiv {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr std::size_t kGregoryExactLimit = 64;
inline constexpr std::size_t kGregoryMaxOrder = 1'000'000;

struct GregorySeries {
  std::size_t n_max = 0;
  std::vector<double> c;  // c_0 .. c_{n_max}
  std::vector<double> d;  // d_k = c_0 + ... + c_k
  // Exact values for k <= min(n_max, kGregoryExactLimit).
  std::vector<Rational> c_exact;
  std::vector<Rational> d_exact;

  bool exact() const noexcept { return n_max <= kGregoryExactLimit; }
};

namespace detail {

// Dividing 1 by sum_{m>=0} x^m / (m + 1): sum_{j=0}^{n} c_j / (n + 1 - j) = [n = 0].
inline std::vector<Rational> gregory_rational(std::size_t n_max) {
  std::vector<Rational> c(n_max + 1);
  c[0] = 1;
  for (std::size_t n = 1; n <= n_max; ++n) {
    Rational acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += c[j] / Rational(static_cast<long long>(n + 1 - j));
    c[n] = -acc;
  }
  return c;
}

}  // namespace detail

inline GregorySeries gregory_coefficients(std::size_t n_max) {
  if (n_max > kGregoryMaxOrder) {
    throw RangeError("gregory order " + std::to_string(n_max) + " exceeds " + std::to_string(kGregoryMaxOrder));
  }
  GregorySeries g;
  g.n_max = n_max;
  const std::size_t exact_top = std::min(n_max, kGregoryExactLimit);
  g.c_exact = detail::gregory_rational(exact_top);
  g.d_exact.resize(exact_top + 1);
  Rational run = 0;
  for (std::size_t k = 0; k <= exact_top; ++k) {
    run += g.c_exact[k];
    g.d_exact[k] = run;
  }

  g.c.resize(n_max + 1);
  for (std::size_t k = 0; k <= exact_top; ++k) g.c[k] = static_cast<double>(g.c_exact[k]);
  for (std::size_t n = exact_top + 1; n <= n_max; ++n) {
    long double acc = 0.0L;
    for (std::size_t j = 0; j < n; ++j) acc += static_cast<long double>(g.c[j]) / static_cast<long double>(n + 1 - j);
    g.c[n] = static_cast<double>(-acc);
  }

  g.d.resize(n_max + 1);
  long double run_f = 0.0L;
  for (std::size_t k = 0; k <= n_max; ++k) {
    if (k <= exact_top) {
      g.d[k] = static_cast<double>(g.d_exact[k]);
      run_f = static_cast<long double>(g.d[k]);
    } else {
      run_f += g.c[k];
      g.d[k] = static_cast<double>(run_f);
    }
  }
  return g;
}

/// S_N = sum_{k=1..N} |c_k|; increases toward 1 logarithmically slowly.
inline double gregory_tail_sum(std::size_t n_max) {
  if (n_max < 1) throw DomainError("gregory_tail_sum requires n_max >= 1");
  const auto g = gregory_coefficients(n_max);
  long double s = 0.0L;
  for (std::size_t k = 1; k <= n_max; ++k) s += std::fabs(static_cast<long double>(g.c[k]));
  return static_cast<double>(s);
}

/// Shared read-only d_k table for the log-power expansions.
inline const std::vector<double>& gregory_d_table() {
  static const std::vector<double> d = gregory_coefficients(512).d;
  return d;
}

/// Power series truncated after x^(order-1).
class PowerSeries {
 public:
  explicit PowerSeries(std::size_t order) : a_(order, 0.0) {}
  PowerSeries(std::vector<double> coeffs, std::size_t order) : a_(std::move(coeffs)) { a_.resize(order, 0.0); }

  static PowerSeries constant(double v, std::size_t order) {
    PowerSeries s(order);
    s.a_[0] = v;
    return s;
  }
  static PowerSeries x(std::size_t order) {
    PowerSeries s(order);
    if (order > 1) s.a_[1] = 1.0;
    return s;
  }
  static PowerSeries from(const std::function<double(std::size_t)>& coeff, std::size_t order) {
    PowerSeries s(order);
    for (std::size_t k = 0; k < order; ++k) s.a_[k] = coeff(k);
    return s;
  }

  std::size_t order() const noexcept { return a_.size(); }
  double operator[](std::size_t k) const { return a_[k]; }
  double& operator[](std::size_t k) { return a_[k]; }
  const std::vector<double>& coeffs() const noexcept { return a_; }

  double eval(double x) const {
    double r = 0.0;
    for (std::size_t k = a_.size(); k-- > 0;) r = r * x + a_[k];
    return r;
  }

  friend PowerSeries operator+(PowerSeries l, const PowerSeries& r) {
    for (std::size_t k = 0; k < l.order(); ++k) l.a_[k] += r.a_[k];
    return l;
  }
  friend PowerSeries operator-(PowerSeries l, const PowerSeries& r) {
    for (std::size_t k = 0; k < l.order(); ++k) l.a_[k] -= r.a_[k];
    return l;
  }
  friend PowerSeries operator*(double s, PowerSeries r) {
    for (auto& v : r.a_) v *= s;
    return r;
  }
  friend PowerSeries operator*(const PowerSeries& l, const PowerSeries& r) {
    PowerSeries out(l.order());
    for (std::size_t i = 0; i < l.order(); ++i) {
      for (std::size_t j = 0; i + j < l.order(); ++j) out.a_[i + j] += l.a_[i] * r.a_[j];
    }
    return out;
  }

  PowerSeries inverse() const {
    if (a_[0] == 0.0) throw DomainError("power series inverse needs a nonzero constant term");
    PowerSeries b(order());
    b.a_[0] = 1.0 / a_[0];
    for (std::size_t n = 1; n < order(); ++n) {
      double acc = 0.0;
      for (std::size_t k = 1; k <= n; ++k) acc += a_[k] * b.a_[n - k];
      b.a_[n] = -acc / a_[0];
    }
    return b;
  }

  PowerSeries derivative() const {
    PowerSeries d(order());
    for (std::size_t k = 1; k < order(); ++k) d.a_[k - 1] = static_cast<double>(k) * a_[k];
    return d;
  }

  PowerSeries integral() const {
    PowerSeries s(order());
    for (std::size_t k = 0; k + 1 < order(); ++k) s.a_[k + 1] = a_[k] / static_cast<double>(k + 1);
    return s;
  }

  /// log of a series with positive constant term.
  PowerSeries log() const {
    if (!(a_[0] > 0.0)) throw DomainError("power series log needs a positive constant term");
    PowerSeries l = (derivative() * inverse()).integral();
    l.a_[0] = std::log(a_[0]);
    return l;
  }

  /// exp of a series with zero constant term.
  PowerSeries exp() const {
    if (a_[0] != 0.0) throw DomainError("power series exp needs a zero constant term");
    PowerSeries b(order());
    b.a_[0] = 1.0;
    for (std::size_t n = 1; n < order(); ++n) {
      double acc = 0.0;
      for (std::size_t k = 1; k <= n; ++k) acc += static_cast<double>(k) * a_[k] * b.a_[n - k];
      b.a_[n] = acc / static_cast<double>(n);
    }
    return b;
  }

 private:
  std::vector<double> a_;
};

}  // namespace shiftdiv
