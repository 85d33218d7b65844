#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "shiftdiv/series.hpp"

using namespace shiftdiv;

namespace {

// |c_n| = (1/n) int_0^1 x Gamma(n - x) / (Gamma(n) Gamma(1 - x)) dx
double gregory_abs_by_quadrature(unsigned n) {
  auto f = [n](double x) {
    if (x >= 1.0) return 0.0;
    return x * std::exp(std::lgamma(n - x) - std::lgamma(static_cast<double>(n)) - std::lgamma(1.0 - x));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14) / n;
}

}  // namespace

TEST(Gregory, FirstCoefficientsExact) {
  const auto g = gregory_coefficients(6);
  ASSERT_TRUE(g.exact());
  EXPECT_EQ(g.c_exact[0], Rational(1));
  EXPECT_EQ(g.c_exact[1], Rational(-1, 2));
  EXPECT_EQ(g.c_exact[2], Rational(-1, 12));
  EXPECT_EQ(g.c_exact[3], Rational(-1, 24));
  EXPECT_EQ(g.c_exact[4], Rational(-19, 720));
  EXPECT_EQ(g.c_exact[5], Rational(-3, 160));
  EXPECT_EQ(g.c_exact[6], Rational(-863, 60480));
  EXPECT_EQ(g.d_exact[3], Rational(3, 8));
}

TEST(Gregory, MatchesGammaIntegral) {
  const auto g = gregory_coefficients(300);
  for (const unsigned n : {1u, 2u, 3u, 7u, 20u, 64u, 65u, 100u, 300u}) {
    const double q = gregory_abs_by_quadrature(n);
    EXPECT_NEAR(std::fabs(g.c[n]), q, 1e-11 * q) << n;
    EXPECT_LT(g.c[n], 0.0) << n;
  }
}

TEST(Gregory, DefiningSeriesIdentity) {
  // (sum c_k x^k) * (sum x^m / (m+1)) = 1 coefficientwise
  const std::size_t n = 40;
  const auto g = gregory_coefficients(n);
  for (std::size_t k = 0; k <= n; ++k) {
    Rational acc = 0;
    for (std::size_t j = 0; j <= k; ++j) acc += g.c_exact[j] / Rational(static_cast<long long>(k + 1 - j));
    EXPECT_EQ(acc, Rational(k == 0 ? 1 : 0)) << k;
  }
}

TEST(Gregory, FloatTailContinuesExactPrefix) {
  const auto g = gregory_coefficients(80);
  EXPECT_FALSE(g.exact());
  EXPECT_EQ(g.c_exact.size(), kGregoryExactLimit + 1);
  for (std::size_t k = 1; k <= 80; ++k) EXPECT_LT(g.c[k], 0.0);
  for (std::size_t k = 1; k <= 80; ++k) EXPECT_NEAR(g.d[k], g.d[k - 1] + g.c[k], 1e-15);
}

TEST(Gregory, AbsolutePartialSumsIncreaseBelowOne) {
  const auto g = gregory_coefficients(10'000);
  long double s = 0.0L, prev = 0.0L;
  for (std::size_t k = 1; k <= 10'000; ++k) {
    s += std::fabs(static_cast<long double>(g.c[k]));
    ASSERT_GT(s, prev) << k;
    ASSERT_LT(s, 1.0L) << k;
    prev = s;
  }
  EXPECT_NEAR(static_cast<double>(s), gregory_tail_sum(10'000), 1e-15);
  // d_k = 1 - S_k shrinks like 1/ln k
  EXPECT_NEAR(g.d[10'000], 1.0 - static_cast<double>(s), 1e-12);
}

TEST(Gregory, Errors) {
  EXPECT_THROW(gregory_coefficients(kGregoryMaxOrder + 1), RangeError);
  EXPECT_THROW(gregory_tail_sum(0), DomainError);
}

TEST(PowerSeries, LogExpInverse) {
  const std::size_t n = 10;
  // 1/(1-x) = sum x^k
  const auto one_minus_x = PowerSeries::constant(1.0, n) - PowerSeries::x(n);
  const auto geo = one_minus_x.inverse();
  for (std::size_t k = 0; k < n; ++k) EXPECT_DOUBLE_EQ(geo[k], 1.0);
  // -log(1-x) = sum x^k / k
  const auto l = one_minus_x.log();
  for (std::size_t k = 1; k < n; ++k) EXPECT_NEAR(l[k], -1.0 / static_cast<double>(k), 1e-15);
  const auto e = l.exp();
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(e[k], one_minus_x[k], 1e-14);
  EXPECT_THROW(PowerSeries::x(n).inverse(), DomainError);
  EXPECT_THROW(PowerSeries::constant(1.0, n).exp(), DomainError);
}

TEST(PowerSeries, GregoryAsReciprocal) {
  // x / (-ln(1-x)) = 1 / (sum x^m / (m+1))
  const std::size_t n = 12;
  const auto s = PowerSeries::from([](std::size_t m) { return 1.0 / static_cast<double>(m + 1); }, n).inverse();
  const auto g = gregory_coefficients(n - 1);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(s[k], g.c[k], 1e-15);
}
