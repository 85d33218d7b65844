#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shiftdiv/selberg_sieve.hpp"

using namespace shiftdiv;

namespace {

// H_a(z) by trial division over every k <= z.
double normalizer_oracle(std::int64_t a, std::uint64_t z) {
  long double H = 0.0L;
  for (std::uint64_t k = 1; k <= z; ++k) {
    if (oracle::mu(k) == 0 || std::gcd(k, static_cast<std::uint64_t>(a)) != 1) continue;
    long double hk = 1.0L;
    for (std::uint64_t p = 2; p <= k; ++p) {
      if (k % p == 0 && oracle::is_prime(p)) hk *= oracle::h(p);
    }
    H += hk;
  }
  return static_cast<double>(H);
}

}  // namespace

TEST(Context, SmallCases) {
  const double h2 = 1.0 / (2.0 * std::log(2.0) - 1.0);
  EXPECT_NEAR(build_context(1, 2).H_a, 1.0 + h2, 1e-14);
  EXPECT_NEAR(build_context(1, 2).H_a, 3.588699, 1e-6);
  EXPECT_EQ(build_context(2, 2).H_a, 1.0);
  EXPECT_TRUE(build_context(2, 2).primes.empty());
  const auto c5 = build_context(1, 5);
  EXPECT_NEAR(c5.H_a, 1.0 + c5.h(2) + c5.h(3) + c5.h(5), 1e-14);
  // every prime up to z divides a
  const auto all = build_context(30, 5);
  EXPECT_EQ(all.H_a, 1.0);
  const auto w = weights(all);
  ASSERT_EQ(w.entries.size(), 1u);
  EXPECT_EQ(w.rho(1), 1.0);
}

TEST(Context, NormalizerMatchesOracle) {
  for (const std::int64_t a : {1, 2, 6, 30, 7}) {
    for (const std::uint64_t z : {10ull, 30ull, 100ull, 1000ull}) {
      const auto ctx = build_context(a, z);
      EXPECT_NEAR(ctx.H_a, normalizer_oracle(a, z), 1e-12 * ctx.H_a) << a << " " << z;
      EXPECT_GE(ctx.H_a, 1.0);
    }
  }
}

TEST(Context, TwoNormalizerRoutesAgree) {
  for (const std::int64_t a : {1, 2, 6, 30}) {
    for (const std::uint64_t z : {1000ull, 123'457ull, 1'000'000ull}) {
      const auto ctx = build_context(a, z);
      EXPECT_NEAR(sieve_normalizer_segmented(a, z, 4096), ctx.H_a, 1e-12 * ctx.H_a) << a << " " << z;
    }
  }
}

TEST(Context, SupportAndDensityBounds) {
  const auto ctx = build_context(6, 200);
  for (const auto p : ctx.primes) {
    EXPECT_TRUE(oracle::is_prime(p));
    EXPECT_NE(6 % p, 0u);
    EXPECT_GT(ctx.g(p), 0.0);
    EXPECT_LE(ctx.g(p), 1.0 / (2.0 * std::log(2.0)));
    EXPECT_LE(ctx.g(p), 1.0 - 1.0 / ctx.A1);
  }
  EXPECT_FALSE(ctx.in_support(2));
  EXPECT_FALSE(ctx.in_support(3));
  EXPECT_EQ(ctx.g(2), 0.0);
  EXPECT_THROW(build_context(1, 1), DomainError);
  EXPECT_THROW(build_context(0, 10), DomainError);
  EXPECT_THROW(build_context(1, 10'000'001), RangeError);
}

TEST(Weights, HandCaseZEqualsTwo) {
  const auto ctx = build_context(1, 2);
  const auto w = weights(ctx);
  EXPECT_EQ(w.rho(1), 1.0);
  EXPECT_NEAR(w.rho(2), -1.0, 1e-15);
  EXPECT_EQ(w.rho(3), 0.0);
  const double B = quadratic_form_B(ctx, w);
  EXPECT_NEAR(B, 1.0 - ctx.g(2), 1e-15);
  EXPECT_NEAR(B, 0.2786525, 1e-7);
  const auto lam = lambda_table(w);
  EXPECT_NEAR(lam.at(1), 1.0, 1e-15);
  EXPECT_NEAR(lam.at(2), -1.0, 1e-15);
}

TEST(Weights, InvariantsOnGrid) {
  for (const std::int64_t a : {1, 2, 6, 30}) {
    for (const std::uint64_t z : {10ull, 30ull, 100ull}) {
      const auto ctx = build_context(a, z);
      const auto w = weights(ctx);
      EXPECT_EQ(w.rho(1), 1.0);
      EXPECT_LE(w.max_abs_rho(), 1.0 + 1e-12);
      for (const auto& e : w.entries) {
        EXPECT_LE(e.d, z);
        EXPECT_EQ(oracle::mu(e.d), e.mu);
        EXPECT_EQ(std::gcd(e.d, static_cast<std::uint64_t>(a)), 1u);
      }
      EXPECT_EQ(w.rho(z + 1), 0.0);
      EXPECT_NEAR(quadratic_form_B(ctx, w) * ctx.H_a, 1.0, 1e-10) << a << " " << z;

      const auto lam = lambda_table_pairwise(w);
      const auto grouped = lambda_table_grouped(ctx, w);
      CompensatedSum lg;
      for (const auto& [d, v] : lam) {
        EXPECT_LE(d, z * z);
        EXPECT_LE(std::fabs(v), std::pow(3.0, oracle::omega(d)) + 1e-9);
        const auto it = grouped.find(d);
        EXPECT_NEAR(v, it == grouped.end() ? 0.0 : it->second, 1e-12);
        double g = 1.0;
        for (const auto p : prime_factors(d)) g *= ctx.g(p);
        lg += v * g;
      }
      EXPECT_NEAR(lg.value(), 1.0 / ctx.H_a, 1e-12);
    }
  }
}

TEST(Weights, RhoFormulaAgainstDirectSum) {
  // rho_d from the defining sum with every ingredient recomputed by trial division
  const auto ctx = build_context(1, 60);
  const auto w = weights(ctx);
  for (const auto& e : w.entries) {
    long double inner = 0.0L;
    for (std::uint64_t k = 1; k * e.d <= 60; ++k) {
      if (oracle::mu(k * e.d) == 0) continue;
      long double hk = 1.0L;
      for (std::uint64_t p = 2; p <= k; ++p) {
        if (k % p == 0 && oracle::is_prime(p)) hk *= oracle::h(p);
      }
      inner += hk;
    }
    long double ratio = 1.0L;  // h(d)/g(d)
    for (const auto p : prime_factors(e.d)) ratio *= 1.0L + oracle::h(p);
    const double expect = static_cast<double>(e.mu * ratio * inner / ctx.H_a);
    EXPECT_NEAR(e.rho, expect, 1e-12) << e.d;
  }
}

TEST(Recursions, SingleStepAndChains) {
  for (const std::int64_t a : {1, 2, 6, 30}) {
    for (const std::uint64_t z : {2ull, 10ull, 30ull, 100ull}) {
      const auto ctx = build_context(a, z);
      const auto w = weights(ctx);
      const auto rep = verify_recursions(ctx, w);
      EXPECT_LE(rep.step_max_residual, 1e-12) << a << " " << z;
      EXPECT_LE(rep.chain_max_residual, 1e-12) << a << " " << z;
    }
  }
  const auto ctx = build_context(1, 30);
  const auto w = weights(ctx);
  const auto rep = verify_recursions(ctx, w);
  EXPECT_EQ(rep.step_checks, 163u);
  EXPECT_GT(rep.chain_checks, 1000u);
}

TEST(Recursions, ChainOfTwoIsIteratedSingleStep) {
  const auto ctx = build_context(1, 100);
  const auto w = weights(ctx);
  for (const auto& e : w.entries) {
    for (const std::uint64_t p1 : {2ull, 3ull, 5ull}) {
      for (const std::uint64_t p2 : {7ull, 11ull}) {
        if (e.d % p1 == 0 || e.d % p2 == 0) continue;
        // step d -> d p1 by the single-step rule, then d p1 -> d p1 p2
        const std::uint64_t c1[1] = {p1};
        const double rho_dp1 = -e.rho + chain_correction(ctx, e, c1);
        WeightEntry e1 = e;
        e1.d = e.d * p1;
        e1.rho = rho_dp1;
        e1.mu = -e.mu;
        e1.h = e.h * ctx.h(p1);
        e1.g = e.g * ctx.g(p1);
        const std::uint64_t c2[1] = {p2};
        const double iterated = -rho_dp1 + chain_correction(ctx, e1, c2);
        const std::uint64_t chain[2] = {p1, p2};
        const double direct = e.rho - chain_correction(ctx, e, chain);
        EXPECT_NEAR(iterated, direct, 1e-13) << e.d << " " << p1 << " " << p2;
      }
    }
  }
}

TEST(Diagnostics, RkRatioAndClosedForm) {
  const auto ctx30 = build_context(1, 30);
  const auto r = r_k_diagnostic(ctx30, 6, 2, 1, 3, 1);
  EXPECT_LE(r.ratio, 1.0);

  const auto ctx = build_context(1, 200);
  const std::uint64_t P = 30030;
  double worst = 0.0;
  for (const auto M : squarefree_divisors(P)) {
    for (const auto q : squarefree_divisors(P / M)) {
      if (q == 1) continue;
      for (const std::uint64_t delta : {1ull, 17ull, 19ull * 23}) {
        for (std::size_t k = 1; k <= prime_factors(q).size(); ++k) {
          const auto rk = r_k_diagnostic(ctx, P, M, delta, q, k);
          ASSERT_NEAR(rk.R_k, rk.closed_form, 1e-12);
          worst = std::max(worst, rk.ratio);
        }
      }
    }
  }
  EXPECT_LE(worst, 1.0 + 1e-9);
  EXPECT_GT(worst, 0.0);

  EXPECT_THROW(r_k_diagnostic(ctx, 6, 2, 1, 3, 2), DomainError);  // k > omega(q)
  EXPECT_THROW(r_k_diagnostic(ctx, 6, 2, 1, 6, 1), DomainError);  // (q, M) != 1
  EXPECT_THROW(r_k_diagnostic(ctx, 6, 5, 1, 3, 1), DomainError);  // qM does not divide P
  EXPECT_THROW(r_k_diagnostic(ctx, 6, 2, 3, 3, 1), DomainError);  // (P, delta) != 1
  const auto ctx2 = build_context(2, 30);
  EXPECT_THROW(r_k_diagnostic(ctx2, 6, 2, 1, 3, 1), DomainError);  // (P, a) != 1
}

TEST(Diagnostics, RkVanishesWhenMDeltaNotSquarefree) {
  const auto ctx = build_context(1, 200);
  for (const std::uint64_t delta : {25ull, 49ull, 7ull * 7 * 11}) {
    const auto rk = r_k_diagnostic(ctx, 6, 2, delta, 3, 1);
    EXPECT_EQ(rk.R_k, 0.0);
    EXPECT_EQ(rk.closed_form, 0.0);
    EXPECT_EQ(rk.ratio, 0.0);
  }
}

TEST(Diagnostics, TmScaledByNormalizer) {
  std::vector<double> t1;
  for (const std::uint64_t z : {50ull, 100ull, 200ull}) {
    const auto ctx = build_context(1, z);
    const auto w = weights(ctx);
    EXPECT_NEAR(t_m_diagnostic(ctx, w, {}), 1.0, 1e-12);
    const auto f1 = derivative_family(1);
    t1.push_back(t_m_diagnostic(ctx, w, f1));
    const std::vector<PrimeFunction> zero{[](std::uint64_t) { return 0.0; }};
    EXPECT_EQ(t_m_diagnostic(ctx, w, zero), 0.0);
  }
  // bounded, no growth trend across the grid
  for (const double v : t1) EXPECT_LT(std::fabs(v), 2.0);
  EXPECT_LT(std::fabs(t1[2]) / std::fabs(t1[0]), 1.5);
  const auto big = build_context(1, 300);
  const auto wb = weights(big);
  EXPECT_THROW(t_m_diagnostic(big, wb, {}), RangeError);
}

TEST(Diagnostics, TmRegroupedForm) {
  // T_1 = sum_{d1,d2} rho rho g([d1,d2]) sum_{p | [d1,d2]} f(p)
  const auto ctx = build_context(6, 60);
  const auto w = weights(ctx);
  const auto f = derivative_family(1);
  long double expect = 0.0L;
  for (const auto& x : w.entries) {
    for (const auto& y : w.entries) {
      const std::uint64_t l = x.d / std::gcd(x.d, y.d) * y.d;
      long double g = 1.0L, fs = 0.0L;
      for (const auto p : prime_factors(l)) {
        g *= ctx.g(p);
        fs += f[0](p);
      }
      expect += x.rho * y.rho * g * fs;
    }
  }
  EXPECT_NEAR(t_m_diagnostic(ctx, w, f), static_cast<double>(expect) * ctx.H_a, 1e-11);
}

TEST(SieveInequality, MajorantOnRandomIntegers) {
  for (const std::int64_t a : {1, 6}) {
    const auto ctx = build_context(a, 100);
    const auto w = weights(ctx);
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 10'000; ++i) {
      const std::uint64_t n = 1 + rng() % 1'000'000;
      bool coprime = true;
      for (const auto p : ctx.primes) coprime = coprime && n % p != 0;
      ASSERT_GE(sieve_majorant(ctx, w, n), (coprime ? 1.0 : 0.0) - 1e-12) << n;
    }
  }
}

TEST(SieveNormalizer, LogZOverNormalizerApproachesC) {
  const double C = constants(1).sieve_C;
  double prev = 1e9;
  for (const std::uint64_t z : {1000ull, 31'623ull, 1'000'000ull}) {
    const double dev = std::fabs(std::log(static_cast<double>(z)) / build_context(1, z).H_a - C) / C;
    EXPECT_LT(dev, prev) << z;
    prev = dev;
  }
  EXPECT_LE(prev, 0.15);
}

TEST(Bands, DimensionOneDescriptorsAreStable) {
  // frozen regression bands for the partial sums of g(p) ln p - ln(v/u)
  for (const std::uint64_t z : {10'000ull, 1'000'000ull}) {
    const auto b = dimension_bands(1, z);
    EXPECT_GE(b.lower, -1.0) << z;
    EXPECT_LE(b.upper, 1.0) << z;
  }
  const auto ctx = build_context(1, 1'000'000);
  EXPECT_EQ(ctx.kappa, 1.0);
  EXPECT_GT(ctx.L, 0.0);
  EXPECT_LT(ctx.L, 1.0);
  EXPECT_LT(ctx.A2, 1.0);
}
