#pragma once

// Selberg upper-bound sieve for the density g(p) = J_p(1)/phi(p):
// normalizer H_a(z), weights rho_d, the convolution lambda_d, and brute-force
// checks of the identities and recursions the weights satisfy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "shiftdiv/compensated.hpp"
#include "shiftdiv/core_arith.hpp"
#include "shiftdiv/error.hpp"
#include "shiftdiv/euler_products.hpp"

namespace shiftdiv {

inline constexpr std::uint64_t kContextMaxZ = 10'000'000;
inline constexpr std::uint64_t kWeightsMaxZ = 1'000'000;
inline constexpr std::size_t kBruteForceMaxWeights = 20'000;
inline constexpr std::uint64_t kDiagnosticMaxZ = 200;

struct SieveContext {
  std::int64_t a = 1;
  std::uint64_t z = 2;
  std::vector<std::uint64_t> primes;  // p <= z, p does not divide a
  std::vector<double> g_table;
  std::vector<double> h_table;
  double H_a = 1.0;
  // Dimension descriptors for g: 0 <= g(p) <= 1 - 1/A1 and
  // -L <= sum_{u<=p<v} g(p) ln p - kappa ln(v/u) <= A2 on the grid up to z.
  double kappa = 1.0;
  double A1 = 4.0;
  double A2 = 0.0;
  double L = 0.0;

  std::size_t support_index(std::uint64_t p) const {
    const auto it = std::lower_bound(primes.begin(), primes.end(), p);
    if (it == primes.end() || *it != p) return primes.size();
    return static_cast<std::size_t>(it - primes.begin());
  }
  bool in_support(std::uint64_t p) const { return support_index(p) < primes.size(); }
  /// g(p) for a support prime, 0 otherwise.
  double g(std::uint64_t p) const {
    const auto i = support_index(p);
    return i < primes.size() ? g_table[i] : 0.0;
  }
  double h(std::uint64_t p) const {
    const auto i = support_index(p);
    return i < primes.size() ? h_table[i] : 0.0;
  }
};

namespace detail {

// Visit every squarefree product k of primes[first..] with k * base <= bound,
// excluding primes flagged in skip. visit(k, h(k), prime indices).
template <class Visit>
void for_each_squarefree(const SieveContext& ctx, std::uint64_t bound, std::span<const std::uint8_t> skip,
                         Visit&& visit) {
  std::vector<std::uint32_t> stack;
  std::function<void(std::size_t, std::uint64_t, double)> rec = [&](std::size_t first, std::uint64_t k, double hk) {
    visit(k, hk, std::span<const std::uint32_t>(stack));
    for (std::size_t i = first; i < ctx.primes.size(); ++i) {
      const std::uint64_t p = ctx.primes[i];
      if (k > bound / p) break;
      if (!skip.empty() && skip[i]) continue;
      stack.push_back(static_cast<std::uint32_t>(i));
      rec(i + 1, k * p, hk * ctx.h_table[i]);
      stack.pop_back();
    }
  };
  rec(0, 1, 1.0);
}

// sum of mu^2(k) h(k) over support products k with lo < k <= hi, coprime to
// the primes flagged in skip.
inline double h_sum_between(const SieveContext& ctx, std::uint64_t lo, std::uint64_t hi,
                            std::span<const std::uint8_t> skip) {
  CompensatedSum acc;
  if (hi <= lo) return 0.0;
  for_each_squarefree(ctx, hi, skip, [&](std::uint64_t k, double hk, auto) {
    if (k > lo) acc += hk;
  });
  return acc.value();
}

inline std::vector<std::uint8_t> skip_mask(const SieveContext& ctx, std::uint64_t n) {
  std::vector<std::uint8_t> skip(ctx.primes.size(), 0);
  for (const auto p : prime_factors(n)) {
    const auto i = ctx.support_index(p);
    if (i < skip.size()) skip[i] = 1;
  }
  return skip;
}

inline std::uint64_t gcd(std::uint64_t x, std::uint64_t y) { return std::gcd(x, y); }

}  // namespace detail

/// H_a(z) by depth-first enumeration of squarefree support products.
inline double sieve_normalizer_enumerate(const SieveContext& ctx) {
  CompensatedSum acc;
  detail::for_each_squarefree(ctx, ctx.z, {}, [&](std::uint64_t, double hk, auto) { acc += hk; });
  return acc.value();
}

/// H_a(z) by a segmented sieve over [1, z] with h extended multiplicatively.
inline double sieve_normalizer_segmented(std::int64_t a, std::uint64_t z, std::size_t block = 1u << 18) {
  if (a < 1 || z < 2) throw DomainError("sieve_normalizer_segmented requires a >= 1, z >= 2");
  const auto ua = static_cast<std::uint64_t>(a);
  const auto base = detail::base_primes(isqrt(z));
  CompensatedSum total;
  std::vector<double> val;
  std::vector<std::uint64_t> rem;
  for (std::uint64_t lo = 1; lo <= z; lo += block) {
    const std::uint64_t hi = std::min<std::uint64_t>(z + 1, lo + block);
    const std::size_t len = hi - lo;
    val.assign(len, 1.0);
    rem.resize(len);
    std::iota(rem.begin(), rem.end(), lo);
    for (const std::uint32_t p : base) {
      const bool excluded = ua % p == 0;
      const double hp = density_unchecked(p).h;
      for (std::uint64_t n = (lo + p - 1) / p * p; n < hi; n += p) {
        const std::size_t i = n - lo;
        rem[i] /= p;
        if (excluded || rem[i] % p == 0) {
          val[i] = 0.0;
        } else {
          val[i] *= hp;
        }
      }
    }
    CompensatedSum seg;
    for (std::size_t i = 0; i < len; ++i) {
      if (val[i] == 0.0) continue;
      const std::uint64_t r = rem[i];
      if (r > 1) {
        if (ua % r == 0) continue;
        seg += val[i] * density_unchecked(r).h;
      } else {
        seg += val[i];
      }
    }
    total.merge(seg);
  }
  return total.value();
}

struct DimensionBands {
  double lower = 0.0;  // min of sum g(p) ln p - ln(v/u)
  double upper = 0.0;  // max
};

/// Extremes of sum_{u<=p<v} g(p) ln p - ln(v/u) over a geometric grid
/// 2 = t_0 < t_1 < ... < t_n = z_max, all pairs u = t_i < v = t_j.
inline DimensionBands dimension_bands(std::int64_t a, std::uint64_t z_max, std::size_t grid_points = 48) {
  if (a < 1 || z_max < 3) throw DomainError("dimension_bands requires a >= 1, z_max >= 3");
  const auto ua = static_cast<std::uint64_t>(a);
  std::vector<double> grid;
  const double step = std::log(static_cast<double>(z_max) / 2.0) / static_cast<double>(grid_points);
  for (std::size_t i = 0; i <= grid_points; ++i) grid.push_back(2.0 * std::exp(step * static_cast<double>(i)));
  grid.back() = static_cast<double>(z_max);
  // prefix[i] = sum over p < grid[i]
  std::vector<double> prefix(grid.size(), 0.0);
  CompensatedSum acc;
  std::size_t gi = 0;
  for (const auto p : primes_in(1, z_max + 1)) {
    while (gi < grid.size() && static_cast<double>(p) >= grid[gi]) prefix[gi++] = acc.value();
    if (ua % p != 0) acc += density_unchecked(p).g * std::log(static_cast<double>(p));
  }
  while (gi < grid.size()) prefix[gi++] = acc.value();
  DimensionBands bands{1e300, -1e300};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double v = prefix[j] - prefix[i] - std::log(grid[j] / grid[i]);
      bands.lower = std::min(bands.lower, v);
      bands.upper = std::max(bands.upper, v);
    }
  }
  return bands;
}

inline SieveContext build_context(std::int64_t a, std::uint64_t z) {
  if (a < 1) throw DomainError("sieve context requires a >= 1");
  if (z < 2) throw DomainError("sieve context requires z >= 2");
  if (z > kContextMaxZ) throw RangeError("z = " + std::to_string(z) + " above exact-table limit 10^7");
  SieveContext ctx;
  ctx.a = a;
  ctx.z = z;
  for (const auto p : primes_in(1, z + 1)) {
    if (static_cast<std::uint64_t>(a) % p == 0) continue;
    const auto gh = density_unchecked(p);
    ctx.primes.push_back(p);
    ctx.g_table.push_back(gh.g);
    ctx.h_table.push_back(gh.h);
  }
  ctx.H_a = sieve_normalizer_enumerate(ctx);
  if (z >= 3) {
    const auto bands = dimension_bands(a, z);
    ctx.L = std::max(0.0, -bands.lower);
    ctx.A2 = std::max(0.0, bands.upper);
  }
  return ctx;
}

struct WeightEntry {
  std::uint64_t d = 1;
  double rho = 0.0;
  int mu = 1;
  double g = 1.0;
  double h = 1.0;
  std::vector<std::uint32_t> primes;  // support indices, ascending
};

struct WeightTable {
  std::vector<WeightEntry> entries;  // ascending d; every squarefree d | P_a(z), d <= z
  std::map<std::uint64_t, double> lambda;

  /// rho_d, 0 outside the support.
  double rho(std::uint64_t d) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), d,
                                     [](const WeightEntry& e, std::uint64_t v) { return e.d < v; });
    return (it != entries.end() && it->d == d) ? it->rho : 0.0;
  }
  double max_abs_rho() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, std::fabs(e.rho));
    return m;
  }
};

/// rho_d = mu(d) h(d) / (H_a g(d)) * sum_{k <= z/d, kd | P_a(z)} mu^2(k) h(k).
inline WeightTable weights(const SieveContext& ctx) {
  if (ctx.z > kWeightsMaxZ) throw RangeError("weights limited to z <= 10^6");
  WeightTable w;
  detail::for_each_squarefree(ctx, ctx.z, {}, [&](std::uint64_t d, double hd, std::span<const std::uint32_t> idx) {
    WeightEntry e;
    e.d = d;
    e.h = hd;
    e.mu = (idx.size() % 2 == 0) ? 1 : -1;
    e.primes.assign(idx.begin(), idx.end());
    for (const auto i : idx) e.g *= ctx.g_table[i];
    w.entries.push_back(std::move(e));
  });
  std::sort(w.entries.begin(), w.entries.end(), [](const WeightEntry& l, const WeightEntry& r) { return l.d < r.d; });
  std::vector<std::uint8_t> skip(ctx.primes.size(), 0);
  for (auto& e : w.entries) {
    if (e.d == 1) {
      e.rho = 1.0;
      continue;
    }
    for (const auto i : e.primes) skip[i] = 1;
    CompensatedSum inner;
    detail::for_each_squarefree(ctx, ctx.z / e.d, skip, [&](std::uint64_t, double hk, auto) { inner += hk; });
    for (const auto i : e.primes) skip[i] = 0;
    e.rho = e.mu * (e.h / e.g) / ctx.H_a * inner.value();
  }
  return w;
}

namespace detail {

// g of the lcm of two support products, from the union of their prime lists.
inline double g_of_union(const SieveContext& ctx, std::span<const std::uint32_t> x, std::span<const std::uint32_t> y) {
  double g = 1.0;
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    std::uint32_t k;
    if (j == y.size() || (i < x.size() && x[i] < y[j])) {
      k = x[i++];
    } else if (i == x.size() || y[j] < x[i]) {
      k = y[j++];
    } else {
      k = x[i];
      ++i;
      ++j;
    }
    g *= ctx.g_table[k];
  }
  return g;
}

}  // namespace detail

/// B = sum_{d1, d2} rho_{d1} rho_{d2} g([d1, d2]) by the full double loop.
inline double quadratic_form_B(const SieveContext& ctx, const WeightTable& w) {
  if (w.entries.size() > kBruteForceMaxWeights) {
    throw RangeError("quadratic form brute force limited to " + std::to_string(kBruteForceMaxWeights) + " weights");
  }
  CompensatedSum acc;
  for (const auto& x : w.entries) {
    CompensatedSum row;
    for (const auto& y : w.entries) row += x.rho * y.rho * detail::g_of_union(ctx, x.primes, y.primes);
    acc.merge(row);
  }
  return acc.value();
}

/// lambda_d = sum_{[d1, d2] = d} rho_{d1} rho_{d2}, pair by pair.
inline std::map<std::uint64_t, double> lambda_table_pairwise(const WeightTable& w) {
  if (w.entries.size() > kBruteForceMaxWeights) throw RangeError("pairwise lambda limited to 2*10^4 weights");
  std::map<std::uint64_t, CompensatedSum> acc;
  for (const auto& x : w.entries) {
    for (const auto& y : w.entries) {
      const std::uint64_t l = x.d / detail::gcd(x.d, y.d) * y.d;
      acc[l] += x.rho * y.rho;
    }
  }
  std::map<std::uint64_t, double> out;
  for (const auto& [d, s] : acc) out[d] = s.value();
  return out;
}

/// lambda_d by grouping over divisors: for squarefree d,
/// lambda_d = sum_{d1 | d} rho_{d1} sum_{e | d1} rho_{(d/d1) e}.
inline std::map<std::uint64_t, double> lambda_table_grouped(const SieveContext& ctx, const WeightTable& w) {
  std::map<std::uint64_t, double> out;
  const std::uint64_t z2 = ctx.z * ctx.z;
  detail::for_each_squarefree(ctx, z2, {}, [&](std::uint64_t d, double, std::span<const std::uint32_t> idx) {
    const std::size_t n = idx.size();
    if (n > 20) throw RangeError("grouped lambda: omega(d) too large");
    std::vector<std::uint64_t> ps;
    for (const auto i : idx) ps.push_back(ctx.primes[i]);
    auto product = [&](std::uint32_t mask) {
      std::uint64_t v = 1;
      for (std::size_t b = 0; b < n; ++b) {
        if (mask >> b & 1u) v *= ps[b];
      }
      return v;
    };
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    CompensatedSum s;
    for (std::uint32_t A = full;; A = (A - 1) & full) {
      const std::uint64_t d1 = product(A);
      if (d1 <= ctx.z) {
        const double r1 = w.rho(d1);
        if (r1 != 0.0) {
          const std::uint64_t rest = d / d1;
          for (std::uint32_t B = A;; B = (B - 1) & A) {
            const std::uint64_t d2 = rest * product(B);
            if (d2 <= ctx.z) s += r1 * w.rho(d2);
            if (B == 0) break;
          }
        }
      }
      if (A == 0) break;
    }
    const double v = s.value();
    if (v != 0.0) out[d] = v;
  });
  return out;
}

inline std::map<std::uint64_t, double> lambda_table(const WeightTable& w) { return lambda_table_pairwise(w); }

// ---------------------------------------------------------------------------
// recursions

struct RecursionReport {
  double step_max_residual = 0.0;
  std::size_t step_checks = 0;
  double chain_max_residual = 0.0;
  std::size_t chain_checks = 0;
};

/// (mu(d) h(d) / (H_a g(d))) * R with R the chain correction sum for primes
/// alpha = (p_1, ..., p_k) in that order. skip must flag exactly the primes of
/// d; it is restored before returning.
inline double chain_correction(const SieveContext& ctx, const WeightEntry& d, std::span<const std::uint64_t> chain,
                               std::vector<std::uint8_t>& skip) {
  CompensatedSum R;
  double ratio_prod = 1.0;  // prod_{i<m} h(p_i)/g(p_i)
  std::uint64_t alpha_prev = 1;
  for (std::size_t m = 0; m < chain.size(); ++m) {
    const std::uint64_t p = chain[m];
    const std::uint64_t alpha = alpha_prev * p;
    skip[ctx.support_index(p)] = 1;
    // z/(d alpha) < l <= z/(d alpha_prev) on integers
    const std::uint64_t hi = ctx.z / (d.d * alpha_prev);
    const std::uint64_t lo = ctx.z / (d.d * alpha);
    R += ratio_prod * detail::h_sum_between(ctx, lo, hi, skip);
    ratio_prod *= ctx.h(p) / ctx.g(p);
    alpha_prev = alpha;
  }
  for (const auto p : chain) skip[ctx.support_index(p)] = 0;
  return d.mu * (d.h / d.g) / ctx.H_a * R.value();
}

inline double chain_correction(const SieveContext& ctx, const WeightEntry& d, std::span<const std::uint64_t> chain) {
  auto skip = detail::skip_mask(ctx, d.d);
  return chain_correction(ctx, d, chain, skip);
}

/// Checks rho_{dp} = -rho_d + correction for every (d, p) and samples chains
/// of length 2 and 3 against rho_{d p1 ... pk} = (-1)^k (rho_d - correction).
inline RecursionReport verify_recursions(const SieveContext& ctx, const WeightTable& w,
                                         std::size_t chain_primes = 6, std::size_t chain_d_limit = 500) {
  RecursionReport rep;
  std::vector<std::uint8_t> skip(ctx.primes.size(), 0);
  for (const auto& e : w.entries) {
    for (const auto i : e.primes) skip[i] = 1;
    for (const auto p : ctx.primes) {
      if (e.d % p == 0) continue;
      const std::uint64_t chain[1] = {p};
      const double rhs = -e.rho + chain_correction(ctx, e, chain, skip);
      const double lhs = (e.d <= ctx.z / p) ? w.rho(e.d * p) : 0.0;
      rep.step_max_residual = std::max(rep.step_max_residual, std::fabs(lhs - rhs));
      ++rep.step_checks;
    }
    for (const auto i : e.primes) skip[i] = 0;
  }
  std::size_t seen = 0;
  for (const auto& e : w.entries) {
    if (seen++ >= chain_d_limit) break;
    std::vector<std::uint64_t> avail;
    for (const auto p : ctx.primes) {
      if (avail.size() >= chain_primes) break;
      if (e.d % p != 0) avail.push_back(p);
    }
    for (std::size_t len = 2; len <= 3; ++len) {
      if (avail.size() < len) continue;
      std::vector<std::size_t> pick(len);
      std::function<void(std::size_t)> rec = [&](std::size_t depth) {
        if (depth == len) {
          std::vector<std::uint64_t> chain;
          std::uint64_t prod = e.d;
          bool over = false;
          for (const auto i : pick) {
            chain.push_back(avail[i]);
            if (prod > ctx.z / avail[i]) over = true;
            prod = over ? prod : prod * avail[i];
          }
          const double sign = (len % 2 == 0) ? 1.0 : -1.0;
          const double rhs = sign * (e.rho - chain_correction(ctx, e, chain));
          const double lhs = over ? 0.0 : w.rho(prod);
          rep.chain_max_residual = std::max(rep.chain_max_residual, std::fabs(lhs - rhs));
          ++rep.chain_checks;
          return;
        }
        for (std::size_t i = 0; i < avail.size(); ++i) {
          if (std::find(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(depth), i) !=
              pick.begin() + static_cast<std::ptrdiff_t>(depth)) {
            continue;
          }
          pick[depth] = i;
          rec(depth + 1);
        }
      };
      rec(0);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// diagnostics

struct RkReport {
  double R_k = 0.0;
  double closed_form = 0.0;  // mu(M delta) h(M delta) * sum over n | P/M
  double bound = 0.0;        // mu^2(M delta) h(M delta) prod_{p | P} (1 + h(p))
  double ratio = 0.0;        // |R_k| / bound, 0 when mu(M delta) = 0
};

/// Direct evaluation of
///   R_k = sum_{d <= z, (d,a) = 1, (d,P) = M, delta | d} mu(d) h(d)
///         sum_{z/(d alpha_k) < l <= z/(d alpha_{k-1}), (l, d alpha_k a) = 1} mu^2(l) h(l)
/// with alpha_k the product of the k smallest primes of q.
inline RkReport r_k_diagnostic(const SieveContext& ctx, std::uint64_t P, std::uint64_t M, std::uint64_t delta,
                               std::uint64_t q, std::size_t k) {
  const auto ua = static_cast<std::uint64_t>(ctx.a);
  for (const auto& [name, v] : {std::pair{"P", P}, {"M", M}, {"q", q}}) {
    if (v < 1 || !is_squarefree(v)) throw DomainError(std::string(name) + " must be a squarefree integer >= 1");
  }
  // a square in delta only empties the sum
  if (delta < 1) throw DomainError("delta must be >= 1");
  if (std::gcd(q, M) != 1) throw DomainError("(q, M) must be 1");
  if (P % (q * M) != 0) throw DomainError("qM must divide P");
  if (std::gcd(P, ua) != 1) throw DomainError("(P, a) must be 1");
  if (std::gcd(P, delta) != 1) throw DomainError("(P, delta) must be 1");
  const auto q_primes = prime_factors(q);
  if (k < 1 || k > q_primes.size()) throw DomainError("k must satisfy 1 <= k <= omega(q)");
  if (ctx.z > kDiagnosticMaxZ * 50) throw RangeError("r_k_diagnostic is brute force; z too large");

  std::uint64_t alpha_prev = 1;
  for (std::size_t i = 0; i + 1 < k; ++i) alpha_prev *= q_primes[i];
  const std::uint64_t alpha = alpha_prev * q_primes[k - 1];

  auto h_of = [](std::uint64_t n) {
    double h = 1.0;
    for (const auto p : prime_factors(n)) h *= density_unchecked(p).h;
    return h;
  };

  RkReport rep;
  const std::uint64_t Md = M * delta;
  const bool md_squarefree = is_squarefree(Md);

  CompensatedSum total;
  detail::for_each_squarefree(ctx, ctx.z, {}, [&](std::uint64_t d, double hd, std::span<const std::uint32_t> idx) {
    if (std::gcd(d, P) != M || d % delta != 0) return;
    auto skip = detail::skip_mask(ctx, d * alpha);
    const double inner = detail::h_sum_between(ctx, ctx.z / (d * alpha), ctx.z / (d * alpha_prev), skip);
    const double mu = (idx.size() % 2 == 0) ? 1.0 : -1.0;
    total += mu * hd * inner;
  });
  rep.R_k = total.value();

  if (md_squarefree && std::gcd(Md, ua) == 1) {
    const double mu_md = (prime_factors(Md).size() % 2 == 0) ? 1.0 : -1.0;
    CompensatedSum cf;
    const std::uint64_t lo_div = Md * alpha, hi_div = Md * alpha_prev;
    for (const auto n : squarefree_divisors(P / M)) {
      if (std::gcd(n, alpha) != 1) continue;
      if (n <= ctx.z / lo_div || n > ctx.z / hi_div) continue;
      cf += h_of(n);
    }
    rep.closed_form = mu_md * h_of(Md) * cf.value();
  }
  if (md_squarefree) {
    double prod = 1.0;
    for (const auto p : prime_factors(P)) prod *= 1.0 + density_unchecked(p).h;
    rep.bound = h_of(Md) * prod;
    rep.ratio = std::fabs(rep.R_k) / rep.bound;
  }
  return rep;
}

using PrimeFunction = std::function<double(std::uint64_t)>;

/// The derivative family f_i(p) = f^{(i-1)}(1; p), i = 1..m.
inline std::vector<PrimeFunction> derivative_family(std::size_t m) {
  std::vector<PrimeFunction> fs;
  for (std::size_t i = 0; i < m; ++i) {
    fs.emplace_back([i](std::uint64_t p) { return f_derivative_at_one(p, static_cast<int>(i)); });
  }
  return fs;
}

/// T_m(z;a) * H_a(z) with
///   T_m = sum_{p_1..p_m <= z, p_i not | a} f_1(p_1)...f_m(p_m)
///         sum_{d1, d2, [p_1..p_m] | [d1, d2]} rho_{d1} rho_{d2} g([d1, d2]),
/// by direct summation over prime tuples and weight pairs.
inline double t_m_diagnostic(const SieveContext& ctx, const WeightTable& w, std::span<const PrimeFunction> fs) {
  if (ctx.z > kDiagnosticMaxZ) throw RangeError("t_m_diagnostic limited to z <= 200");
  if (fs.size() > 3) throw RangeError("t_m_diagnostic supports m <= 3");
  const std::size_t np = ctx.primes.size();
  struct Pair {
    std::uint64_t mask;
    double value;
  };
  std::vector<Pair> pairs;
  pairs.reserve(w.entries.size() * w.entries.size());
  for (const auto& x : w.entries) {
    for (const auto& y : w.entries) {
      std::uint64_t mask = 0;
      for (const auto i : x.primes) mask |= std::uint64_t{1} << i;
      for (const auto i : y.primes) mask |= std::uint64_t{1} << i;
      pairs.push_back({mask, x.rho * y.rho * detail::g_of_union(ctx, x.primes, y.primes)});
    }
  }
  std::vector<std::vector<double>> fv(fs.size(), std::vector<double>(np));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = 0; j < np; ++j) fv[i][j] = fs[i](ctx.primes[j]);
  }

  CompensatedSum total;
  std::vector<std::size_t> tuple(fs.size(), 0);
  std::function<void(std::size_t, double, std::uint64_t)> rec = [&](std::size_t depth, double weight,
                                                                     std::uint64_t mask) {
    if (depth == fs.size()) {
      if (weight == 0.0) return;
      CompensatedSum inner;
      for (const auto& pr : pairs) {
        if ((pr.mask & mask) == mask) inner += pr.value;
      }
      total += weight * inner.value();
      return;
    }
    for (std::size_t j = 0; j < np; ++j) rec(depth + 1, weight * fv[depth][j], mask | (std::uint64_t{1} << j));
  };
  rec(0, 1.0, 0);
  return total.value() * ctx.H_a;
}

/// (sum_{d | (n, P_a(z)), d <= z} rho_d)^2, the pointwise majorant of [(n, P_a(z)) = 1].
inline double sieve_majorant(const SieveContext& ctx, const WeightTable& w, std::uint64_t n) {
  std::vector<std::uint64_t> ps;
  for (const auto p : prime_factors(n)) {
    if (ctx.in_support(p)) ps.push_back(p);
  }
  CompensatedSum s;
  const std::size_t count = std::size_t{1} << ps.size();
  for (std::size_t mask = 0; mask < count; ++mask) {
    std::uint64_t d = 1;
    bool over = false;
    for (std::size_t b = 0; b < ps.size() && !over; ++b) {
      if (mask >> b & 1u) {
        if (d > ctx.z / ps[b]) over = true;
        d *= ps[b];
      }
    }
    if (!over) s += w.rho(d);
  }
  return s.value() * s.value();
}

}  // namespace shiftdiv
