#pragma once

// Exact integer kernels: segmented sieves for tau, mu, omega, phi and least
// prime factor, prime ranges, factorization and squarefree divisor lists.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "shiftdiv/error.hpp"

namespace shiftdiv {

inline constexpr std::uint64_t kDefaultGlobalLimit = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kMaxGlobalLimit = std::uint64_t{1} << 42;
inline constexpr std::size_t kDefaultBlockSize = std::size_t{1} << 22;

struct ArithLimits {
  std::uint64_t global_limit = kDefaultGlobalLimit;
  std::size_t block_size = kDefaultBlockSize;
};

struct PrimePower {
  std::uint64_t prime = 0;
  unsigned exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct Factorization {
  std::uint64_t n = 1;
  std::vector<PrimePower> factors;  // increasing primes

  bool squarefree() const noexcept {
    return std::all_of(factors.begin(), factors.end(), [](const PrimePower& f) { return f.exponent == 1; });
  }
  unsigned omega() const noexcept { return static_cast<unsigned>(factors.size()); }
};

inline std::uint64_t isqrt(std::uint64_t n) noexcept {
  if (n < 2) return n;
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

namespace detail {

inline std::vector<std::uint32_t> simple_sieve(std::uint32_t n) {
  std::vector<std::uint32_t> primes;
  if (n < 2) return primes;
  std::vector<bool> composite(n + 1, false);
  for (std::uint32_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = std::uint64_t{i} * i; j <= n; j += i) composite[j] = true;
  }
  return primes;
}

// Primes up to sqrt(kMaxGlobalLimit), computed once.
inline std::span<const std::uint32_t> base_primes(std::uint64_t bound) {
  static const std::vector<std::uint32_t> primes = simple_sieve(std::uint32_t{1} << 21);
  if (bound > (std::uint64_t{1} << 21)) {
    throw RangeError("base prime table covers p <= 2^21 only, requested " + std::to_string(bound));
  }
  const auto end = std::upper_bound(primes.begin(), primes.end(), bound);
  return {primes.data(), static_cast<std::size_t>(end - primes.begin())};
}

inline void check_global(std::uint64_t hi, const ArithLimits& limits) {
  const std::uint64_t limit = std::min(limits.global_limit, kMaxGlobalLimit);
  if (hi > limit) {
    throw RangeError("range end " + std::to_string(hi) + " exceeds global limit " + std::to_string(limit));
  }
}

inline void check_range(std::uint64_t lo, std::uint64_t hi) {
  if (lo < 1 || hi <= lo) {
    throw DomainError("invalid range [" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
}

// Primality flags for [lo, hi) by plain segmented Eratosthenes.
inline std::vector<std::uint8_t> primality_flags(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint8_t> flags(hi - lo, 1);
  for (std::uint64_t n = lo; n < std::min<std::uint64_t>(hi, 2); ++n) flags[n - lo] = 0;
  for (const std::uint32_t p : base_primes(isqrt(hi - 1))) {
    const std::uint64_t pp = std::uint64_t{p} * p;
    std::uint64_t start = std::max(pp, (lo + p - 1) / p * p);
    for (std::uint64_t m = start; m < hi; m += p) flags[m - lo] = 0;
  }
  return flags;
}

}  // namespace detail

/// Arithmetic tables for every n in [lo, hi).
///
/// lpf follows one convention for all lo: 0 marks a prime, 1 marks n = 1,
/// otherwise it is the least prime factor. Built segments are immutable.
class SieveSegment {
 public:
  static SieveSegment build(std::uint64_t lo, std::uint64_t hi, const ArithLimits& limits = {}) {
    detail::check_range(lo, hi);
    detail::check_global(hi, limits);
    if (hi - lo > limits.block_size) {
      throw RangeError("segment length " + std::to_string(hi - lo) + " exceeds block size " +
                       std::to_string(limits.block_size));
    }
    SieveSegment seg;
    seg.lo_ = lo;
    seg.hi_ = hi;
    const std::size_t len = hi - lo;
    seg.tau_.assign(len, 1);
    seg.mu_.assign(len, 1);
    seg.omega_.assign(len, 0);
    seg.lpf_.assign(len, 0);
    seg.phi_.assign(len, 1);
    std::vector<std::uint64_t> rem(len);
    std::iota(rem.begin(), rem.end(), lo);

    for (const std::uint32_t p : detail::base_primes(isqrt(hi - 1))) {
      const std::uint64_t start = (lo + p - 1) / p * p;
      for (std::uint64_t n = start; n < hi; n += p) {
        const std::size_t i = n - lo;
        std::uint64_t r = rem[i] / p;
        unsigned e = 1;
        std::uint64_t pe = 1;  // p^(e-1)
        while (r % p == 0) {
          r /= p;
          ++e;
          pe *= p;
        }
        rem[i] = r;
        seg.tau_[i] *= e + 1;
        seg.omega_[i] += 1;
        seg.mu_[i] = e > 1 ? 0 : static_cast<std::int8_t>(-seg.mu_[i]);
        seg.phi_[i] *= (p - 1) * pe;
        if (seg.lpf_[i] == 0) seg.lpf_[i] = p;
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (rem[i] > 1) {
        // one prime factor above sqrt(hi) remains
        seg.tau_[i] *= 2;
        seg.omega_[i] += 1;
        seg.mu_[i] = static_cast<std::int8_t>(-seg.mu_[i]);
        seg.phi_[i] *= rem[i] - 1;
        if (seg.lpf_[i] == 0) seg.lpf_[i] = rem[i];
      }
      if (seg.tau_[i] == 2) seg.lpf_[i] = 0;
      if (lo + i == 1) seg.lpf_[i] = 1;
    }
    return seg;
  }

  std::uint64_t lo() const noexcept { return lo_; }
  std::uint64_t hi() const noexcept { return hi_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(hi_ - lo_); }
  bool contains(std::uint64_t n) const noexcept { return n >= lo_ && n < hi_; }

  std::uint32_t tau(std::uint64_t n) const { return tau_[index(n)]; }
  int mu(std::uint64_t n) const { return mu_[index(n)]; }
  unsigned omega(std::uint64_t n) const { return omega_[index(n)]; }
  std::uint64_t lpf(std::uint64_t n) const { return lpf_[index(n)]; }
  std::uint64_t phi(std::uint64_t n) const { return phi_[index(n)]; }
  bool is_prime(std::uint64_t n) const { return lpf_[index(n)] == 0; }

  std::span<const std::uint32_t> tau_table() const noexcept { return tau_; }
  std::span<const std::int8_t> mu_table() const noexcept { return mu_; }
  std::span<const std::uint8_t> omega_table() const noexcept { return omega_; }
  std::span<const std::uint64_t> lpf_table() const noexcept { return lpf_; }
  std::span<const std::uint64_t> phi_table() const noexcept { return phi_; }

 private:
  SieveSegment() = default;

  std::size_t index(std::uint64_t n) const {
    if (!contains(n)) {
      throw RangeError(std::to_string(n) + " outside segment [" + std::to_string(lo_) + ", " + std::to_string(hi_) +
                       ")");
    }
    return static_cast<std::size_t>(n - lo_);
  }

  std::uint64_t lo_ = 1;
  std::uint64_t hi_ = 2;
  std::vector<std::uint32_t> tau_;
  std::vector<std::int8_t> mu_;
  std::vector<std::uint8_t> omega_;
  std::vector<std::uint64_t> lpf_;
  std::vector<std::uint64_t> phi_;
};

inline SieveSegment build_segment(std::uint64_t lo, std::uint64_t hi, const ArithLimits& limits = {}) {
  return SieveSegment::build(lo, hi, limits);
}

/// tau(n) for n in [lo, hi) into out; rem is caller-owned scratch so repeated
/// calls do not reallocate.
inline void tau_values(std::uint64_t lo, std::uint64_t hi, std::vector<std::uint32_t>& out,
                       std::vector<std::uint64_t>& rem) {
  detail::check_range(lo, hi);
  const std::size_t len = hi - lo;
  out.assign(len, 1);
  rem.resize(len);
  std::iota(rem.begin(), rem.end(), lo);
  for (const std::uint32_t p : detail::base_primes(isqrt(hi - 1))) {
    for (std::uint64_t n = (lo + p - 1) / p * p; n < hi; n += p) {
      const std::size_t i = n - lo;
      std::uint64_t r = rem[i] / p;
      std::uint32_t e = 1;
      while (r % p == 0) {
        r /= p;
        ++e;
      }
      rem[i] = r;
      out[i] *= e + 1;
    }
  }
  for (std::size_t i = 0; i < len; ++i) {
    if (rem[i] > 1) out[i] *= 2;
  }
}

inline std::vector<std::uint32_t> tau_range(std::uint64_t lo, std::uint64_t hi, const ArithLimits& limits = {}) {
  detail::check_range(lo, hi);
  detail::check_global(hi, limits);
  std::vector<std::uint32_t> out;
  std::vector<std::uint64_t> rem;
  tau_values(lo, hi, out, rem);
  return out;
}

/// Primes in [lo, hi), ascending.
inline std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi, const ArithLimits& limits = {}) {
  detail::check_range(lo, hi);
  detail::check_global(hi, limits);
  std::vector<std::uint64_t> out;
  for (std::uint64_t b = lo; b < hi;) {
    const std::uint64_t e = std::min<std::uint64_t>(hi, b + limits.block_size);
    const auto flags = detail::primality_flags(b, e);
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flags[i]) out.push_back(b + i);
    }
    b = e;
  }
  return out;
}

inline Factorization factorize(std::uint64_t n, const ArithLimits& limits = {}) {
  if (n < 1) throw DomainError("factorize requires n >= 1");
  detail::check_global(n, limits);
  Factorization f;
  f.n = n;
  std::uint64_t r = n;
  for (const std::uint32_t p : detail::base_primes(isqrt(n))) {
    if (std::uint64_t{p} * p > r) break;
    if (r % p != 0) continue;
    unsigned e = 0;
    while (r % p == 0) {
      r /= p;
      ++e;
    }
    f.factors.push_back({p, e});
  }
  if (r > 1) f.factors.push_back({r, 1});
  return f;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t phi = n;
  for (const auto& [p, e] : factorize(n).factors) phi = phi / p * (p - 1);
  return phi;
}

inline int mobius(std::uint64_t n) {
  const auto f = factorize(n);
  if (!f.squarefree()) return 0;
  return f.factors.size() % 2 == 0 ? 1 : -1;
}

inline bool is_squarefree(std::uint64_t n) { return factorize(n).squarefree(); }

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  const auto f = factorize(n);
  return f.factors.size() == 1 && f.factors[0].exponent == 1;
}

/// All 2^omega(d) divisors of a squarefree d, ascending.
inline std::vector<std::uint64_t> squarefree_divisors(const Factorization& d) {
  if (!d.squarefree()) throw DomainError(std::to_string(d.n) + " is not squarefree");
  std::vector<std::uint64_t> divs{1};
  divs.reserve(std::size_t{1} << d.factors.size());
  for (const auto& f : d.factors) {
    const std::size_t k = divs.size();
    for (std::size_t i = 0; i < k; ++i) divs.push_back(divs[i] * f.prime);
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

inline std::vector<std::uint64_t> squarefree_divisors(std::uint64_t d) { return squarefree_divisors(factorize(d)); }

/// Distinct prime factors of n, ascending.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (const auto& f : factorize(n).factors) out.push_back(f.prime);
  return out;
}

}  // namespace shiftdiv
