#pragma once

// Slow, obviously-correct reference implementations used only by the tests.
// Nothing here calls into the sieve code it is checking.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

inline std::uint32_t tau(std::uint64_t n) {
  std::uint32_t t = 0;
  for (std::uint64_t k = 1; k * k <= n; ++k) {
    if (n % k == 0) t += (k * k == n) ? 1 : 2;
  }
  return t;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t k = 2; k * k <= n; ++k) {
    if (n % k == 0) return false;
  }
  return true;
}

inline int mu(std::uint64_t n) {
  int m = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    m = -m;
  }
  return n > 1 ? -m : m;
}

inline std::uint64_t phi(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t k = 1; k <= n; ++k) c += std::gcd(k, n) == 1;
  return c;
}

inline unsigned omega(std::uint64_t n) {
  unsigned w = 0;
  for (std::uint64_t p = 2; p <= n; ++p) {
    if (n % p) continue;
    ++w;
    while (n % p == 0) n /= p;
  }
  return w;
}

// full Eratosthenes over [0, n]
inline std::vector<bool> prime_table(std::uint64_t n) {
  std::vector<bool> t(n + 1, true);
  t[0] = false;
  if (n >= 1) t[1] = false;
  for (std::uint64_t i = 2; i * i <= n; ++i) {
    if (!t[i]) continue;
    for (std::uint64_t j = i * i; j <= n; j += i) t[j] = false;
  }
  return t;
}

inline double g(std::uint64_t p) {
  const double pd = static_cast<double>(p);
  return 1.0 / (pd * (pd - 1.0) * std::log(pd / (pd - 1.0)));
}

inline double h(std::uint64_t p) { return g(p) / (1.0 - g(p)); }

// Plain loops over n <= x; long double accumulation.
inline long double phi_sum(std::int64_t a, std::uint64_t x) {
  long double s = 0;
  for (std::uint64_t p = 2; p <= x; ++p) {
    if (is_prime(p)) s += 1.0L / tau(p + a);
  }
  return s;
}

inline long double titchmarsh_sum(std::int64_t a, std::uint64_t x) {
  long double s = 0;
  for (std::uint64_t p = 2; p <= x; ++p) {
    if (is_prime(p) && static_cast<std::int64_t>(p) + a >= 1) s += tau(static_cast<std::uint64_t>(p + a));
  }
  return s;
}

inline long double twin_sum(std::int64_t a, std::uint64_t x) {
  long double s = 0;
  for (std::uint64_t p = 2; p <= x; ++p) {
    if (is_prime(p) && is_prime(p + 2)) s += 1.0L / tau(p + a);
  }
  return s;
}

inline long double tau_recip_sum(std::uint64_t x) {
  long double s = 0;
  for (std::uint64_t n = 1; n <= x; ++n) s += 1.0L / tau(n);
  return s;
}

inline long double coprime_sum(std::uint64_t x, std::uint64_t d) {
  long double s = 0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (std::gcd(n, d) == 1) s += 1.0L / tau(n);
  }
  return s;
}

inline long double progression_sum(std::uint64_t x, std::uint64_t d, std::uint64_t r) {
  long double s = 0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if (n % d == r) s += 1.0L / tau(n);
  }
  return s;
}

}  // namespace oracle
