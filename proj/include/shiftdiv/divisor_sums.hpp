#pragma once

// Exact prime and integer sums of 1/tau and tau over [1, x], reported at
// checkpoints. Work is split into fixed segments; partial sums are folded in
// segment order so results do not depend on the worker count.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "shiftdiv/compensated.hpp"
#include "shiftdiv/core_arith.hpp"
#include "shiftdiv/error.hpp"
#include "shiftdiv/euler_products.hpp"

namespace shiftdiv {

inline constexpr std::uint64_t kDefaultSumCap = std::uint64_t{1} << 33;
inline constexpr std::size_t kSumSegment = std::size_t{1} << 20;

enum class SumKind { phi, titchmarsh, twin, tau_recip, coprime_restricted, progression };

inline const char* kind_name(SumKind k) {
  switch (k) {
    case SumKind::phi: return "phi";
    case SumKind::titchmarsh: return "titchmarsh";
    case SumKind::twin: return "twin";
    case SumKind::tau_recip: return "tau-recip";
    case SumKind::coprime_restricted: return "coprime";
    case SumKind::progression: return "progression";
  }
  return "?";
}

inline std::optional<SumKind> parse_kind(const std::string& s) {
  for (const auto k : {SumKind::phi, SumKind::titchmarsh, SumKind::twin, SumKind::tau_recip,
                       SumKind::coprime_restricted, SumKind::progression}) {
    if (s == kind_name(k)) return k;
  }
  if (s == "tau_recip") return SumKind::tau_recip;
  if (s == "coprime_restricted") return SumKind::coprime_restricted;
  return std::nullopt;
}

struct SumRequest {
  SumKind kind = SumKind::tau_recip;
  std::int64_t a = 1;     // shift; modulus d for coprime_restricted and progression
  std::uint64_t r = 0;    // residue for progression
  std::uint64_t x = 1;
  std::vector<std::uint64_t> checkpoints;  // empty: default schedule
  unsigned workers = 1;
  std::uint64_t cap = kDefaultSumCap;
  std::size_t segment = kSumSegment;
  std::optional<double> K_a;  // phi bound constant; computed when absent
};

struct Checkpoint {
  std::uint64_t x = 0;
  double value = 0.0;
  double normalized = 0.0;
  std::optional<double> bound;
  std::int64_t wall_time_ms = 0;

  std::optional<double> slack() const {
    if (!bound) return std::nullopt;
    return *bound - value;
  }
};

/// Powers of ten from 10^3 below x, then x.
inline std::vector<std::uint64_t> default_checkpoints(std::uint64_t x) {
  std::vector<std::uint64_t> cps;
  for (std::uint64_t p = 1000; p < x; p *= 10) cps.push_back(p);
  cps.push_back(x);
  return cps;
}

inline double normalize(SumKind kind, std::uint64_t x, double value) {
  const double lx = std::log(static_cast<double>(x));
  const double xd = static_cast<double>(x);
  switch (kind) {
    case SumKind::phi: return value * std::pow(lx, 1.5) / xd;
    case SumKind::twin: return value * std::pow(lx, 2.5) / xd;
    case SumKind::titchmarsh: return value / xd;
    default: return value * std::sqrt(lx) / xd;
  }
}

/// 4 K(a) x / (ln x)^{3/2}.
inline double phi_bound(double K_a, std::uint64_t x) {
  const double lx = std::log(static_cast<double>(x));
  return 4.0 * K_a * static_cast<double>(x) / std::pow(lx, 1.5);
}

namespace detail {

inline void validate(const SumRequest& req) {
  if (req.x < 1) throw DomainError("x must be >= 1");
  if (req.x > req.cap) {
    throw RangeError("x = " + std::to_string(req.x) + " exceeds sum cap " + std::to_string(req.cap));
  }
  switch (req.kind) {
    case SumKind::phi:
    case SumKind::twin:
      if (req.a < 1) throw DomainError("shift a must be >= 1");
      break;
    case SumKind::titchmarsh:
      if (req.a < 1 && req.a != -1) throw DomainError("titchmarsh shift must be >= 1 or -1");
      break;
    case SumKind::coprime_restricted:
      if (req.a < 1 || !is_squarefree(static_cast<std::uint64_t>(req.a))) {
        throw DomainError("coprime modulus d must be squarefree and >= 1");
      }
      break;
    case SumKind::progression:
      if (req.a < 1) throw DomainError("progression modulus d must be >= 1");
      if (req.r >= static_cast<std::uint64_t>(req.a)) throw DomainError("residue r must satisfy 0 <= r < d");
      break;
  }
  const auto& cps = req.checkpoints;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] < 1 || (i > 0 && cps[i] <= cps[i - 1])) throw DomainError("checkpoints must be ascending and >= 1");
  }
  if (!cps.empty() && cps.back() != req.x) throw DomainError("last checkpoint must equal x");
}

struct Scratch {
  std::vector<std::uint32_t> tau;
  std::vector<std::uint64_t> rem;
};

// Partial sum over n in [lo, hi).
inline CompensatedSum segment_sum(const SumRequest& req, std::uint64_t lo, std::uint64_t hi, Scratch& s) {
  CompensatedSum acc;
  switch (req.kind) {
    case SumKind::phi:
    case SumKind::titchmarsh: {
      const auto flags = primality_flags(lo, hi);
      const auto shift = req.a;
      // p + a >= 1 always holds since p >= 2 and a >= -1
      tau_values(static_cast<std::uint64_t>(static_cast<std::int64_t>(std::max<std::uint64_t>(lo, 2)) + shift),
                 static_cast<std::uint64_t>(static_cast<std::int64_t>(std::max<std::uint64_t>(hi, 3)) + shift), s.tau,
                 s.rem);
      const std::uint64_t base = std::max<std::uint64_t>(lo, 2);
      for (std::uint64_t n = base; n < hi; ++n) {
        if (!flags[n - lo]) continue;
        const double t = s.tau[n - base];
        acc += req.kind == SumKind::phi ? 1.0 / t : t;
      }
      break;
    }
    case SumKind::twin: {
      const auto flags = primality_flags(lo, hi + 2);
      const auto ua = static_cast<std::uint64_t>(req.a);
      tau_values(lo + ua, hi + ua, s.tau, s.rem);
      for (std::uint64_t n = lo; n < hi; ++n) {
        if (flags[n - lo] && flags[n - lo + 2]) acc += 1.0 / s.tau[n - lo];
      }
      break;
    }
    case SumKind::tau_recip: {
      tau_values(lo, hi, s.tau, s.rem);
      for (const auto t : s.tau) acc += 1.0 / t;
      break;
    }
    case SumKind::coprime_restricted: {
      tau_values(lo, hi, s.tau, s.rem);
      const auto ps = prime_factors(static_cast<std::uint64_t>(req.a));
      for (std::uint64_t n = lo; n < hi; ++n) {
        bool coprime = true;
        for (const auto p : ps) {
          if (n % p == 0) {
            coprime = false;
            break;
          }
        }
        if (coprime) acc += 1.0 / s.tau[n - lo];
      }
      break;
    }
    case SumKind::progression: {
      const auto d = static_cast<std::uint64_t>(req.a);
      std::uint64_t first = lo + (req.r + d - lo % d) % d;
      if (first >= hi) break;
      tau_values(lo, hi, s.tau, s.rem);
      for (std::uint64_t n = first; n < hi; n += d) acc += 1.0 / s.tau[n - lo];
      break;
    }
  }
  return acc;
}

}  // namespace detail

/// Runs the request and returns one row per checkpoint.
inline std::vector<Checkpoint> compute_sums(const SumRequest& req) {
  detail::validate(req);
  const auto cps = req.checkpoints.empty() ? default_checkpoints(req.x) : req.checkpoints;
  std::optional<double> K_a = req.K_a;
  if (req.kind == SumKind::phi && !K_a) K_a = constants(req.a).K_a;

  const auto start = std::chrono::steady_clock::now();
  const unsigned workers = std::max(1u, req.workers);
  std::vector<Checkpoint> rows;
  CompensatedSum total;
  std::uint64_t lo = 1;
  for (const auto cp : cps) {
    // segments of [lo, cp]; boundaries depend only on lo, cp and the segment size
    std::vector<std::pair<std::uint64_t, std::uint64_t>> segs;
    for (std::uint64_t b = lo; b <= cp; b += req.segment) segs.emplace_back(b, std::min(cp + 1, b + req.segment));
    std::vector<CompensatedSum> parts(segs.size());
    std::atomic<std::size_t> next{0};
    auto run = [&] {
      detail::Scratch scratch;
      for (std::size_t i = next++; i < segs.size(); i = next++) {
        parts[i] = detail::segment_sum(req, segs[i].first, segs[i].second, scratch);
      }
    };
    if (workers == 1 || segs.size() <= 1) {
      run();
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < std::min<std::size_t>(workers, segs.size()); ++w) pool.emplace_back(run);
      for (auto& t : pool) t.join();
    }
    for (const auto& p : parts) total.merge(p);

    Checkpoint row;
    row.x = cp;
    row.value = total.value();
    row.normalized = normalize(req.kind, cp, row.value);
    if (req.kind == SumKind::phi && cp >= 3) row.bound = phi_bound(*K_a, cp);
    row.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                           .count();
    rows.push_back(row);
    lo = cp + 1;
  }
  return rows;
}

inline std::vector<Checkpoint> tau_recip_sum(std::uint64_t x, std::vector<std::uint64_t> checkpoints = {},
                                             unsigned workers = 1) {
  return compute_sums({.kind = SumKind::tau_recip, .x = x, .checkpoints = std::move(checkpoints), .workers = workers});
}

inline std::vector<Checkpoint> phi_sum(std::int64_t a, std::uint64_t x, std::vector<std::uint64_t> checkpoints = {},
                                       unsigned workers = 1) {
  return compute_sums(
      {.kind = SumKind::phi, .a = a, .x = x, .checkpoints = std::move(checkpoints), .workers = workers});
}

inline std::vector<Checkpoint> titchmarsh_sum(std::int64_t a, std::uint64_t x,
                                              std::vector<std::uint64_t> checkpoints = {}, unsigned workers = 1) {
  return compute_sums(
      {.kind = SumKind::titchmarsh, .a = a, .x = x, .checkpoints = std::move(checkpoints), .workers = workers});
}

inline std::vector<Checkpoint> twin_phi_sum(std::int64_t a, std::uint64_t x,
                                            std::vector<std::uint64_t> checkpoints = {}, unsigned workers = 1) {
  return compute_sums(
      {.kind = SumKind::twin, .a = a, .x = x, .checkpoints = std::move(checkpoints), .workers = workers});
}

inline std::vector<Checkpoint> coprime_restricted_sum(std::uint64_t x, std::uint64_t d,
                                                      std::vector<std::uint64_t> checkpoints = {},
                                                      unsigned workers = 1) {
  return compute_sums({.kind = SumKind::coprime_restricted,
                       .a = static_cast<std::int64_t>(d),
                       .x = x,
                       .checkpoints = std::move(checkpoints),
                       .workers = workers});
}

inline std::vector<Checkpoint> progression_sum(std::uint64_t x, std::uint64_t d, std::uint64_t r,
                                               std::vector<std::uint64_t> checkpoints = {}, unsigned workers = 1) {
  return compute_sums({.kind = SumKind::progression,
                       .a = static_cast<std::int64_t>(d),
                       .r = r,
                       .x = x,
                       .checkpoints = std::move(checkpoints),
                       .workers = workers});
}

}  // namespace shiftdiv
