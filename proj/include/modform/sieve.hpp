#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "modform/numthy.hpp"

namespace modform::numthy {

struct SieveConfig {
  std::int64_t block_size = std::int64_t{1} << 20;  // entries per block
  std::int64_t max_range = std::int64_t{1} << 22;   // sieve_eval output cap
};

// Factor every n in [lo, hi] with a segmented sieve over the base primes
// <= sqrt(hi), one block at a time. The visitor sees, for each index
// i (n = block_lo + i), every prime power p^e || n exactly once; after all
// base primes are stripped the leftover of n is either 1 or a single prime
// > sqrt(block max), reported as (p, 1).
//
// Visitor interface:
//   void begin_block(std::int64_t block_lo, std::int64_t len);
//   void factor(std::int64_t idx, std::int64_t p, int e);
//   void end_block(std::int64_t block_lo, std::int64_t len);
template <class Visitor>
void factored_blocks(std::int64_t lo, std::int64_t hi, const SieveConfig& cfg,
                     Visitor&& vis) {
  if (lo < 1 || hi < lo) throw UsageError("factored_blocks: need 1 <= lo <= hi");
  if (cfg.block_size < 1) throw UsageError("factored_blocks: block_size < 1");
  const std::vector<std::int64_t> base = primes_up_to(isqrt64(hi));
  std::vector<std::int64_t> rem;
  for (std::int64_t blo = lo; blo <= hi;) {
    const std::int64_t len = std::min(cfg.block_size, hi - blo + 1);
    const std::int64_t bhi = blo + len - 1;
    rem.resize(static_cast<std::size_t>(len));
    for (std::int64_t i = 0; i < len; ++i) rem[static_cast<std::size_t>(i)] = blo + i;
    vis.begin_block(blo, len);
    for (std::int64_t p : base) {
      if (p > bhi / p) break;  // p*p > bhi: p can appear at most once, caught below
      std::int64_t m = ((blo + p - 1) / p) * p;
      for (; m <= bhi; m += p) {
        const auto i = static_cast<std::size_t>(m - blo);
        int e = 0;
        while (rem[i] % p == 0) {
          rem[i] /= p;
          ++e;
        }
        vis.factor(m - blo, p, e);
      }
    }
    for (std::int64_t i = 0; i < len; ++i) {
      if (rem[static_cast<std::size_t>(i)] > 1)
        vis.factor(i, rem[static_cast<std::size_t>(i)], 1);
    }
    vis.end_block(blo, len);
    blo = bhi + 1;
  }
}

// Evaluate f on every n in [lo, hi]; element i of the result is
// eval(f, lo + i), bit-identical to the pointwise route. The whole range is
// materialized, so it is capped by cfg.max_range.
std::vector<Rat> sieve_eval(const MultiplicativeFunction& f, std::int64_t lo,
                            std::int64_t hi, const SieveConfig& cfg = {});

}  // namespace modform::numthy
