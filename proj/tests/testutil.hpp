#pragma once

// Shared helpers for the test binaries. Oracles here are deliberately naive
// and independent of the library's own sieve/factorization code paths.

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "modform/numthy.hpp"

namespace testutil {

// Plain trial division, no wheel, no shared code with the library.
inline std::map<std::int64_t, int> naive_factor(std::int64_t n) {
  std::map<std::int64_t, int> out;
  for (std::int64_t p = 2; p * p <= n; ++p)
    while (n % p == 0) {
      ++out[p];
      n /= p;
    }
  if (n > 1) ++out[n];
  return out;
}

inline modform::numthy::Rat naive_eval(const modform::numthy::MultiplicativeFunction& f,
                                       std::int64_t n) {
  modform::numthy::Rat acc = 1;
  for (auto [p, e] : naive_factor(n)) acc *= f.at_prime_power(p, e);
  return acc;
}

inline std::int64_t naive_gcd(std::int64_t a, std::int64_t b) {
  while (b != 0) {
    auto t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// The three closed-form sign-pattern dimension sequences used by the
// built-in trace fixtures (levels 11, 14, 15 of the full space).
inline std::int64_t closed_form_plus(int k) {  // k-1+(-1)^k, +1 at k=1
  return k - 1 + (k % 2 == 0 ? 1 : -1) + (k == 1 ? 1 : 0);
}
inline std::int64_t closed_form_linear(int k) { return k - 1; }
inline std::int64_t closed_form_minus(int k) {  // k-1-(-1)^k
  return k - 1 - (k % 2 == 0 ? 1 : -1);
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace testutil
