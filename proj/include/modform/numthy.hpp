#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "modform/common.hpp"

namespace modform::numthy {

using Int = mpz_class;
using Rat = mpq_class;  // always kept canonical: reduced, positive denominator

// mpq_class(n, d) does NOT canonicalize on its own; route construction
// through here.
Rat rat(std::int64_t num, std::int64_t den = 1);
Rat rat(const Int& num, const Int& den);

bool is_integer(const Rat& r);
std::int64_t to_int64(const Int& v);
std::int64_t rat_to_int64(const Rat& r);  // requires r integral
Int pow_int(std::int64_t base, unsigned exp);

struct PrimePower {
  std::int64_t prime;
  int exp;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// A positive 64-bit integer together with its prime factorization,
// primes strictly ascending, exponents >= 1. Value 1 has no factors.
class Factorization {
 public:
  static Factorization from_factors(std::vector<PrimePower> factors);

  std::int64_t value() const { return value_; }
  const std::vector<PrimePower>& factors() const { return factors_; }
  int omega() const { return static_cast<int>(factors_.size()); }
  bool is_squarefree() const;
  bool divides(const Factorization& other) const;

  friend bool operator==(const Factorization&, const Factorization&) = default;

 private:
  Factorization() = default;
  std::int64_t value_ = 1;
  std::vector<PrimePower> factors_;
};

// Deterministic trial division (wheel mod 30). Rejects n <= 0.
Factorization factorize(std::int64_t n);

// All divisors of n, ascending by value, each with its own factorization.
std::vector<Factorization> divisors(const Factorization& n);

// n/d for d | n.
Factorization complement_divisor(const Factorization& n, const Factorization& d);

// A multiplicative function is determined by its exact rational values on
// prime powers; eval takes the product over the factorization (empty
// product = 1 at n = 1).
class MultiplicativeFunction {
 public:
  using Rule = std::function<Rat(std::int64_t p, int e)>;
  MultiplicativeFunction(std::string name, Rule rule)
      : name_(std::move(name)), rule_(std::move(rule)) {}

  const std::string& name() const { return name_; }
  Rat at_prime_power(std::int64_t p, int e) const { return rule_(p, e); }

 private:
  std::string name_;
  Rule rule_;
};

Rat eval(const MultiplicativeFunction& f, const Factorization& n);

// Shipped functions (values at prime powers p^r, r >= 1):
//   psi        : p^r + p^{r-1}
//   psi_new    : p-1 | p^2-p-1 | (p^2-1)(p-1)p^{r-3}            (r=1|2|>=3)
//   nu_inf     : 2 p^{(r-1)/2} for odd r, (p+1) p^{r/2-1} for even r
//   nu_inf_new : 0 for odd r, p-2 for r=2, (p-1)^2 p^{r/2-2} for even r>=4
//   nu2        : p=2: 1 (r=1), 0 (r>=2); p=1 mod 4: 2; p=3 mod 4: 0
//   nu2_new    : p=2: -1,-1,1,0...; p=1 mod 4: 0,-1,0...; p=3 mod 4: -2,1,0...
//   nu3, nu3_new: same shapes with 3 in place of 2 and residues mod 3
//   mu         : -1 (r=1), 0 (r>=2)
//   beta       : -2 (r=1), 1 (r=2), 0 (r>=3); Dirichlet inverse of the
//                divisor-count function, so dim-new = beta (*) dim
//   pi_product : p^2/(p^2-p-1) at every power (depends only on p | n)
namespace fns {
const MultiplicativeFunction& psi();
const MultiplicativeFunction& psi_new();
const MultiplicativeFunction& nu_inf();
const MultiplicativeFunction& nu_inf_new();
const MultiplicativeFunction& nu2();
const MultiplicativeFunction& nu2_new();
const MultiplicativeFunction& nu3();
const MultiplicativeFunction& nu3_new();
const MultiplicativeFunction& mu();
const MultiplicativeFunction& beta();
const MultiplicativeFunction& pi_product();
}  // namespace fns

// floor and ceil of n^{p/q} as exact integers (q >= 1, n >= 0). The power
// n^p is taken in arbitrary precision first, so directed rounding is exact.
std::pair<Int, Int> nth_root_bounds(const Int& n, unsigned p, unsigned q);

// Tighter directed bounds with denominator 10^digits:
//   nth_root_lower <= n^{p/q} <= nth_root_upper.
Rat nth_root_lower(const Int& n, unsigned p, unsigned q, unsigned digits);
Rat nth_root_upper(const Int& n, unsigned p, unsigned q, unsigned digits);

std::vector<std::int64_t> primes_up_to(std::int64_t limit);
std::int64_t isqrt64(std::int64_t n);

}  // namespace modform::numthy
