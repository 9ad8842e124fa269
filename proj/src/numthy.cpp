#include "modform/numthy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "modform/sieve.hpp"

namespace modform {

std::string to_hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::uint64_t from_hex16(const std::string& s) {
  if (s.size() != 16) throw DataError("checksum must be 16 hex digits");
  std::uint64_t v = 0;
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9')
      v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f')
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else
      throw DataError("checksum must be lowercase hex");
  }
  return v;
}

}  // namespace modform

namespace modform::numthy {

Rat rat(std::int64_t num, std::int64_t den) {
  if (den == 0) throw UsageError("rat: zero denominator");
  Rat r(static_cast<long>(num), static_cast<long>(den));
  r.canonicalize();
  return r;
}

Rat rat(const Int& num, const Int& den) {
  if (den == 0) throw UsageError("rat: zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

bool is_integer(const Rat& r) { return r.get_den() == 1; }

std::int64_t to_int64(const Int& v) {
  if (!v.fits_slong_p()) throw ResourceError("integer exceeds 64 bits");
  return static_cast<std::int64_t>(v.get_si());
}

std::int64_t rat_to_int64(const Rat& r) {
  if (!is_integer(r)) throw InternalError("expected an integer rational");
  return to_int64(Int(r.get_num()));
}

Int pow_int(std::int64_t base, unsigned exp) {
  if (base < 0) throw UsageError("pow_int: negative base");
  Int out;
  mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), exp);
  return out;
}

bool Factorization::is_squarefree() const {
  for (const auto& f : factors_)
    if (f.exp > 1) return false;
  return true;
}

bool Factorization::divides(const Factorization& other) const {
  for (const auto& f : factors_) {
    bool found = false;
    for (const auto& g : other.factors_) {
      if (g.prime == f.prime) {
        if (g.exp < f.exp) return false;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

Factorization Factorization::from_factors(std::vector<PrimePower> factors) {
  Factorization out;
  std::int64_t v = 1;
  std::int64_t last = 1;
  for (const auto& f : factors) {
    if (f.prime <= last) throw UsageError("factors must have ascending primes");
    if (f.exp < 1) throw UsageError("factor exponents must be >= 1");
    last = f.prime;
    for (int i = 0; i < f.exp; ++i) {
      if (v > std::numeric_limits<std::int64_t>::max() / f.prime)
        throw ResourceError("factorization value exceeds 64 bits");
      v *= f.prime;
    }
  }
  out.value_ = v;
  out.factors_ = std::move(factors);
  return out;
}

Factorization factorize(std::int64_t n) {
  if (n <= 0) throw UsageError("factorize: n must be >= 1");
  std::vector<PrimePower> fs;
  std::int64_t m = n;
  const auto strip = [&](std::int64_t p) {
    if (m % p != 0) return;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    fs.push_back({p, e});
  };
  strip(2);
  strip(3);
  strip(5);
  // wheel mod 30 starting at 7: 7 11 13 17 19 23 29 31 ...
  static constexpr std::array<int, 8> inc = {4, 2, 4, 2, 4, 6, 2, 6};
  std::int64_t p = 7;
  std::size_t i = 0;
  while (p <= m / p) {
    strip(p);
    p += inc[i];
    i = (i + 1) & 7;
  }
  if (m > 1) fs.push_back({m, 1});
  return Factorization::from_factors(std::move(fs));
}

std::vector<Factorization> divisors(const Factorization& n) {
  std::vector<std::vector<PrimePower>> built = {{}};
  for (const auto& f : n.factors()) {
    const std::size_t count = built.size();
    for (std::size_t i = 0; i < count; ++i) {
      for (int e = 1; e <= f.exp; ++e) {
        auto next = built[i];
        next.push_back({f.prime, e});
        built.push_back(std::move(next));
      }
    }
  }
  std::vector<Factorization> out;
  out.reserve(built.size());
  for (auto& fs : built) out.push_back(Factorization::from_factors(std::move(fs)));
  std::sort(out.begin(), out.end(),
            [](const Factorization& a, const Factorization& b) {
              return a.value() < b.value();
            });
  return out;
}

Factorization complement_divisor(const Factorization& n, const Factorization& d) {
  if (!d.divides(n)) throw UsageError("complement_divisor: d does not divide n");
  std::vector<PrimePower> fs;
  for (const auto& f : n.factors()) {
    int e = f.exp;
    for (const auto& g : d.factors())
      if (g.prime == f.prime) e -= g.exp;
    if (e > 0) fs.push_back({f.prime, e});
  }
  return Factorization::from_factors(std::move(fs));
}

Rat eval(const MultiplicativeFunction& f, const Factorization& n) {
  Rat out = 1;
  for (const auto& pp : n.factors()) out *= f.at_prime_power(pp.prime, pp.exp);
  return out;
}

namespace fns {

namespace {
Rat rint(const Int& v) { return Rat(v); }
}  // namespace

const MultiplicativeFunction& psi() {
  static const MultiplicativeFunction f("psi", [](std::int64_t p, int e) {
    return rint(pow_int(p, static_cast<unsigned>(e)) +
                pow_int(p, static_cast<unsigned>(e - 1)));
  });
  return f;
}

const MultiplicativeFunction& psi_new() {
  static const MultiplicativeFunction f("psi_new", [](std::int64_t p, int e) {
    const Int P = p;
    if (e == 1) return rint(P - 1);
    if (e == 2) return rint(P * P - P - 1);
    return rint((P * P - 1) * (P - 1) * pow_int(p, static_cast<unsigned>(e - 3)));
  });
  return f;
}

const MultiplicativeFunction& nu_inf() {
  static const MultiplicativeFunction f("nu_inf", [](std::int64_t p, int e) {
    if (e % 2 == 1) return rint(2 * pow_int(p, static_cast<unsigned>((e - 1) / 2)));
    return rint(Int(p + 1) * pow_int(p, static_cast<unsigned>(e / 2 - 1)));
  });
  return f;
}

const MultiplicativeFunction& nu_inf_new() {
  static const MultiplicativeFunction f("nu_inf_new", [](std::int64_t p, int e) {
    if (e % 2 == 1) return Rat(0);
    if (e == 2) return rint(Int(p - 2));
    return rint(Int(p - 1) * Int(p - 1) * pow_int(p, static_cast<unsigned>(e / 2 - 2)));
  });
  return f;
}

const MultiplicativeFunction& nu2() {
  static const MultiplicativeFunction f("nu2", [](std::int64_t p, int e) {
    if (p == 2) return Rat(e == 1 ? 1 : 0);
    if (p % 4 == 1) return Rat(2);
    return Rat(0);
  });
  return f;
}

const MultiplicativeFunction& nu2_new() {
  static const MultiplicativeFunction f("nu2_new", [](std::int64_t p, int e) {
    if (p == 2) {
      if (e == 1 || e == 2) return Rat(-1);
      return Rat(e == 3 ? 1 : 0);
    }
    if (p % 4 == 1) return Rat(e == 2 ? -1 : 0);
    if (e == 1) return Rat(-2);  // p = 3 mod 4
    return Rat(e == 2 ? 1 : 0);
  });
  return f;
}

const MultiplicativeFunction& nu3() {
  static const MultiplicativeFunction f("nu3", [](std::int64_t p, int e) {
    if (p == 3) return Rat(e == 1 ? 1 : 0);
    if (p % 3 == 1) return Rat(2);
    return Rat(0);
  });
  return f;
}

const MultiplicativeFunction& nu3_new() {
  static const MultiplicativeFunction f("nu3_new", [](std::int64_t p, int e) {
    if (p == 3) {
      if (e == 1 || e == 2) return Rat(-1);
      return Rat(e == 3 ? 1 : 0);
    }
    if (p % 3 == 1) return Rat(e == 2 ? -1 : 0);
    if (e == 1) return Rat(-2);  // p = 2 mod 3
    return Rat(e == 2 ? 1 : 0);
  });
  return f;
}

const MultiplicativeFunction& mu() {
  static const MultiplicativeFunction f("mu", [](std::int64_t, int e) {
    return Rat(e == 1 ? -1 : 0);
  });
  return f;
}

const MultiplicativeFunction& beta() {
  static const MultiplicativeFunction f("beta", [](std::int64_t, int e) {
    if (e == 1) return Rat(-2);
    return Rat(e == 2 ? 1 : 0);
  });
  return f;
}

const MultiplicativeFunction& pi_product() {
  static const MultiplicativeFunction f("pi_product", [](std::int64_t p, int) {
    const Int P = p;
    return rat(P * P, P * P - P - 1);
  });
  return f;
}

}  // namespace fns

std::pair<Int, Int> nth_root_bounds(const Int& n, unsigned p, unsigned q) {
  if (q == 0) throw UsageError("nth_root_bounds: q must be >= 1");
  if (n < 0) throw UsageError("nth_root_bounds: n must be >= 0");
  Int np;
  mpz_pow_ui(np.get_mpz_t(), n.get_mpz_t(), p);
  Int lo;
  const int exact = mpz_root(lo.get_mpz_t(), np.get_mpz_t(), q);
  return {lo, exact ? lo : Int(lo + 1)};
}

namespace {
// floor of (n^p * 10^{q*digits})^{1/q} plus exactness flag
std::pair<Int, bool> scaled_root_floor(const Int& n, unsigned p, unsigned q,
                                       unsigned digits) {
  if (q == 0) throw UsageError("nth_root: q must be >= 1");
  if (n < 0) throw UsageError("nth_root: n must be >= 0");
  Int np;
  mpz_pow_ui(np.get_mpz_t(), n.get_mpz_t(), p);
  Int scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, q * digits);
  np *= scale;
  Int r;
  const int exact = mpz_root(r.get_mpz_t(), np.get_mpz_t(), q);
  return {r, exact != 0};
}
}  // namespace

Rat nth_root_lower(const Int& n, unsigned p, unsigned q, unsigned digits) {
  auto [r, exact] = scaled_root_floor(n, p, q, digits);
  (void)exact;
  Int den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, digits);
  return rat(r, den);
}

Rat nth_root_upper(const Int& n, unsigned p, unsigned q, unsigned digits) {
  auto [r, exact] = scaled_root_floor(n, p, q, digits);
  Int den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, digits);
  return rat(exact ? r : Int(r + 1), den);
}

std::vector<std::int64_t> primes_up_to(std::int64_t limit) {
  std::vector<std::int64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(static_cast<std::size_t>(limit + 1), false);
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    primes.push_back(i);
    if (i <= limit / i)
      for (std::int64_t j = i * i; j <= limit; j += i)
        composite[static_cast<std::size_t>(j)] = true;
  }
  return primes;
}

std::int64_t isqrt64(std::int64_t n) {
  if (n < 0) throw UsageError("isqrt64: negative input");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

std::vector<Rat> sieve_eval(const MultiplicativeFunction& f, std::int64_t lo,
                            std::int64_t hi, const SieveConfig& cfg) {
  if (lo < 1 || hi < lo) throw UsageError("sieve_eval: need 1 <= lo <= hi");
  if (hi - lo + 1 > cfg.max_range)
    throw ResourceError("sieve_eval: range exceeds configured memory budget");
  std::vector<Rat> out(static_cast<std::size_t>(hi - lo + 1), Rat(1));
  struct Vis {
    const MultiplicativeFunction& f;
    std::vector<Rat>& out;
    std::int64_t range_lo;
    std::int64_t block_lo = 0;
    void begin_block(std::int64_t blo, std::int64_t) { block_lo = blo; }
    void factor(std::int64_t idx, std::int64_t p, int e) {
      out[static_cast<std::size_t>(block_lo - range_lo + idx)] *=
          f.at_prime_power(p, e);
    }
    void end_block(std::int64_t, std::int64_t) {}
  } vis{f, out, lo};
  factored_blocks(lo, hi, cfg, vis);
  return out;
}

}  // namespace modform::numthy
