#include "modform/sequence.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "modform/common.hpp"

namespace modform::sequence {

using numthy::Int;
using numthy::rat;

PeriodicLinearForm extract_form(const WeightSequence& seq, std::int64_t a,
                                std::int64_t b) {
  if (a < 1 || b < 1) throw UsageError("form parameters must be positive");
  PeriodicLinearForm f;
  f.a = a;
  f.b = b;
  const Rat slope = rat(a, 12 * b);
  const auto term = [&](std::int64_t k) {
    const std::int64_t v = seq(static_cast<int>(k));
    if (v < 0) throw UsageError("sequence not of lemma form: negative term");
    return v;
  };
  f.first_term = term(1);
  for (std::int64_t k = 2; k <= 13; ++k)
    f.c[static_cast<std::size_t>(k % 12)] = rat(term(k)) - slope * k;
  for (std::int64_t k = 2; k <= 25 + 24 * b; ++k) {
    const Rat v = slope * k + f.c[static_cast<std::size_t>(k % 12)];
    if (!numthy::is_integer(v) || v < 0 || numthy::rat_to_int64(v) != term(k))
      throw UsageError(
          "sequence not of lemma form: term at k=" + std::to_string(k) +
          " breaks the 12-periodic linear shape for the given (a, b)");
  }
  return f;
}

PeriodicLinearForm form_for_space(Space s, const numthy::Factorization& level) {
  const auto& scale =
      s == Space::Full ? numthy::fns::psi() : numthy::fns::psi_new();
  const std::int64_t a = 2 * numthy::rat_to_int64(numthy::eval(scale, level));
  return extract_form(
      [&](int k) { return dimension::dim_space(s, level, Weight(k)); }, a, 1);
}

std::int64_t evaluate(const PeriodicLinearForm& f, std::int64_t k) {
  if (k < 1) throw UsageError("form index must be positive");
  if (k == 1) return f.first_term;
  const Rat v =
      rat(f.a, 12 * f.b) * k + f.c[static_cast<std::size_t>(k % 12)];
  if (!numthy::is_integer(v) || v < 0)
    throw InternalError("form value at k=" + std::to_string(k) +
                        " is not a natural number");
  return numthy::rat_to_int64(v);
}

Coverage hits_all_naturals(const PeriodicLinearForm& f) {
  Coverage cov;
  cov.cover.assign(static_cast<std::size_t>(2 * f.a), 0);
  for (std::int64_t k = 1; k <= 24 * f.b + 1; ++k) {
    const std::int64_t v = evaluate(f, k);
    if (v < 2 * f.a && cov.cover[static_cast<std::size_t>(v)] == 0)
      cov.cover[static_cast<std::size_t>(v)] = k;
  }
  cov.least_missing = -1;
  for (std::size_t v = 0; v < cov.cover.size(); ++v)
    if (cov.cover[v] == 0) {
      cov.least_missing = static_cast<std::int64_t>(v);
      break;
    }
  cov.hits_all = cov.least_missing < 0;
  return cov;
}

std::int64_t witness_index(const PeriodicLinearForm& f, std::int64_t n) {
  if (n < 0) throw UsageError("witness target must be a natural number");
  const Coverage cov = hits_all_naturals(f);
  if (!cov.hits_all)
    throw UsageError("form does not attain every natural number");
  std::int64_t k;
  if (n < 2 * f.a) {
    k = cov.cover[static_cast<std::size_t>(n)];
  } else {
    // Shift a covering witness by whole periods. The base index must be >= 2
    // (the k = 1 term sits outside the form); the residues r and r + a cannot
    // both be covered only by k = 1, so one of the two works.
    const std::int64_t r = n % f.a;
    std::int64_t base = cov.cover[static_cast<std::size_t>(r + f.a)];
    std::int64_t value = r + f.a;
    if (base < 2) {
      base = cov.cover[static_cast<std::size_t>(r)];
      value = r;
    }
    if (base < 2) throw InternalError("no shiftable witness for residue class");
    k = base + 12 * f.b * ((n - value) / f.a);
  }
  if (evaluate(f, k) != n)
    throw InternalError("witness construction failed verification");
  return k;
}

bool exactly_once(const PeriodicLinearForm& f) {
  const Coverage cov = hits_all_naturals(f);
  if (!cov.hits_all) return false;
  if (f.a != 12 * f.b) return false;  // slope != 1 loses by pigeonhole

  // Values one period apart differ by exactly a, so collisions at large
  // index distance would force two values in a single 12b-window to differ
  // by at least 2a; rule that out first.
  const std::int64_t w = 12 * f.b;
  std::vector<std::int64_t> vals;
  for (std::int64_t k = 2; k <= 24 * f.b + 13; ++k)
    vals.push_back(evaluate(f, k));
  for (std::size_t s = 0; s + static_cast<std::size_t>(w) <= vals.size(); ++s) {
    const auto [mn, mx] =
        std::minmax_element(vals.begin() + static_cast<std::ptrdiff_t>(s),
                            vals.begin() + static_cast<std::ptrdiff_t>(s) + w);
    if (*mx - *mn >= 2 * f.a)
      throw VerificationError(
          "finite exactly-once criterion inapplicable: window spread reaches "
          "twice the period increment");
  }

  // Any collision between indices >= 2 translates by whole periods until the
  // smaller index lies in [2, 12b+1]; the spread bound then caps the partner
  // at two periods further out, so this window is exhaustive.
  std::set<std::int64_t> seen;
  for (std::int64_t k = 2; k <= 48 * f.b + 13; ++k)
    if (!seen.insert(evaluate(f, k)).second) return false;

  // The k = 1 term: values at k >= 2 grow by a per period, so a duplicate of
  // first_term can only appear in a bounded prefix.
  const std::int64_t kmax = w * (f.first_term / f.a + 2) + 13;
  for (std::int64_t k = 2; k <= kmax; ++k)
    if (evaluate(f, k) == f.first_term) return false;
  return true;
}

Rat multiset_density(const numthy::Factorization& level, Space kind,
                     bool sign_refined) {
  if (sign_refined && !level.is_squarefree())
    throw UsageError("sign-refined densities need a squarefree level");
  const auto& scale =
      kind == Space::Full ? numthy::fns::psi() : numthy::fns::psi_new();
  const Int denom = numthy::eval(scale, level).get_num();  // integral
  const std::int64_t num =
      sign_refined ? 6 * (std::int64_t{1} << level.omega()) : 6;
  return rat(Int(static_cast<long>(num)), denom);
}

std::vector<std::int64_t> density_prefilter(Space kind) {
  // The tail argument leans on the two multiplicative coefficient bounds;
  // re-establish them first (constants and crossover only, no spot loop).
  certify::verify_mult_bound_constants(0);

  std::int64_t cutoff;
  if (kind == Space::Full) {
    // psi(N) >= N (each local factor p^r + p^{r-1} >= p^r), so the density
    // is at most 6 * 4.862 N^{1/4} / N = 29.172 N^{-3/4}, which is < 1 once
    // N^3 10^12 > 29172^4; the left side is increasing, so one check at
    // cutoff+1 closes the tail.
    cutoff = 89;
    if (!(numthy::pow_int(cutoff + 1, 3) * numthy::pow_int(10, 12) >
          numthy::pow_int(29172, 4)))
      throw VerificationError("full-space density tail bound fails");
  } else {
    // psi'(N) pi(N) >= N holds factor by factor: at r = 1,
    // (p-1) p^2 >= p (p^2-p-1) reduces to p^2-p >= p^2-p-1; at r = 2 the
    // product is exactly p^2; at r >= 3 the numerator (p^2-1)(p-1) exceeds
    // p(p^2-p-1) by 1. Hence the density is at most
    // 6 * 4.862 * 9.930 N^{1/4 + 1/32} / N = 289.67796 N^{-23/32}, and
    // N^23 10^160 > 28967796^32 closes the tail (left side increasing).
    cutoff = 3000;
    if (!(numthy::pow_int(cutoff + 1, 23) * numthy::pow_int(10, 160) >
          numthy::pow_int(28967796, 32)))
      throw VerificationError("new-space density tail bound fails");
  }

  std::vector<std::int64_t> out;
  for (std::int64_t n = 1; n <= cutoff; ++n) {
    const auto level = numthy::factorize(n);
    if (!level.is_squarefree()) continue;
    if (multiset_density(level, kind, /*sign_refined=*/true) >= 1)
      out.push_back(n);
  }
  return out;
}

std::vector<std::int64_t> classify_weight(Space kind) {
  // Hitting every natural number forces the plain multiset density 6/psi
  // (6/psi' for the new space) to be at least 1: the first x+1 naturals need
  // at least x+1 terms below x+1. For the full space psi(N) >= N kills every
  // N > 6 outright. For the new space, psi'(N) >= N^{31/32}/9.930 (the pi
  // bound, re-established below), and 101^31 100^32 > 5958^32 shows
  // psi' > 6 for every N > 100; the left side grows with N.
  std::int64_t cutoff;
  if (kind == Space::Full) {
    cutoff = 6;
  } else {
    certify::verify_mult_bound_constants(0);
    cutoff = 100;
    if (!(numthy::pow_int(cutoff + 1, 31) * numthy::pow_int(100, 32) >
          numthy::pow_int(5958, 32)))
      throw VerificationError("weight classification tail bound fails");
  }

  std::vector<std::int64_t> out;
  for (std::int64_t n = 1; n <= cutoff; ++n)
    if (hits_all_naturals(form_for_space(kind, numthy::factorize(n))).hits_all)
      out.push_back(n);
  return out;
}

Rat empirical_set_density(Space s, Weight k, std::int64_t x,
                          const certify::Options& opt) {
  if (x < 1) throw UsageError("density horizon must be positive");
  if (x > (std::int64_t{1} << 31))
    throw ResourceError("density horizon implies an oversized value table");
  const certify::BoundSpec spec(s, k);
  certify::verify_monotone(spec);
  const std::int64_t n0 =
      certify::least_level_with_bound_above(spec, rat(x), opt.limit);
  std::vector<bool> attained(static_cast<std::size_t>(x) + 1, false);
  dimension::scan_dims(
      s, k, 1, n0, opt.scan_options(),
      [&](std::int64_t, std::span<const std::int64_t> dims) {
        for (const std::int64_t v : dims)
          if (v <= x) attained[static_cast<std::size_t>(v)] = true;
      });
  std::int64_t count = 0;
  for (const bool hit : attained) count += hit ? 1 : 0;
  return rat(count, x);
}

}  // namespace modform::sequence
