#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "modform/certify.hpp"
#include "modform/dimension.hpp"
#include "modform/numthy.hpp"

namespace modform::sequence {

using dimension::Space;
using dimension::Weight;
using numthy::Rat;

// Weight-indexed dimension sequences are, from the second term on, a linear
// function of k with slope a/(12b) plus a 12-periodic rational correction;
// the k = 1 term absorbs the weight-2 aberration. The slope is stored as the
// pair (a, b) unreduced, because the surjectivity window lengths below are
// phrased in terms of these parameters.
struct PeriodicLinearForm {
  std::int64_t a;
  std::int64_t b;
  std::array<Rat, 12> c;  // indexed by k mod 12, valid for k >= 2
  std::int64_t first_term;
};

using WeightSequence = std::function<std::int64_t(int k)>;

// Fits the c-table on k in [2, 13] and verifies the form reproduces the
// sequence exactly on k in [2, 25+24b] (two full periods), every term a
// nonnegative integer. Throws UsageError("sequence not of lemma form") when
// the supplied (a, b) do not match the sequence.
PeriodicLinearForm extract_form(const WeightSequence& seq, std::int64_t a,
                                std::int64_t b);

// The plain weight sequence k -> dim of the given space at a fixed level,
// with the canonical parameters a = 2 psi(N) (psi' for the new space), b = 1.
PeriodicLinearForm form_for_space(Space s, const numthy::Factorization& level);

std::int64_t evaluate(const PeriodicLinearForm& f, std::int64_t k);

// Finite surjectivity criterion: the sequence attains every natural number
// iff its first 24b+1 terms cover [0, 2a).
struct Coverage {
  bool hits_all;
  std::int64_t least_missing;       // least uncovered value in [0,2a); -1 if none
  std::vector<std::int64_t> cover;  // value -> least witness k in [1, 24b+1]; 0 = none
};
Coverage hits_all_naturals(const PeriodicLinearForm& f);

// For a form that hits every natural: a concrete index k with alpha_k = n,
// built by shifting a witness from the covering window by whole periods
// (alpha_{k+12tb} = alpha_k + ta) and re-verified by direct evaluation.
std::int64_t witness_index(const PeriodicLinearForm& f, std::int64_t n);

// True iff the sequence attains every natural number exactly once. Finite
// decision: surjectivity, slope exactly 1 (a = 12b), a window-spread bound
// that caps how far apart colliding indices can sit, then distinctness over
// the resulting finite window. Throws VerificationError if the spread bound
// fails (criterion inapplicable; never guesses).
bool exactly_once(const PeriodicLinearForm& f);

// Exact density of the dimension multiset: 6 2^omega(N) / psi(N) for
// sign-refined subspaces (psi' for the new space), 6 / psi(N) without the
// sign refinement. Sign-refined densities require squarefree N.
Rat multiset_density(const numthy::Factorization& level, Space kind,
                     bool sign_refined);

// All squarefree N whose sign-refined density is >= 1, with a certified
// terminating cutoff (density < 1 beyond it, via the multiplicative bounds).
std::vector<std::int64_t> density_prefilter(Space kind);

// All levels whose plain weight sequence attains every natural number.
// Surjectivity forces the multiset density 6/psi (6/psi' for the new space)
// to be >= 1, which certifiably fails beyond a small cutoff; the survivors
// are decided by the finite criterion.
std::vector<std::int64_t> classify_weight(Space kind);

// #({dim values} ∩ [0, x]) / x with the attained-value set collected from a
// scan certified complete for values <= x: levels are scanned up to the
// least N where the conservative lower bound exceeds x.
Rat empirical_set_density(Space s, Weight k, std::int64_t x,
                          const certify::Options& opt = {});

}  // namespace modform::sequence
