#pragma once

// Sign-refined subspaces of the cusp-form spaces: each squarefree level N
// splits under the commuting involutions W_p (p | N) into 2^omega(N) joint
// eigenspaces, one per choice of signs.  Their dimensions come out of a
// divisor sum over involution traces; the traces themselves are data (either
// derived here from known dimension sequences by character orthogonality, or
// ingested from a user-supplied table).

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modform/common.hpp"
#include "modform/dimension.hpp"
#include "modform/numthy.hpp"

namespace modform::signpattern {

// A sign for each prime dividing a squarefree level, listed by ascending
// prime.  The empty pattern is the unique pattern for level 1.  Extends
// multiplicatively to all divisors of the level.
class SignPattern {
 public:
  SignPattern() = default;

  // "++-" etc.; "." or "" denotes the empty pattern.
  static SignPattern parse(std::string_view text);

  // All 2^omega(n) patterns for a squarefree level, lexicographic with
  // '+' ordered before '-'.
  static std::vector<SignPattern> enumerate(const numthy::Factorization& n);

  int size() const { return static_cast<int>(signs_.size()); }

  // Sign attached to the i-th prime of the level (ascending), as +1 / -1.
  int sign_at(int i) const;

  // Multiplicative extension: the product of the signs of the primes of d,
  // where d is a divisor of `level`.  The pattern length must match
  // omega(level).
  int value_on(const numthy::Factorization& level,
               const numthy::Factorization& d) const;

  std::string to_string() const;  // "" for the empty pattern

  friend bool operator==(const SignPattern& a, const SignPattern& b) {
    return a.signs_ == b.signs_;
  }
  friend bool operator!=(const SignPattern& a, const SignPattern& b) {
    return !(a == b);
  }
  friend bool operator<(const SignPattern& a, const SignPattern& b) {
    return a.signs_ < b.signs_;  // '+' stored as 0: lexicographic, + first
  }

 private:
  std::vector<std::uint8_t> signs_;  // 0 = '+', 1 = '-'
};

enum class Provenance { Derived, Ingested };

// Trace of one involution W_d as a function of the weight index k: an
// explicit value at k = 1 (the trace formula is aberrant there) and a
// 12-periodic row valid for all k >= 2, stored by k mod 12.
struct TraceRow {
  std::int64_t value_k1 = 0;
  std::array<std::int64_t, 12> periodic{};  // index k % 12
  Provenance provenance = Provenance::Derived;

  std::int64_t at(std::int64_t k) const;

  friend bool operator==(const TraceRow& a, const TraceRow& b) {
    return a.value_k1 == b.value_k1 && a.periodic == b.periodic;
  }
};

// All involution traces for one (level, space) pair: one row per divisor
// d | N, d != 1.  The d = 1 term of the divisor sum is the plain dimension
// and is never stored.
class TraceTable {
 public:
  TraceTable(dimension::Space kind, std::int64_t level);

  dimension::Space kind() const { return kind_; }
  std::int64_t level() const { return level_; }

  void set_row(std::int64_t d, TraceRow row);  // d | level, d != 1
  bool has_row(std::int64_t d) const;
  const TraceRow& row(std::int64_t d) const;  // DataError when absent

  // True when a row is present for every divisor d != 1 of the level.
  bool complete() const;

  const std::map<std::int64_t, TraceRow>& rows() const { return rows_; }

  friend bool operator==(const TraceTable& a, const TraceTable& b) {
    return a.kind_ == b.kind_ && a.level_ == b.level_ && a.rows_ == b.rows_;
  }

 private:
  dimension::Space kind_;
  std::int64_t level_;
  std::map<std::int64_t, TraceRow> rows_;
};

// A collection of trace tables of one kind, keyed by level.  Level 1 (whose
// table has no rows) is always present so that the empty sign pattern needs
// no special casing anywhere.
class TraceSet {
 public:
  explicit TraceSet(dimension::Space kind);

  dimension::Space kind() const { return kind_; }
  bool contains(std::int64_t level) const;
  const TraceTable& table(std::int64_t level) const;  // DataError when absent
  void add(TraceTable t);  // DataError on kind mismatch or duplicate level
  std::vector<std::int64_t> levels() const;  // ascending, includes 1

 private:
  dimension::Space kind_;
  std::map<std::int64_t, TraceTable> tables_;
};

std::vector<SignPattern> enumerate_patterns(const numthy::Factorization& n);

// dim of the sigma-eigenspace at weight 2k: 2^{-omega} * sum over d | N of
// sigma(d) * (trace of W_d), the d = 1 term being the plain dimension.
// Throws DataError when a needed trace row is missing or when the sum fails
// the divisibility / nonnegativity sanity checks.
std::int64_t dim_sigma(const numthy::Factorization& n, dimension::Weight k,
                       const SignPattern& sigma, dimension::Space kind,
                       const TraceTable& traces);

// Dimension sequences per pattern, indexed [k-1] for k = 1..window.
using SigmaDims = std::map<SignPattern, std::vector<std::int64_t>>;

// Exact inverse of the divisor sum by character orthogonality:
// Tr W_d(k) = sum over sigma of sigma(d) * dim^sigma(k).  Requires all 2^omega
// patterns over a window of at least 25 weights; asserts that the pattern sum
// matches the plain dimension, that every derived row is 12-periodic from
// k = 2 on, and that the result reproduces the inputs bit-exactly.
TraceTable invert_traces(const numthy::Factorization& n, dimension::Space kind,
                         const SigmaDims& dims);

// Trace tables derivable from the known closed-form eigenspace sequences:
// full-space levels 11, 14 and 15 (plus the trivial level 1).
const TraceSet& builtin_fixtures();

// Line-oriented table file: header "#modform-traces v1 kind=<full|new>",
// then per row "N<TAB>d<TAB>v1<TAB>p2<TAB>...<TAB>p13" (the k = 1 value and
// the twelve periodic values for k = 2..13).  '#' starts a comment.  The
// loader enforces every table invariant, including integrality and
// nonnegativity of all resulting eigenspace dimensions for k <= 25.
TraceSet load_traces(std::istream& in);
TraceSet load_traces(const std::filesystem::path& path);
void save_traces(const TraceSet& set, std::ostream& out);
void save_traces(const TraceSet& set, const std::filesystem::path& path);

struct SigmaVerdict {
  std::int64_t level = 0;
  SignPattern sigma;
  bool hits_all = false;
  std::int64_t least_missing = -1;  // meaningful when !hits_all
};

struct SigmaClassification {
  std::vector<SigmaVerdict> verdicts;         // by (level, pattern)
  std::vector<std::int64_t> missing_levels;   // candidates lacking trace data

  // Candidate levels where every pattern hits all naturals.
  std::vector<std::int64_t> all_sigma_levels() const;
  // Verdict-true pairs at levels that are not all-sigma.
  std::vector<std::pair<std::int64_t, SignPattern>> sporadic_pairs() const;
};

// For every candidate level from the density prefilter (and each of its sign
// patterns): extract the weight-indexed linear form of the eigenspace
// dimension sequence and test whether it attains every natural number.
// Levels without trace data are reported, not fatal.
SigmaClassification classify_sigma(dimension::Space kind,
                                   const TraceSet& traces);

}  // namespace modform::signpattern
