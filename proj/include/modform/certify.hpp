#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modform/dimension.hpp"
#include "modform/numthy.hpp"

namespace modform::certify {

using dimension::Space;
using dimension::Weight;

// The two pinned constants of the multiplicative-bound lemma, kept exact:
// 2^omega(N) <= 4.862 N^{1/4} and pi_product(N) <= 9.930 N^{1/32} for all N.
numthy::Rat omega_bound_coeff();  // 4862/1000
numthy::Rat pi_bound_coeff();     // 9930/1000

// Certified lower-bound curve for dimensions:
//   Full: (2k-1)/12 N           - 1/2 4.862 N^{3/4} - 5/6 4.862 N^{1/4}
//   New : (2k-1)/12 N^{31/32}/9.930 - 1/2 N^{1/2}   - 5/6 4.862 N^{1/4} - 1
// increasing for N >= monotonicity_threshold (240000 / 4000).
struct BoundSpec {
  Space kind;
  Weight k;
  BoundSpec(Space kind_, Weight k_) : kind(kind_), k(k_) {}
};

std::int64_t monotonicity_threshold(Space s);

// Directed evaluations with exact integer root bounds: bound_lower never
// exceeds the true curve value, bound_upper never undercuts it.
numthy::Rat bound_lower(const BoundSpec& spec, std::int64_t level);
numthy::Rat bound_upper(const BoundSpec& spec, std::int64_t level);

// Re-establishes that the curve is increasing for N >= threshold (slope
// domination at the threshold, checked with the k=1 slope so the result
// holds for every k); returns the threshold, throws VerificationError.
std::int64_t verify_monotone(const BoundSpec& spec);

// Re-establishes the multiplicative-bound lemma: (a) exact product
// inequalities over the primes up to 13, (b) the crossover checks at the
// prime 17 (larger primes only help, both sides being monotone), and
// (c) an exact spot check of both inequalities for every N <= spot_limit.
void verify_mult_bound_constants(std::int64_t spot_limit = 1'000'000);

struct Options {
  std::int64_t limit = 20'000'000;  // scan ceiling
  int threads = 1;
  std::int64_t block_size = std::int64_t{1} << 18;
  dimension::ScanOptions scan_options() const {
    dimension::ScanOptions o;
    o.sieve.block_size = block_size;
    o.threads = threads;
    return o;
  }
};

// Least N >= threshold with bound_lower(N) > target; ResourceError if no
// such N <= limit. Exact minimum: the conservative upper evaluation is used
// to discard prefixes, and the remaining indeterminate band is walked
// linearly.
std::int64_t least_level_with_bound_above(const BoundSpec& spec,
                                          const numthy::Rat& target,
                                          std::int64_t limit);

// A machine-checkable record that `omitted` is not a dimension of the given
// space at any level: levels 1..scan_bound were checked exhaustively
// (digested as scan_count plus an FNV-1a checksum of the dimension stream),
// and bound_lower(scan_bound) > omitted with the curve increasing past the
// threshold, so no higher level can attain it either.
struct OmissionCertificate {
  Space kind;
  int k;
  std::uint64_t omitted;
  std::int64_t scan_bound;
  std::int64_t threshold;
  std::int64_t scan_count;
  std::uint64_t checksum;
  std::string tool_version;
};

// candidate = nullopt scans for the least value never attained; when the
// (space, k) pair has a shipped reproduction target the result is asserted
// against it.
OmissionCertificate find_omission(Space s, Weight k,
                                  std::optional<std::uint64_t> candidate,
                                  const Options& opt = {});

// Full from-scratch revalidation; throws VerificationError on any mismatch.
void replay(const OmissionCertificate& cert, const Options& opt = {});

std::string certificate_to_json(const OmissionCertificate& cert);
OmissionCertificate certificate_from_json(const std::string& text);

// Exhaustive table of (N, k) with dimension zero, terminated in the level
// direction by the certified bound and in the weight direction by an exact
// per-level envelope.
struct ZeroTable {
  Space kind;
  std::vector<std::pair<std::int64_t, int>> pairs;  // ascending (N, k)
  std::int64_t level_bound;  // no zeros at any level beyond this, any k
  std::int64_t threshold;
  std::vector<std::int64_t> levels() const;  // distinct N, ascending
};

ZeroTable zero_pairs(Space s, const Options& opt = {});

// Shipped reproduction targets for the least omitted value by (space, k).
const std::map<std::pair<Space, int>, std::uint64_t>& known_omitted_values();

}  // namespace modform::certify
