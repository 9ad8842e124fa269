#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "modform/numthy.hpp"
#include "modform/sieve.hpp"

namespace modform::dimension {

enum class Space { Full, New };

std::string space_name(Space s);
Space space_from_name(const std::string& s);

// Weights are always even; we carry k with the actual weight being 2k.
struct Weight {
  int k;
  explicit Weight(int k_) : k(k_) {
    if (k_ < 1) throw UsageError("weight index k must be >= 1");
  }
  static Weight from_2k(int weight2k) {
    if (weight2k < 2 || weight2k % 2 != 0)
      throw UsageError("weight must be a positive even integer");
    return Weight(weight2k / 2);
  }
};

// Elliptic-term coefficients. c2 is -1/4 for odd k and +1/4 for even k;
// c3 cycles -1/3, 0, +1/3 as k runs through 1, 2, 0 mod 3.
numthy::Rat c2(Weight k);
numthy::Rat c3(Weight k);

// Exact dimensions (cusp spaces of weight 2k). Both routes for the new
// space are kept separate on purpose: the direct evaluation and the
// convolution against the full space must agree everywhere.
std::int64_t dim_full(const numthy::Factorization& level, Weight k);
std::int64_t dim_new_direct(const numthy::Factorization& level, Weight k);
std::int64_t dim_new_convolved(const numthy::Factorization& level, Weight k);
std::int64_t dim_space(Space s, const numthy::Factorization& level, Weight k);

// ---- streaming scans -------------------------------------------------
//
// The per-level values of the five term functions, as plain 64-bit
// integers (the shipped term functions are integer-valued; the range guard
// in the scanner keeps every product far away from overflow). For the full
// space mu is left at 1 and unused.
struct LevelTerms {
  std::int64_t psi;
  std::int64_t nu_inf;
  std::int64_t nu2;
  std::int64_t nu3;
  std::int64_t mu;
};

struct ScanOptions {
  numthy::SieveConfig sieve;
  int threads = 1;
  ScanOptions() { sieve.block_size = std::int64_t{1} << 18; }
};

using TermSink =
    std::function<void(std::int64_t block_lo, std::span<const LevelTerms>)>;
using DimSink =
    std::function<void(std::int64_t block_lo, std::span<const std::int64_t>)>;

// Both scans hand blocks to the sink in ascending level order no matter how
// many worker threads compute them, so any fold over the stream is
// reproducible independent of the thread count.
void scan_level_terms(Space s, std::int64_t lo, std::int64_t hi,
                      const ScanOptions& opt, const TermSink& sink);
void scan_dims(Space s, Weight k, std::int64_t lo, std::int64_t hi,
               const ScanOptions& opt, const DimSink& sink);

// Assembles a dimension from term values; integer arithmetic throughout
// (the formula times 12 is an integer combination), with the result checked
// integral and nonnegative.
std::int64_t assemble_dim(Space s, Weight k, const LevelTerms& t);

}  // namespace modform::dimension
