#include "modform/dimension.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace modform::dimension {

using numthy::Factorization;
using numthy::Rat;
using numthy::rat;

std::string space_name(Space s) { return s == Space::Full ? "full" : "new"; }

Space space_from_name(const std::string& s) {
  if (s == "full") return Space::Full;
  if (s == "new") return Space::New;
  throw UsageError("space must be 'full' or 'new'");
}

Rat c2(Weight w) {
  const int k = w.k;
  return rat(4 * (k / 2) - (2 * k - 1), 4);  // floor(2k/4) - (2k-1)/4
}

Rat c3(Weight w) {
  const int k = w.k;
  return rat(3 * ((2 * k) / 3) - (2 * k - 1), 3);  // floor(2k/3) - (2k-1)/3
}

namespace {

// The assembled value must have denominator dividing 12 before it collapses
// to an integer; a violation means the term functions are broken.
void check_denominator(const Rat& r) {
  if (!numthy::is_integer(Rat(numthy::Int(12) * r)))
    throw InternalError("dimension term with denominator not dividing 12");
}

std::int64_t finish_dim(const Rat& total, const char* what) {
  check_denominator(total);
  if (!numthy::is_integer(total))
    throw InternalError(std::string(what) + ": non-integral dimension");
  if (total < 0) throw InternalError(std::string(what) + ": negative dimension");
  return numthy::rat_to_int64(total);
}

}  // namespace

std::int64_t dim_full(const Factorization& level, Weight w) {
  using namespace numthy::fns;
  const int k = w.k;
  Rat total = rat(2 * k - 1, 12) * eval(psi(), level);
  total -= rat(1, 2) * eval(nu_inf(), level);
  total += c2(w) * eval(nu2(), level);
  total += c3(w) * eval(nu3(), level);
  if (k == 1) total += 1;
  return finish_dim(total, "dim_full");
}

std::int64_t dim_new_direct(const Factorization& level, Weight w) {
  using namespace numthy::fns;
  const int k = w.k;
  Rat total = rat(2 * k - 1, 12) * eval(psi_new(), level);
  total -= rat(1, 2) * eval(nu_inf_new(), level);
  total += c2(w) * eval(nu2_new(), level);
  total += c3(w) * eval(nu3_new(), level);
  if (k == 1) total += eval(mu(), level);
  return finish_dim(total, "dim_new_direct");
}

std::int64_t dim_new_convolved(const Factorization& level, Weight w) {
  using namespace numthy::fns;
  Rat total = 0;
  for (const auto& m : numthy::divisors(level)) {
    const auto cof = numthy::complement_divisor(level, m);
    total += eval(beta(), cof) * Rat(static_cast<long>(dim_full(m, w)));
  }
  return finish_dim(total, "dim_new_convolved");
}

std::int64_t dim_space(Space s, const Factorization& level, Weight w) {
  return s == Space::Full ? dim_full(level, w) : dim_new_direct(level, w);
}

// ---- streaming scans -------------------------------------------------

namespace {

constexpr std::int64_t kScanLevelCap = std::int64_t{1} << 40;
constexpr int kScanWeightCap = 1'000'000;

std::int64_t ipow(std::int64_t p, int e) {
  std::int64_t v = 1;
  while (e-- > 0) v *= p;
  return v;
}

// Integer prime-power rules, mirroring numthy::fns (tested for agreement).
// With levels capped at 2^40 every value below stays under 2^41.
std::int64_t psi_pp(std::int64_t p, int e, bool is_new) {
  if (!is_new) {
    const std::int64_t pe = ipow(p, e);
    return pe + pe / p;
  }
  if (e == 1) return p - 1;
  if (e == 2) return p * p - p - 1;
  return (p * p - 1) * (p - 1) * ipow(p, e - 3);
}

std::int64_t nu_inf_pp(std::int64_t p, int e, bool is_new) {
  if (!is_new) {
    if (e % 2 == 1) return 2 * ipow(p, (e - 1) / 2);
    return (p + 1) * ipow(p, e / 2 - 1);
  }
  if (e % 2 == 1) return 0;
  if (e == 2) return p - 2;
  return (p - 1) * (p - 1) * ipow(p, e / 2 - 2);
}

std::int64_t nu2_pp(std::int64_t p, int e, bool is_new) {
  if (!is_new) {
    if (p == 2) return e == 1 ? 1 : 0;
    return p % 4 == 1 ? 2 : 0;
  }
  if (p == 2) return e <= 2 ? -1 : (e == 3 ? 1 : 0);
  if (p % 4 == 1) return e == 2 ? -1 : 0;
  return e == 1 ? -2 : (e == 2 ? 1 : 0);
}

std::int64_t nu3_pp(std::int64_t p, int e, bool is_new) {
  if (!is_new) {
    if (p == 3) return e == 1 ? 1 : 0;
    return p % 3 == 1 ? 2 : 0;
  }
  if (p == 3) return e <= 2 ? -1 : (e == 3 ? 1 : 0);
  if (p % 3 == 1) return e == 2 ? -1 : 0;
  return e == 1 ? -2 : (e == 2 ? 1 : 0);
}

struct TermVisitor {
  bool is_new;
  std::vector<LevelTerms>& out;
  void begin_block(std::int64_t, std::int64_t len) {
    out.assign(static_cast<std::size_t>(len), LevelTerms{1, 1, 1, 1, 1});
  }
  void factor(std::int64_t idx, std::int64_t p, int e) {
    auto& t = out[static_cast<std::size_t>(idx)];
    t.psi *= psi_pp(p, e, is_new);
    t.nu_inf *= nu_inf_pp(p, e, is_new);
    t.nu2 *= nu2_pp(p, e, is_new);
    t.nu3 *= nu3_pp(p, e, is_new);
    if (is_new) t.mu = e == 1 ? -t.mu : 0;
  }
  void end_block(std::int64_t, std::int64_t) {}
};

void compute_term_block(Space s, std::int64_t blo, std::int64_t bhi,
                        std::vector<LevelTerms>& out) {
  TermVisitor vis{s == Space::New, out};
  numthy::SieveConfig cfg;
  cfg.block_size = bhi - blo + 1;
  numthy::factored_blocks(blo, bhi, cfg, vis);
}

}  // namespace

std::int64_t assemble_dim(Space s, Weight w, const LevelTerms& t) {
  const int k = w.k;
  const std::int64_t t2 = (k % 2 == 1) ? -3 : 3;                      // 12*c2
  const std::int64_t t3 = (k % 3 == 1) ? -4 : (k % 3 == 2 ? 0 : 4);   // 12*c3
  __int128 num = static_cast<__int128>(2 * k - 1) * t.psi;
  num -= static_cast<__int128>(6) * t.nu_inf;
  num += static_cast<__int128>(t2) * t.nu2;
  num += static_cast<__int128>(t3) * t.nu3;
  if (k == 1) num += static_cast<__int128>(12) * (s == Space::New ? t.mu : 1);
  if (num < 0 || num % 12 != 0)
    throw InternalError("assemble_dim: non-integral or negative dimension");
  const __int128 d = num / 12;
  if (d > std::numeric_limits<std::int64_t>::max())
    throw ResourceError("assemble_dim: dimension exceeds 64 bits");
  return static_cast<std::int64_t>(d);
}

void scan_level_terms(Space s, std::int64_t lo, std::int64_t hi,
                      const ScanOptions& opt, const TermSink& sink) {
  if (lo < 1 || hi < lo) throw UsageError("scan_level_terms: need 1 <= lo <= hi");
  if (hi > kScanLevelCap) throw ResourceError("scan_level_terms: range too large");
  const std::int64_t bs = std::max<std::int64_t>(1, opt.sieve.block_size);
  const std::int64_t nblocks = (hi - lo) / bs + 1;
  const auto block_range = [&](std::int64_t b) {
    const std::int64_t blo = lo + b * bs;
    return std::pair{blo, std::min(hi, blo + bs - 1)};
  };

  const int threads = static_cast<int>(
      std::min<std::int64_t>(std::max(1, opt.threads), nblocks));
  if (threads <= 1) {
    std::vector<LevelTerms> buf;
    for (std::int64_t b = 0; b < nblocks; ++b) {
      auto [blo, bhi] = block_range(b);
      compute_term_block(s, blo, bhi, buf);
      sink(blo, std::span<const LevelTerms>(buf.data(), buf.size()));
    }
    return;
  }

  // Workers fill blocks out of order; this thread emits them in order. The
  // producers stay at most a small window ahead of the consumer so memory is
  // bounded by window * block_size.
  std::mutex mu;
  std::condition_variable cv_space, cv_ready;
  std::map<std::int64_t, std::vector<LevelTerms>> ready;
  std::atomic<std::int64_t> next{0};
  std::int64_t emit = 0;
  const std::int64_t window = threads + 2;
  std::exception_ptr err;

  auto worker = [&] {
    for (;;) {
      const std::int64_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      {
        std::unique_lock lk(mu);
        cv_space.wait(lk, [&] { return err != nullptr || b < emit + window; });
        if (err) return;
      }
      std::vector<LevelTerms> buf;
      try {
        auto [blo, bhi] = block_range(b);
        compute_term_block(s, blo, bhi, buf);
      } catch (...) {
        std::lock_guard lk(mu);
        if (!err) err = std::current_exception();
        cv_ready.notify_all();
        cv_space.notify_all();
        return;
      }
      std::lock_guard lk(mu);
      ready.emplace(b, std::move(buf));
      cv_ready.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);

  {
    std::unique_lock lk(mu);
    while (emit < nblocks) {
      cv_ready.wait(lk, [&] { return err != nullptr || ready.count(emit) > 0; });
      if (err) break;
      auto buf = std::move(ready.at(emit));
      ready.erase(emit);
      lk.unlock();
      try {
        sink(block_range(emit).first,
             std::span<const LevelTerms>(buf.data(), buf.size()));
      } catch (...) {
        lk.lock();
        if (!err) err = std::current_exception();
        cv_space.notify_all();
        break;
      }
      lk.lock();
      ++emit;
      cv_space.notify_all();
    }
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

void scan_dims(Space s, Weight k, std::int64_t lo, std::int64_t hi,
               const ScanOptions& opt, const DimSink& sink) {
  if (k.k > kScanWeightCap) throw ResourceError("scan_dims: weight too large");
  std::vector<std::int64_t> dims;
  scan_level_terms(s, lo, hi, opt,
                   [&](std::int64_t blo, std::span<const LevelTerms> terms) {
                     dims.resize(terms.size());
                     for (std::size_t i = 0; i < terms.size(); ++i)
                       dims[i] = assemble_dim(s, k, terms[i]);
                     sink(blo, std::span<const std::int64_t>(dims.data(),
                                                             dims.size()));
                   });
}

}  // namespace modform::dimension
