#include "modform/verify.hpp"

#include <mpfr.h>

#include <chrono>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "modform/certify.hpp"
#include "modform/common.hpp"
#include "modform/dimension.hpp"
#include "modform/numthy.hpp"
#include "modform/sequence.hpp"
#include "modform/signpattern.hpp"

namespace modform::verify {

namespace {

using dimension::Space;
using dimension::Weight;
using numthy::Rat;
using numthy::rat;

struct SkipCheck {
  std::string reason;
};

template <typename F>
CheckResult timed(std::string name, F&& body) {
  CheckResult r;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.detail = body();
    r.status = Status::Pass;
  } catch (const SkipCheck& s) {
    r.status = Status::Skip;
    r.detail = s.reason;
  } catch (const std::exception& e) {
    r.status = Status::Fail;
    r.detail = e.what();
  }
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return r;
}

std::string join_i64(const std::vector<std::int64_t>& v) {
  std::string out;
  for (const auto x : v) {
    if (!out.empty()) out += ',';
    out += std::to_string(x);
  }
  return out;
}

// ---- omitted-value reproduction -------------------------------------------

std::string check_omitted(Space space, const std::vector<int>& ks,
                          const std::vector<std::uint64_t>& expect,
                          const Options& opt) {
  certify::Options copt;
  copt.threads = opt.threads;
  std::string got;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto cert =
        certify::find_omission(space, Weight(ks[i]), std::nullopt, copt);
    if (cert.omitted != expect[i])
      throw VerificationError("k=" + std::to_string(ks[i]) + ": expected " +
                              std::to_string(expect[i]) + ", scan found " +
                              std::to_string(cert.omitted));
    certify::replay(cert, copt);
    if (!got.empty()) got += ',';
    got += std::to_string(cert.omitted);
  }
  std::string note = opt.quick ? " (weight-2 scan skipped: quick mode)" : "";
  return "omitted values " + got + "; every certificate replayed" + note;
}

// ---- 200-bit interval enclosure of the bound curves ------------------------

class MpfrValue {
 public:
  MpfrValue() { mpfr_init2(x_, 200); }
  ~MpfrValue() { mpfr_clear(x_); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;
  mpfr_ptr get() { return x_; }

 private:
  mpfr_t x_;
};

// One directed 200-bit evaluation of the bound curve; rounding `down` gives
// a value <= the exact curve, otherwise >=.  Mirrors the same expression the
// exact-rational path evaluates, through an independent numeric route.
void bound_directed(const certify::BoundSpec& spec, std::int64_t level,
                    bool down, mpfr_ptr acc) {
  const mpfr_rnd_t to = down ? MPFR_RNDD : MPFR_RNDU;
  const mpfr_rnd_t away = down ? MPFR_RNDU : MPFR_RNDD;
  MpfrValue n_, root_, term_;
  mpfr_ptr n = n_.get(), root = root_.get(), term = term_.get();
  mpfr_set_si(n, level, MPFR_RNDN);  // exact at 200 bits

  const Rat tail = rat(2431, 600);
  if (spec.kind == Space::Full) {
    const Rat s = rat(2 * spec.k.k - 1, 12);
    mpfr_set_q(acc, s.get_mpq_t(), to);
    mpfr_mul(acc, acc, n, to);
    // 2431/1000 * n^{3/4}, rounded away from the accumulator's direction.
    mpfr_rootn_ui(root, n, 4, away);
    mpfr_pow_ui(term, root, 3, away);
    const Rat mid = rat(2431, 1000);
    MpfrValue c_;
    mpfr_set_q(c_.get(), mid.get_mpq_t(), away);
    mpfr_mul(term, term, c_.get(), away);
    mpfr_sub(acc, acc, term, to);
    // 2431/600 * n^{1/4}
    mpfr_set_q(c_.get(), tail.get_mpq_t(), away);
    mpfr_mul(term, root, c_.get(), away);
    mpfr_sub(acc, acc, term, to);
    return;
  }
  const Rat s = rat(2 * spec.k.k - 1, 12) / certify::pi_bound_coeff();
  // s * n^{31/32}, rounded with the accumulator.
  mpfr_rootn_ui(root, n, 32, to);
  mpfr_pow_ui(term, root, 31, to);
  mpfr_set_q(acc, s.get_mpq_t(), to);
  mpfr_mul(acc, acc, term, to);
  // n^{1/2} / 2
  mpfr_sqrt(root, n, away);
  mpfr_div_ui(term, root, 2, away);
  mpfr_sub(acc, acc, term, to);
  // 2431/600 * n^{1/4} and the constant 1
  mpfr_rootn_ui(root, n, 4, away);
  MpfrValue c_;
  mpfr_set_q(c_.get(), tail.get_mpq_t(), away);
  mpfr_mul(term, root, c_.get(), away);
  mpfr_sub(acc, acc, term, to);
  mpfr_sub_ui(acc, acc, 1, to);
}

void check_bound_soundness_at(const certify::BoundSpec& spec,
                              std::int64_t level) {
  const Rat lo = certify::bound_lower(spec, level);
  const Rat hi = certify::bound_upper(spec, level);
  if (!(lo <= hi))
    throw VerificationError("bound_lower exceeds bound_upper at level " +
                            std::to_string(level));
  MpfrValue enc_lo, enc_hi;
  bound_directed(spec, level, /*down=*/true, enc_lo.get());
  bound_directed(spec, level, /*down=*/false, enc_hi.get());
  const auto where = [&] {
    return " at level " + std::to_string(level) + " (space " +
           std::string(dimension::space_name(spec.kind)) +
           ", k=" + std::to_string(spec.k.k) + ")";
  };
  if (lo == hi) {
    // The rational path claims the curve value exactly (every root came out
    // an integer). The claim must sit inside the enclosure; a wrong claim
    // would be off by at least the reciprocal of its small denominator,
    // far more than the 2^-170-ish enclosure width.
    if (mpfr_cmp_q(enc_lo.get(), lo.get_mpq_t()) > 0 ||
        mpfr_cmp_q(enc_hi.get(), lo.get_mpq_t()) < 0)
      throw VerificationError(
          "exact bound value falls outside the 200-bit enclosure" + where());
    return;
  }
  // Genuine rounding happened, which keeps the rational endpoints at least
  // ~1/1000 away from the curve -- far outside the enclosure. Soundness is
  // then conclusive: bound_lower <= enc_lo <= exact and likewise above.
  if (mpfr_cmp_q(enc_lo.get(), lo.get_mpq_t()) < 0)
    throw VerificationError("bound_lower is above the 200-bit enclosure" +
                            where());
  if (mpfr_cmp_q(enc_hi.get(), hi.get_mpq_t()) > 0)
    throw VerificationError("bound_upper is below the 200-bit enclosure" +
                            where());
}

// ---- sign-pattern expectations ---------------------------------------------

const std::vector<std::int64_t>& table1_all_sigma_levels() {
  static const std::vector<std::int64_t> v = {1,  2,  3,  5,  6,  7,  10, 14, 15,
                                              21, 26, 30, 42, 66, 70, 78, 210};
  return v;
}

const std::set<std::pair<std::int64_t, std::string>>& table1_sporadic() {
  static const std::set<std::pair<std::int64_t, std::string>> s = {
      {11, "+"},    {22, "++"},   {22, "-+"},   {22, "+-"},   {33, "-+"},
      {34, "++"},   {34, "+-"},   {38, "++"},   {38, "-+"},   {102, "+++"},
      {102, "--+"}, {102, "+--"}, {102, "---"}, {110, "+++"}, {110, "--+"},
      {110, "-+-"}, {110, "+--"}, {114, "+++"}, {114, "+-+"}, {114, "--+"},
      {114, "++-"}, {114, "-+-"}, {114, "+--"}, {330, "+-++"}, {330, "--++"},
      {330, "+--+"}, {330, "---+"}, {330, "+-+-"}, {330, "--+-"},
      {330, "+---"}};
  return s;
}

std::int64_t closed_form_up(int k) {
  return std::int64_t{k} - 1 + (k % 2 == 0 ? 1 : -1) + (k == 1 ? 1 : 0);
}
std::int64_t closed_form_straight(int k) { return std::int64_t{k} - 1; }
std::int64_t closed_form_down(int k) {
  return std::int64_t{k} - 1 - (k % 2 == 0 ? 1 : -1);
}

std::string check_sigma_fixtures() {
  using namespace signpattern;
  const TraceSet& fx = builtin_fixtures();

  const auto cls = classify_sigma(Space::Full, fx);
  int fixture_verdicts = 0;
  for (const auto& v : cls.verdicts) {
    if (v.level == 1) continue;
    ++fixture_verdicts;
    if (!v.hits_all)
      throw VerificationError("eigenspace sequence at (" +
                              std::to_string(v.level) + "," +
                              v.sigma.to_string() + ") misses " +
                              std::to_string(v.least_missing));
  }
  if (fixture_verdicts != 10)
    throw VerificationError("expected 10 eigenspace verdicts, got " +
                            std::to_string(fixture_verdicts));

  const std::vector<std::tuple<std::int64_t, std::string, std::int64_t (*)(int)>>
      forms = {{11, "+", closed_form_up},
               {11, "-", closed_form_down},
               {14, "++", closed_form_up},
               {14, "+-", closed_form_down},
               {14, "-+", closed_form_straight},
               {14, "--", closed_form_straight},
               {15, "++", closed_form_up},
               {15, "+-", closed_form_down},
               {15, "-+", closed_form_straight},
               {15, "--", closed_form_straight}};
  for (const auto& [n, s, f] : forms) {
    const auto fact = numthy::factorize(n);
    const auto sigma = SignPattern::parse(s);
    for (int k = 1; k <= 100; ++k)
      if (dim_sigma(fact, Weight(k), sigma, Space::Full, fx.table(n)) != f(k))
        throw VerificationError("eigenspace sequence at (" + std::to_string(n) +
                                "," + s + ") departs from its closed form at k=" +
                                std::to_string(k));
    const std::int64_t psi =
        numthy::rat_to_int64(numthy::eval(numthy::fns::psi(), fact));
    const auto form = sequence::extract_form(
        [&](int k) {
          return dim_sigma(fact, Weight(k), sigma, Space::Full, fx.table(n));
        },
        2 * psi, std::int64_t{1} << fact.omega());
    if (!sequence::exactly_once(form))
      throw VerificationError("eigenspace sequence at (" + std::to_string(n) +
                              "," + s + ") is not a bijection onto the naturals");
  }
  for (const std::int64_t n :
       {std::int64_t{11}, std::int64_t{14}, std::int64_t{15}})
    if (sequence::multiset_density(numthy::factorize(n), Space::Full, true) !=
        rat(1))
      throw VerificationError("sign-refined density at level " +
                              std::to_string(n) + " is not 1");
  return "10 eigenspace sequences match their closed forms to k=100, each a "
         "bijection; refined densities are exactly 1";
}

std::string check_table1(const Options& opt) {
  using namespace signpattern;
  if (!opt.traces)
    throw SkipCheck{
        "needs externally computed involution traces for the 34 candidate "
        "levels; pass a trace file to enable"};
  const TraceSet set = load_traces(*opt.traces);
  if (set.kind() != Space::New)
    throw VerificationError("trace file " + opt.traces->string() +
                            " is kind=" +
                            std::string(dimension::space_name(set.kind())) +
                            "; new-space tables are required");
  const auto cls = classify_sigma(Space::New, set);
  if (!cls.missing_levels.empty())
    throw SkipCheck{"trace file lacks levels " + join_i64(cls.missing_levels) +
                    "; cannot decide the full table"};
  const auto all_sigma = cls.all_sigma_levels();
  if (all_sigma != table1_all_sigma_levels())
    throw VerificationError("all-pattern levels came out {" +
                            join_i64(all_sigma) + "}");
  std::set<std::pair<std::int64_t, std::string>> sporadic;
  for (const auto& [n, sigma] : cls.sporadic_pairs())
    sporadic.emplace(n, sigma.to_string());
  if (sporadic != table1_sporadic()) {
    std::string diff;
    for (const auto& [n, s] : sporadic)
      if (table1_sporadic().count({n, s}) == 0)
        diff += " +(" + std::to_string(n) + "," + s + ")";
    for (const auto& [n, s] : table1_sporadic())
      if (sporadic.count({n, s}) == 0)
        diff += " -(" + std::to_string(n) + "," + s + ")";
    throw VerificationError("sporadic pairs differ:" + diff);
  }
  return "17 all-pattern levels and 30 sporadic pairs reproduced from " +
         opt.traces->string();
}

// ---- the always-runnable property suite ------------------------------------

std::string check_properties(const Options& opt) {
  // Newspace dimensions: direct evaluation agrees with the divisor
  // convolution for every level up to 2000 and weight index up to 20.
  for (std::int64_t n = 1; n <= 2000; ++n) {
    const auto fact = numthy::factorize(n);
    for (int k = 1; k <= 20; ++k)
      if (dimension::dim_new_direct(fact, Weight(k)) !=
          dimension::dim_new_convolved(fact, Weight(k)))
        throw VerificationError("newspace convolution identity fails at (" +
                                std::to_string(n) + ", k=" +
                                std::to_string(k) + ")");
  }

  std::mt19937_64 rng(0x5eed1e5);

  // Multiplicativity of the arithmetic building blocks on random coprime
  // pairs.
  {
    const numthy::MultiplicativeFunction* fns[] = {
        &numthy::fns::psi(),     &numthy::fns::psi_new(),
        &numthy::fns::nu_inf(),  &numthy::fns::nu_inf_new(),
        &numthy::fns::nu2(),     &numthy::fns::nu2_new(),
        &numthy::fns::nu3(),     &numthy::fns::nu3_new(),
        &numthy::fns::mu(),      &numthy::fns::beta(),
        &numthy::fns::pi_product()};
    std::uniform_int_distribution<std::int64_t> dist(1, 100000);
    int done = 0;
    while (done < 200) {
      const std::int64_t m = dist(rng), n = dist(rng);
      if (std::gcd(m, n) != 1) continue;
      ++done;
      const auto fm = numthy::factorize(m), fn = numthy::factorize(n),
                 fmn = numthy::factorize(m * n);
      for (const auto* f : fns)
        if (numthy::eval(*f, fmn) != numthy::eval(*f, fm) * numthy::eval(*f, fn))
          throw VerificationError(f->name() + "(" + std::to_string(m) + "*" +
                                  std::to_string(n) +
                                  ") breaks multiplicativity");
    }
  }

  // Directed rounding in the certified bounds never crosses the exact curve:
  // compare against an independent 200-bit interval evaluation.
  {
    std::uniform_int_distribution<int> kdist(1, 50);
    std::uniform_int_distribution<int> bits(0, 40);
    std::uniform_int_distribution<int> space_dist(0, 1);
    for (int i = 0; i < 10000; ++i) {
      const Space s = space_dist(rng) == 0 ? Space::Full : Space::New;
      const std::int64_t level =
          1 + static_cast<std::int64_t>(rng() &
                                        ((std::uint64_t{1} << bits(rng)) - 1));
      check_bound_soundness_at(certify::BoundSpec{s, Weight(kdist(rng))},
                               level);
    }
  }

  // The two multiplicative coefficient inequalities, spot-checked level by
  // level up to a million on top of the closed-form worst-case argument.
  certify::verify_mult_bound_constants(1000000);

  // Constructive surjectivity witnesses at every level whose sequence hits
  // all naturals.
  {
    std::vector<sequence::PeriodicLinearForm> forms;
    for (const auto n : sequence::classify_weight(Space::Full))
      forms.push_back(sequence::form_for_space(Space::Full, numthy::factorize(n)));
    for (const auto n : sequence::classify_weight(Space::New))
      forms.push_back(sequence::form_for_space(Space::New, numthy::factorize(n)));
    std::uniform_int_distribution<std::int64_t> ndist(0, 1000000);
    std::uniform_int_distribution<std::size_t> fdist(0, forms.size() - 1);
    for (int i = 0; i < 1000; ++i) {
      const auto& form = forms[fdist(rng)];
      const std::int64_t value = ndist(rng);
      const std::int64_t k = sequence::witness_index(form, value);
      if (sequence::evaluate(form, k) != value)
        throw VerificationError("witness construction failed for value " +
                                std::to_string(value));
    }
  }

  // Involution traces survive the round trip through eigenspace dimensions.
  {
    using namespace signpattern;
    const TraceSet& fx = builtin_fixtures();
    for (const std::int64_t n :
         {std::int64_t{11}, std::int64_t{14}, std::int64_t{15}}) {
      const auto fact = numthy::factorize(n);
      SigmaDims dims;
      for (const auto& sigma : enumerate_patterns(fact)) {
        auto& seq = dims[sigma];
        for (int k = 1; k <= 30; ++k)
          seq.push_back(
              dim_sigma(fact, Weight(k), sigma, Space::Full, fx.table(n)));
      }
      if (!(invert_traces(fact, Space::Full, dims) == fx.table(n)))
        throw VerificationError("trace round trip changed the table at level " +
                                std::to_string(n));
    }
  }

  (void)opt;
  return "convolution identity to N=2000; multiplicativity on 200 coprime "
         "pairs; 10000 interval-checked bound points; divisor inequalities "
         "to N=10^6; 1000 surjectivity witnesses; trace round trip";
}

}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass:
      return "PASS";
    case Status::Fail:
      return "FAIL";
    case Status::Skip:
      return "SKIP";
  }
  return "?";
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (r.status == Status::Fail) return false;
  return true;
}

std::vector<CheckResult> run_all(const Options& opt) {
  std::vector<CheckResult> out;

  out.push_back(timed("omitted-full", [&] {
    const std::vector<int> ks =
        opt.quick ? std::vector<int>{2, 3, 4, 5, 7} : std::vector<int>{1, 2, 3, 4, 5, 7};
    const std::vector<std::uint64_t> expect =
        opt.quick ? std::vector<std::uint64_t>{23, 2, 4, 4, 1}
                  : std::vector<std::uint64_t>{150, 23, 2, 4, 4, 1};
    return check_omitted(Space::Full, ks, expect, opt);
  }));

  out.push_back(timed("omitted-new", [&] {
    const std::vector<int> ks = opt.quick ? std::vector<int>{2, 3, 4, 5, 6, 7}
                                          : std::vector<int>{1, 2, 3, 4, 5, 6, 7};
    const std::vector<std::uint64_t> expect =
        opt.quick ? std::vector<std::uint64_t>{101, 31, 16, 19, 7, 4}
                  : std::vector<std::uint64_t>{67846, 101, 31, 16, 19, 7, 4};
    return check_omitted(Space::New, ks, expect, opt);
  }));

  out.push_back(timed("zero-tables", [&] {
    certify::Options copt;
    copt.threads = opt.threads;
    const std::vector<std::int64_t> full_expect = {1, 2, 3,  4,  5,  6,  7, 8,
                                                   9, 10, 12, 13, 16, 18, 25};
    const std::vector<std::int64_t> new_expect = {1,  2,  3,  4,  5,  6,
                                                  7,  8,  9,  10, 12, 13,
                                                  16, 18, 22, 25, 28, 60};
    const auto full = certify::zero_pairs(Space::Full, copt);
    if (full.levels() != full_expect)
      throw VerificationError("full-space zero levels came out {" +
                              join_i64(full.levels()) + "}");
    const auto fresh = certify::zero_pairs(Space::New, copt);
    if (fresh.levels() != new_expect)
      throw VerificationError("new-space zero levels came out {" +
                              join_i64(fresh.levels()) + "}");
    return std::string(
        "levels admitting a zero dimension: 15 (full) and 18 (new), "
        "certified complete");
  }));

  out.push_back(timed("weight-classification", [&] {
    const std::vector<std::int64_t> full_expect = {1, 2, 3, 4};
    const std::vector<std::int64_t> new_expect = {1, 2, 3, 4, 8, 12, 16, 18};
    if (sequence::classify_weight(Space::Full) != full_expect)
      throw VerificationError("full-space weight classification differs");
    if (sequence::classify_weight(Space::New) != new_expect)
      throw VerificationError("new-space weight classification differs");
    return std::string("surjective levels: {1,2,3,4} full, "
                       "{1,2,3,4,8,12,16,18} new");
  }));

  out.push_back(timed("density-prefilters", [&] {
    const std::vector<std::int64_t> full_expect = {1, 2, 3, 5, 6, 7, 10, 11, 14, 15};
    const std::vector<std::int64_t> new_expect = {
        1,  2,  3,  5,  6,  7,  10, 11, 13,  14,  15,  21,  22,  26,  30,  33, 34,
        35, 38, 39, 42, 46, 66, 70, 78, 102, 105, 110, 114, 130, 138, 210, 330, 390};
    if (sequence::density_prefilter(Space::Full) != full_expect)
      throw VerificationError("full-space density prefilter differs");
    if (sequence::density_prefilter(Space::New) != new_expect)
      throw VerificationError("new-space density prefilter differs");
    return std::string(
        "10 full-space and 34 new-space candidate levels, cutoffs certified");
  }));

  out.push_back(timed("sigma-fixtures", [] { return check_sigma_fixtures(); }));

  out.push_back(timed("table1-sigma-new", [&] { return check_table1(opt); }));

  out.push_back(timed("property-suite", [&] { return check_properties(opt); }));

  return out;
}

}  // namespace modform::verify
