#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "modform/numthy.hpp"
#include "modform/sieve.hpp"
#include "testutil.hpp"

using namespace modform;
using namespace modform::numthy;

TEST_CASE("factorize basics") {
  CHECK(factorize(1).factors().empty());
  CHECK(factorize(1).value() == 1);

  auto f12 = factorize(12);
  REQUIRE(f12.factors().size() == 2);
  CHECK(f12.factors()[0] == PrimePower{2, 2});
  CHECK(f12.factors()[1] == PrimePower{3, 1});

  auto f210 = factorize(210);
  REQUIRE(f210.omega() == 4);
  CHECK(f210.is_squarefree());

  auto fp = factorize(1'000'003);  // prime
  REQUIRE(fp.omega() == 1);
  CHECK(fp.factors()[0].prime == 1'000'003);

  CHECK_THROWS_AS(factorize(0), UsageError);
  CHECK_THROWS_AS(factorize(-6), UsageError);
}

TEST_CASE("factorize round-trips against naive trial division") {
  auto gen = testutil::rng(0x5eed0001);
  std::uniform_int_distribution<std::int64_t> dist(1, 5'000'000);
  for (int i = 0; i < 300; ++i) {
    std::int64_t n = dist(gen);
    auto fs = factorize(n);
    CHECK(fs.value() == n);
    auto oracle = testutil::naive_factor(n);
    REQUIRE(fs.factors().size() == oracle.size());
    for (const auto& pp : fs.factors()) {
      REQUIRE(oracle.count(pp.prime) == 1);
      CHECK(oracle[pp.prime] == pp.exp);
    }
  }
}

TEST_CASE("shipped function values at selected points") {
  CHECK(eval(fns::psi(), factorize(1)) == 1);
  CHECK(eval(fns::psi(), factorize(11)) == 12);
  CHECK(eval(fns::psi(), factorize(4)) == 6);
  CHECK(eval(fns::psi(), factorize(15)) == 24);

  CHECK(eval(fns::psi_new(), factorize(11)) == 10);
  CHECK(eval(fns::psi_new(), factorize(4)) == 1);
  CHECK(eval(fns::psi_new(), factorize(8)) == 3 * 1);  // (4-1)(2-1)*2^0 = 3

  CHECK(eval(fns::nu_inf(), factorize(14)) == 4);
  CHECK(eval(fns::nu_inf(), factorize(4)) == 3);
  CHECK(eval(fns::nu_inf_new(), factorize(11)) == 0);
  CHECK(eval(fns::nu_inf_new(), factorize(9)) == 1);

  CHECK(eval(fns::nu2(), factorize(2)) == 1);
  CHECK(eval(fns::nu2(), factorize(5)) == 2);
  CHECK(eval(fns::nu2(), factorize(7)) == 0);
  CHECK(eval(fns::nu2_new(), factorize(22)) == 2);  // (-1)*(-2)
  CHECK(eval(fns::nu2_new(), factorize(4)) == -1);
  CHECK(eval(fns::nu2_new(), factorize(8)) == 1);

  CHECK(eval(fns::nu3(), factorize(3)) == 1);
  CHECK(eval(fns::nu3(), factorize(7)) == 2);
  CHECK(eval(fns::nu3_new(), factorize(9)) == -1);
  CHECK(eval(fns::nu3_new(), factorize(27)) == 1);

  CHECK(eval(fns::mu(), factorize(1)) == 1);
  CHECK(eval(fns::mu(), factorize(22)) == 1);
  CHECK(eval(fns::mu(), factorize(11)) == -1);
  CHECK(eval(fns::mu(), factorize(12)) == 0);

  CHECK(eval(fns::beta(), factorize(8)) == 0);
  CHECK(eval(fns::beta(), factorize(2)) == -2);
  CHECK(eval(fns::beta(), factorize(4)) == 1);
  CHECK(eval(fns::beta(), factorize(6)) == 4);

  CHECK(eval(fns::pi_product(), factorize(2)) == rat(4, 1));
  CHECK(eval(fns::pi_product(), factorize(3)) == rat(9, 5));
  CHECK(eval(fns::pi_product(), factorize(6)) == rat(36, 5));
  CHECK(eval(fns::pi_product(), factorize(9)) == rat(9, 5));
}

TEST_CASE("beta is the convolution inverse of the divisor count") {
  // sum_{d | p^r} beta(d) * sigma0(p^{r-j}) = [r == 0]
  for (std::int64_t p : {2, 3, 7}) {
    for (int r = 1; r <= 5; ++r) {
      Rat acc = 0;
      for (int j = 0; j <= r; ++j) {
        Rat b = j == 0 ? Rat(1) : fns::beta().at_prime_power(p, j);
        acc += b * Rat(r - j + 1);
      }
      CHECK(acc == 0);
    }
  }
}

TEST_CASE("beta divisor sums match direct enumeration, values in {-1,0,1,3}") {
  for (std::int64_t p : {2, 3, 5, 13}) {
    for (int r = 0; r <= 5; ++r) {
      // direct: enumerate divisors of p^r and sum beta
      Rat direct = 0;
      for (int j = 0; j <= r; ++j)
        direct += j == 0 ? Rat(1) : fns::beta().at_prime_power(p, j);
      std::int64_t pr = 1;
      for (int j = 0; j < r; ++j) pr *= p;
      Rat via_eval = 0;
      for (const auto& d : divisors(factorize(pr))) via_eval += eval(fns::beta(), d);
      CHECK(direct == via_eval);
      const auto v = rat_to_int64(direct);
      CHECK((v == -1 || v == 0 || v == 1 || v == 3));
    }
  }
}

TEST_CASE("multiplicativity on random coprime pairs") {
  const MultiplicativeFunction* all[] = {
      &fns::psi(),     &fns::psi_new(), &fns::nu_inf(), &fns::nu_inf_new(),
      &fns::nu2(),     &fns::nu2_new(), &fns::nu3(),    &fns::nu3_new(),
      &fns::mu(),      &fns::beta(),    &fns::pi_product()};
  auto gen = testutil::rng(0x5eed0002);
  std::uniform_int_distribution<std::int64_t> dist(1, 1000);
  int done = 0;
  while (done < 200) {
    std::int64_t m = dist(gen), n = dist(gen);
    if (testutil::naive_gcd(m, n) != 1) continue;
    ++done;
    auto fm = factorize(m), fn = factorize(n), fmn = factorize(m * n);
    for (const auto* f : all)
      CHECK(eval(*f, fmn) == eval(*f, fm) * eval(*f, fn));
  }
}

TEST_CASE("eval agrees with the naive oracle") {
  const MultiplicativeFunction* all[] = {
      &fns::psi(),     &fns::psi_new(), &fns::nu_inf(), &fns::nu_inf_new(),
      &fns::nu2(),     &fns::nu2_new(), &fns::nu3(),    &fns::nu3_new(),
      &fns::mu(),      &fns::beta(),    &fns::pi_product()};
  auto gen = testutil::rng(0x5eed0003);
  std::uniform_int_distribution<std::int64_t> dist(1, 2'000'000);
  for (int i = 0; i < 150; ++i) {
    std::int64_t n = dist(gen);
    auto fs = factorize(n);
    for (const auto* f : all) CHECK(eval(*f, fs) == testutil::naive_eval(*f, n));
  }
}

TEST_CASE("sieve_eval matches pointwise eval") {
  auto v = sieve_eval(fns::psi(), 1, 5);
  REQUIRE(v.size() == 5);
  CHECK(v[0] == 1);
  CHECK(v[1] == 3);
  CHECK(v[2] == 4);
  CHECK(v[3] == 6);
  CHECK(v[4] == 6);

  auto m = sieve_eval(fns::mu(), 1, 4);
  CHECK(m[0] == 1);
  CHECK(m[1] == -1);
  CHECK(m[2] == -1);
  CHECK(m[3] == 0);

  auto pn = sieve_eval(fns::psi_new(), 11, 11);
  CHECK(pn[0] == 10);

  // random blocks, forced multi-block processing
  SieveConfig tiny;
  tiny.block_size = 64;
  auto gen = testutil::rng(0x5eed0004);
  std::uniform_int_distribution<std::int64_t> dist(1, 3'000'000);
  const MultiplicativeFunction* all[] = {&fns::psi_new(), &fns::nu_inf_new(),
                                         &fns::nu2_new(), &fns::nu3_new(),
                                         &fns::mu()};
  for (int trial = 0; trial < 8; ++trial) {
    std::int64_t lo = dist(gen);
    std::int64_t hi = lo + 500;
    for (const auto* f : all) {
      auto block = sieve_eval(*f, lo, hi, tiny);
      for (std::int64_t n = lo; n <= hi; ++n)
        CHECK(block[static_cast<std::size_t>(n - lo)] == eval(*f, factorize(n)));
    }
  }
}

TEST_CASE("sieve_eval enforces the range budget") {
  SieveConfig cfg;
  cfg.max_range = 100;
  CHECK_THROWS_AS(sieve_eval(fns::psi(), 1, 101, cfg), ResourceError);
  CHECK_THROWS_AS(sieve_eval(fns::psi(), 0, 5), UsageError);
}

TEST_CASE("divisors") {
  auto d1 = divisors(factorize(1));
  REQUIRE(d1.size() == 1);
  CHECK(d1[0].value() == 1);

  auto d14 = divisors(factorize(14));
  REQUIRE(d14.size() == 4);
  CHECK(d14[0].value() == 1);
  CHECK(d14[1].value() == 2);
  CHECK(d14[2].value() == 7);
  CHECK(d14[3].value() == 14);

  auto d360 = divisors(factorize(360));
  CHECK(d360.size() == 24);
  CHECK(std::is_sorted(d360.begin(), d360.end(),
                       [](const auto& a, const auto& b) {
                         return a.value() < b.value();
                       }));
  for (const auto& d : d360) {
    CHECK(360 % d.value() == 0);
    CHECK(complement_divisor(factorize(360), d).value() == 360 / d.value());
  }
}

TEST_CASE("nth_root_bounds") {
  auto [l1, u1] = nth_root_bounds(16, 1, 2);
  CHECK(l1 == 4);
  CHECK(u1 == 4);

  auto [l2, u2] = nth_root_bounds(1'000'000, 3, 4);
  CHECK(l2 == 31622);
  CHECK(u2 == 31623);

  auto [l3, u3] = nth_root_bounds(0, 5, 3);
  CHECK(l3 == 0);
  CHECK(u3 == 0);

  CHECK_THROWS_AS(nth_root_bounds(4, 1, 0), UsageError);

  auto gen = testutil::rng(0x5eed0005);
  std::uniform_int_distribution<std::int64_t> ndist(1, 10'000'000);
  std::uniform_int_distribution<int> pdist(1, 6), qdist(1, 8);
  for (int i = 0; i < 300; ++i) {
    Int n = ndist(gen);
    auto p = static_cast<unsigned>(pdist(gen));
    auto q = static_cast<unsigned>(qdist(gen));
    auto [lo, hi] = nth_root_bounds(n, p, q);
    Int np, loq, hiq;
    mpz_pow_ui(np.get_mpz_t(), n.get_mpz_t(), p);
    mpz_pow_ui(loq.get_mpz_t(), lo.get_mpz_t(), q);
    mpz_pow_ui(hiq.get_mpz_t(), hi.get_mpz_t(), q);
    CHECK(loq <= np);
    CHECK(hiq >= np);
    CHECK((hi == lo || hi == lo + 1));
    if (hi == lo + 1) {
      CHECK(loq < np);
      CHECK(hiq > np);
    }
  }
}

TEST_CASE("scaled root bounds bracket the real root") {
  auto gen = testutil::rng(0x5eed0006);
  std::uniform_int_distribution<std::int64_t> ndist(1, 50'000'000);
  std::uniform_int_distribution<int> pdist(1, 31), qdist(1, 32), sdist(1, 8);
  for (int i = 0; i < 120; ++i) {
    Int n = ndist(gen);
    auto p = static_cast<unsigned>(pdist(gen));
    auto q = static_cast<unsigned>(qdist(gen));
    auto d = static_cast<unsigned>(sdist(gen));
    Rat lo = nth_root_lower(n, p, q, d);
    Rat hi = nth_root_upper(n, p, q, d);
    CHECK(lo <= hi);
    // lo^q <= n^p <= hi^q, all exact
    Rat loq = 1, hiq = 1;
    for (unsigned j = 0; j < q; ++j) {
      loq *= lo;
      hiq *= hi;
    }
    Int np;
    mpz_pow_ui(np.get_mpz_t(), n.get_mpz_t(), p);
    CHECK(loq <= Rat(np));
    CHECK(hiq >= Rat(np));
  }
}

TEST_CASE("primes_up_to and isqrt64") {
  auto ps = primes_up_to(30);
  std::vector<std::int64_t> expect = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  CHECK(ps == expect);
  CHECK(primes_up_to(1).empty());

  CHECK(isqrt64(0) == 0);
  CHECK(isqrt64(1) == 1);
  CHECK(isqrt64(3) == 1);
  CHECK(isqrt64(4) == 2);
  CHECK(isqrt64(24) == 4);
  CHECK(isqrt64(25) == 5);
  std::int64_t big = std::int64_t{3037000499};  // floor(sqrt(2^63 - 1))
  CHECK(isqrt64(std::numeric_limits<std::int64_t>::max()) == big);
}

TEST_CASE("rationals helpers") {
  CHECK(rat(6, 4) == rat(3, 2));
  CHECK(is_integer(rat(8, 4)));
  CHECK(!is_integer(rat(1, 3)));
  CHECK(rat_to_int64(rat(8, 4)) == 2);
  CHECK_THROWS_AS(rat_to_int64(rat(1, 3)), InternalError);
  CHECK_THROWS_AS(rat(1, 0), UsageError);
}
