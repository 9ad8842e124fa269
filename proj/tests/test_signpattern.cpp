#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "modform/signpattern.hpp"

using namespace modform;
using namespace modform::signpattern;
using modform::dimension::Space;
using modform::dimension::Weight;
using modform::numthy::factorize;

namespace {

std::int64_t dim_of(Space s, std::int64_t n, int k) {
  return dimension::dim_space(s, factorize(n), Weight(k));
}

std::int64_t up(int k) {
  return std::int64_t{k} - 1 + (k % 2 == 0 ? 1 : -1) + (k == 1 ? 1 : 0);
}
std::int64_t straight(int k) { return std::int64_t{k} - 1; }
std::int64_t down(int k) {
  return std::int64_t{k} - 1 - (k % 2 == 0 ? 1 : -1);
}

std::vector<std::string> pattern_strings(const std::vector<SignPattern>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.to_string());
  return out;
}

}  // namespace

TEST_CASE("sign pattern basics") {
  const auto one = enumerate_patterns(factorize(1));
  REQUIRE(one.size() == 1);
  CHECK(one[0].size() == 0);
  CHECK(one[0].to_string() == "");
  CHECK(SignPattern::parse("") == one[0]);
  CHECK(SignPattern::parse(".") == one[0]);

  CHECK(pattern_strings(enumerate_patterns(factorize(15))) ==
        std::vector<std::string>{"++", "+-", "-+", "--"});

  const auto thirty = enumerate_patterns(factorize(30));
  REQUIRE(thirty.size() == 8);
  CHECK(std::is_sorted(thirty.begin(), thirty.end()));
  const auto sigma = SignPattern::parse("-++");
  const auto n30 = factorize(30);
  CHECK(sigma.value_on(n30, factorize(1)) == 1);
  CHECK(sigma.value_on(n30, factorize(2)) == -1);
  CHECK(sigma.value_on(n30, factorize(3)) == 1);
  CHECK(sigma.value_on(n30, factorize(5)) == 1);
  CHECK(sigma.value_on(n30, factorize(6)) == -1);
  CHECK(sigma.value_on(n30, factorize(10)) == -1);
  CHECK(sigma.value_on(n30, factorize(15)) == 1);
  CHECK(sigma.value_on(n30, factorize(30)) == -1);

  CHECK_THROWS_AS(SignPattern::parse("+x"), UsageError);
  CHECK_THROWS_AS(enumerate_patterns(factorize(4)), UsageError);
  CHECK_THROWS_AS(sigma.value_on(factorize(15), factorize(3)), UsageError);
  CHECK_THROWS_AS(sigma.value_on(n30, factorize(7)), UsageError);
}

TEST_CASE("built-in tables reproduce the closed-form eigenspace sequences") {
  const TraceSet& fx = builtin_fixtures();
  CHECK(fx.kind() == Space::Full);
  CHECK(fx.levels() == std::vector<std::int64_t>{1, 11, 14, 15});

  // Spot values quoted for the individual eigenspaces.
  CHECK(dim_sigma(factorize(11), Weight(2), SignPattern::parse("+"),
                  Space::Full, fx.table(11)) == 2);
  CHECK(dim_sigma(factorize(15), Weight(1), SignPattern::parse("+-"),
                  Space::Full, fx.table(15)) == 1);
  CHECK(dim_sigma(factorize(14), Weight(5), SignPattern::parse("-+"),
                  Space::Full, fx.table(14)) == 4);

  // All ten sequences, first hundred weights.
  const std::vector<std::tuple<std::int64_t, std::string, std::int64_t (*)(int)>>
      expected = {
          {11, "+", up},        {11, "-", down},     {14, "++", up},
          {14, "+-", down},     {14, "-+", straight}, {14, "--", straight},
          {15, "++", up},       {15, "+-", down},    {15, "-+", straight},
          {15, "--", straight},
      };
  for (const auto& [n, s, f] : expected) {
    const auto fact = factorize(n);
    const auto sigma = SignPattern::parse(s);
    for (int k = 1; k <= 100; ++k)
      CHECK(dim_sigma(fact, Weight(k), sigma, Space::Full, fx.table(n)) ==
            f(k));
  }

  // Direct sum: the eigenspace dimensions add up to the whole space.
  for (const std::int64_t n : {std::int64_t{1}, std::int64_t{11},
                               std::int64_t{14}, std::int64_t{15}}) {
    const auto fact = factorize(n);
    for (int k = 1; k <= 100; ++k) {
      std::int64_t total = 0;
      for (const auto& sigma : enumerate_patterns(fact))
        total += dim_sigma(fact, Weight(k), sigma, Space::Full, fx.table(n));
      CHECK(total == dim_of(Space::Full, n, k));
    }
  }
}

TEST_CASE("derived trace rows") {
  const TraceSet& fx = builtin_fixtures();

  const auto& w11 = fx.table(11).row(11);
  CHECK(w11.value_k1 == -1);
  for (std::int64_t k = 2; k <= 13; ++k)
    CHECK(w11.at(k) == (k % 2 == 0 ? 2 : -2));

  const auto& t14 = fx.table(14);
  CHECK(t14.row(2).at(1) == 1);
  for (std::int64_t k = 2; k <= 25; ++k) CHECK(t14.row(2).at(k) == 0);
  for (const std::int64_t d : {std::int64_t{7}, std::int64_t{14}}) {
    CHECK(t14.row(d).at(1) == -1);
    for (std::int64_t k = 2; k <= 25; ++k)
      CHECK(t14.row(d).at(k) == (k % 2 == 0 ? 2 : -2));
  }

  const auto& t15 = fx.table(15);
  CHECK(t15.row(3).at(1) == 1);
  for (std::int64_t k = 2; k <= 25; ++k) CHECK(t15.row(3).at(k) == 0);
  for (const std::int64_t d : {std::int64_t{5}, std::int64_t{15}}) {
    CHECK(t15.row(d).at(1) == -1);
    for (std::int64_t k = 2; k <= 25; ++k)
      CHECK(t15.row(d).at(k) == (k % 2 == 0 ? 2 : -2));
  }

  CHECK(w11.provenance == Provenance::Derived);

  // Errors: missing rows and mismatched tables.
  TraceTable partial(Space::Full, 15);
  partial.set_row(3, t15.row(3));
  CHECK_FALSE(partial.complete());
  CHECK_THROWS_WITH_AS(
      dim_sigma(factorize(15), Weight(2), SignPattern::parse("++"),
                Space::Full, partial),
      "trace data unavailable for (15,5)", DataError);
  CHECK_THROWS_AS(dim_sigma(factorize(14), Weight(2),
                            SignPattern::parse("++"), Space::Full,
                            fx.table(15)),
                  UsageError);
  CHECK_THROWS_AS(dim_sigma(factorize(15), Weight(2),
                            SignPattern::parse("++"), Space::New,
                            fx.table(15)),
                  UsageError);
  CHECK_THROWS_AS(dim_sigma(factorize(15), Weight(2), SignPattern::parse("+"),
                            Space::Full, fx.table(15)),
                  UsageError);
}

TEST_CASE("trace inversion round trip and input validation") {
  const TraceSet& fx = builtin_fixtures();
  for (const std::int64_t n :
       {std::int64_t{11}, std::int64_t{14}, std::int64_t{15}}) {
    const auto fact = factorize(n);
    SigmaDims dims;
    for (const auto& sigma : enumerate_patterns(fact)) {
      auto& seq = dims[sigma];
      for (int k = 1; k <= 30; ++k)
        seq.push_back(
            dim_sigma(fact, Weight(k), sigma, Space::Full, fx.table(n)));
    }
    CHECK(invert_traces(fact, Space::Full, dims) == fx.table(n));
  }

  const auto seq_of = [](std::int64_t (*f)(int), int hi) {
    std::vector<std::int64_t> v;
    for (int k = 1; k <= hi; ++k) v.push_back(f(k));
    return v;
  };

  // Sum failing to match the full dimension.
  {
    SigmaDims dims;
    dims[SignPattern::parse("+")] = seq_of(up, 30);
    dims[SignPattern::parse("-")] = seq_of(down, 30);
    dims[SignPattern::parse("+")][4] += 1;
    CHECK_THROWS_AS(invert_traces(factorize(11), Space::Full, dims),
                    DataError);
  }
  // Sum fine but the implied trace row is not 12-periodic.
  {
    SigmaDims dims;
    dims[SignPattern::parse("+")] = seq_of(up, 30);
    dims[SignPattern::parse("-")] = seq_of(down, 30);
    dims[SignPattern::parse("+")][4] += 1;
    dims[SignPattern::parse("-")][4] -= 1;
    CHECK_THROWS_AS(invert_traces(factorize(11), Space::Full, dims),
                    DataError);
  }
  // Missing pattern or too-short window.
  {
    SigmaDims dims;
    dims[SignPattern::parse("+")] = seq_of(up, 30);
    CHECK_THROWS_AS(invert_traces(factorize(11), Space::Full, dims),
                    UsageError);
    dims[SignPattern::parse("-")] = seq_of(down, 20);
    CHECK_THROWS_AS(invert_traces(factorize(11), Space::Full, dims),
                    UsageError);
  }
}

TEST_CASE("trace file round trip") {
  const TraceSet& fx = builtin_fixtures();
  std::ostringstream out;
  save_traces(fx, out);
  const std::string text = out.str();
  CHECK(text.rfind("#modform-traces v1 kind=full\n", 0) == 0);

  std::istringstream in(text);
  const TraceSet loaded = load_traces(in);
  CHECK(loaded.kind() == Space::Full);
  CHECK(loaded.levels() == std::vector<std::int64_t>{1, 11, 14, 15});
  for (const std::int64_t n :
       {std::int64_t{11}, std::int64_t{14}, std::int64_t{15}})
    CHECK(loaded.table(n) == fx.table(n));
  CHECK(loaded.table(11).row(11).provenance == Provenance::Ingested);

  // Determinism: saving the loaded set reproduces the bytes.
  std::ostringstream again;
  save_traces(loaded, again);
  CHECK(again.str() == text);

  // CRLF input is tolerated.
  std::string crlf = text;
  std::size_t pos = 0;
  while ((pos = crlf.find('\n', pos)) != std::string::npos) {
    crlf.replace(pos, 1, "\r\n");
    pos += 2;
  }
  std::istringstream crlf_in(crlf);
  CHECK(load_traces(crlf_in).table(14) == fx.table(14));
}

TEST_CASE("trace file validation") {
  const auto load_text = [](const std::string& text) {
    std::istringstream in(text);
    return load_traces(in);
  };
  const std::string header = "#modform-traces v1 kind=full\n";

  CHECK_THROWS_AS(load_text(""), DataError);
  CHECK_THROWS_AS(load_text("#modform-traces v2 kind=full\n"), DataError);
  CHECK_THROWS_AS(load_text("#modform-traces v1 kind=bogus\n"), DataError);

  // A consistent one-row table for level 11: value -1 at k=1, then 2(-1)^k.
  const std::string good11 =
      header + "11\t11\t-1\t2\t-2\t2\t-2\t2\t-2\t2\t-2\t2\t-2\t2\t-2\n";
  CHECK(load_text(good11).table(11).row(11).at(4) == 2);

  // Structural rejections.
  CHECK_THROWS_AS(load_text(header + "11\t11\t-1\t2\n"), DataError);
  CHECK_THROWS_AS(
      load_text(header +
                "11\t11\t-1\t2\t-2\t2\t-2\t2\t-2\t2\t-2\t2\t-2\t2\tx\n"),
      DataError);
  CHECK_THROWS_AS(
      load_text(header +
                "12\t3\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\n"),
      DataError);  // level not squarefree
  CHECK_THROWS_AS(
      load_text(header +
                "11\t3\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\n"),
      DataError);  // d does not divide the level
  CHECK_THROWS_AS(
      load_text(header +
                "11\t1\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\n"),
      DataError);  // d = 1 is never stored
  CHECK_THROWS_AS(load_text(good11 + good11.substr(header.size())),
                  DataError);  // duplicate row
  {
    // Drop one divisor of 15: incomplete table.
    std::ostringstream out;
    save_traces(builtin_fixtures(), out);
    std::string text = out.str();
    const auto row = text.find("15\t5");
    REQUIRE(row != std::string::npos);
    text.erase(row, text.find('\n', row) - row + 1);
    CHECK_THROWS_AS(load_text(text), DataError);
  }

  // Consistency rejections: parity broken (non-integral dimension) and
  // valid parity but a negative eigenspace dimension.
  CHECK_THROWS_AS(
      load_text(header +
                "11\t11\t0\t1\t1\t1\t1\t1\t1\t1\t1\t1\t1\t1\t1\n"),
      DataError);
  CHECK_THROWS_AS(
      load_text(
          header +
          "11\t11\t101\t100\t100\t100\t100\t100\t100\t100\t100\t100\t100\t100\t100\n"),
      DataError);
}

TEST_CASE("classification over the candidate levels") {
  const auto full = classify_sigma(Space::Full, builtin_fixtures());
  CHECK(full.missing_levels ==
        std::vector<std::int64_t>{2, 3, 5, 6, 7, 10});
  REQUIRE(full.verdicts.size() == 11);  // 1 + 2 + 4 + 4 patterns
  for (const auto& v : full.verdicts) CHECK(v.hits_all);
  CHECK(full.all_sigma_levels() ==
        std::vector<std::int64_t>{1, 11, 14, 15});
  CHECK(full.sporadic_pairs().empty());

  // Without any new-space trace data only level 1 is classifiable.
  const auto fresh = classify_sigma(Space::New, TraceSet(Space::New));
  REQUIRE(fresh.verdicts.size() == 1);
  CHECK(fresh.verdicts[0].level == 1);
  CHECK(fresh.verdicts[0].hits_all);
  CHECK(fresh.missing_levels.size() == 33);
  CHECK(fresh.all_sigma_levels() == std::vector<std::int64_t>{1});

  CHECK_THROWS_AS(classify_sigma(Space::New, builtin_fixtures()), UsageError);
}

TEST_CASE("ingested table for a level outside the built-ins") {
  // A synthetic but consistent single-prime table: the trace of W_13 is the
  // parity of the plain dimension, making both eigenspace dimensions the
  // floor and ceiling halves.
  std::string text = "#modform-traces v1 kind=full\n";
  {
    std::string row = "13\t13";
    row += '\t' + std::to_string(dim_of(Space::Full, 13, 1) % 2);
    for (int j = 2; j <= 13; ++j)
      row += '\t' + std::to_string(dim_of(Space::Full, 13, j) % 2);
    text += row + '\n';
  }
  std::istringstream in(text);
  const TraceSet set = load_traces(in);
  const auto fact = factorize(13);
  for (int k = 1; k <= 50; ++k) {
    const std::int64_t d = dim_of(Space::Full, 13, k);
    const std::int64_t plus = dim_sigma(fact, Weight(k),
                                        SignPattern::parse("+"), Space::Full,
                                        set.table(13));
    const std::int64_t minus = dim_sigma(fact, Weight(k),
                                         SignPattern::parse("-"), Space::Full,
                                         set.table(13));
    CHECK(plus + minus == d);
    CHECK(plus == (d + d % 2) / 2);
    CHECK(minus == d / 2);
  }
}
