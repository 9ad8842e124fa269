#include "modform/signpattern.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "modform/sequence.hpp"

namespace modform::signpattern {

namespace {

using dimension::Space;
using dimension::Weight;
using numthy::Factorization;

void require_squarefree(const Factorization& n) {
  if (!n.is_squarefree())
    throw UsageError("sign patterns are defined only for squarefree levels, got " +
                     std::to_string(n.value()));
}

std::int64_t checked_int64(__int128 v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min())
    throw DataError(std::string("trace-data inconsistency: ") + what +
                    " overflows 64 bits");
  return static_cast<std::int64_t>(v);
}

}  // namespace

SignPattern SignPattern::parse(std::string_view text) {
  SignPattern out;
  if (text == ".") return out;
  for (const char c : text) {
    if (c == '+')
      out.signs_.push_back(0);
    else if (c == '-')
      out.signs_.push_back(1);
    else
      throw UsageError("sign pattern may contain only '+' and '-', got \"" +
                       std::string(text) + "\"");
  }
  return out;
}

std::vector<SignPattern> SignPattern::enumerate(const Factorization& n) {
  require_squarefree(n);
  const int t = n.omega();
  std::vector<SignPattern> out;
  out.reserve(std::size_t{1} << t);
  // Counting in binary with '+' = 0 gives lexicographic order, '+' first.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << t); ++mask) {
    SignPattern p;
    p.signs_.resize(t);
    for (int i = 0; i < t; ++i)
      p.signs_[i] = (mask >> (t - 1 - i)) & 1u;
    out.push_back(std::move(p));
  }
  return out;
}

int SignPattern::sign_at(int i) const {
  if (i < 0 || i >= size()) throw UsageError("sign index out of range");
  return signs_[static_cast<std::size_t>(i)] == 0 ? 1 : -1;
}

int SignPattern::value_on(const Factorization& level,
                          const Factorization& d) const {
  if (size() != level.omega())
    throw UsageError("sign pattern has " + std::to_string(size()) +
                     " signs but the level has " +
                     std::to_string(level.omega()) + " primes");
  int sign = 1;
  for (const auto& pp : d.factors()) {
    const auto& primes = level.factors();
    std::size_t i = 0;
    while (i < primes.size() && primes[i].prime != pp.prime) ++i;
    if (i == primes.size())
      throw UsageError(std::to_string(d.value()) + " does not divide level " +
                       std::to_string(level.value()));
    sign *= sign_at(static_cast<int>(i));
  }
  return sign;
}

std::string SignPattern::to_string() const {
  std::string s;
  s.reserve(signs_.size());
  for (const auto b : signs_) s.push_back(b == 0 ? '+' : '-');
  return s;
}

std::vector<SignPattern> enumerate_patterns(const Factorization& n) {
  return SignPattern::enumerate(n);
}

std::int64_t TraceRow::at(std::int64_t k) const {
  if (k < 1) throw UsageError("weight index must be >= 1");
  if (k == 1) return value_k1;
  return periodic[static_cast<std::size_t>(k % 12)];
}

TraceTable::TraceTable(Space kind, std::int64_t level)
    : kind_(kind), level_(level) {
  require_squarefree(numthy::factorize(level));
}

void TraceTable::set_row(std::int64_t d, TraceRow row) {
  if (d <= 1 || level_ % d != 0)
    throw UsageError("trace rows exist for divisors d != 1 of the level; got d=" +
                     std::to_string(d) + " at level " + std::to_string(level_));
  if (rows_.count(d) > 0)
    throw UsageError("duplicate trace row for d=" + std::to_string(d));
  rows_.emplace(d, row);
}

bool TraceTable::has_row(std::int64_t d) const { return rows_.count(d) > 0; }

const TraceRow& TraceTable::row(std::int64_t d) const {
  const auto it = rows_.find(d);
  if (it == rows_.end())
    throw DataError("trace data unavailable for (" + std::to_string(level_) +
                    "," + std::to_string(d) + ")");
  return it->second;
}

bool TraceTable::complete() const {
  const auto divs = numthy::divisors(numthy::factorize(level_));
  for (const auto& d : divs)
    if (d.value() != 1 && rows_.count(d.value()) == 0) return false;
  return true;
}

TraceSet::TraceSet(Space kind) : kind_(kind) {
  tables_.emplace(1, TraceTable(kind, 1));
}

bool TraceSet::contains(std::int64_t level) const {
  return tables_.count(level) > 0;
}

const TraceTable& TraceSet::table(std::int64_t level) const {
  const auto it = tables_.find(level);
  if (it == tables_.end())
    throw DataError("no trace table for level " + std::to_string(level));
  return it->second;
}

void TraceSet::add(TraceTable t) {
  if (t.kind() != kind_)
    throw UsageError("trace table kind does not match the set");
  if (tables_.count(t.level()) > 0)
    throw UsageError("duplicate trace table for level " +
                     std::to_string(t.level()));
  tables_.emplace(t.level(), std::move(t));
}

std::vector<std::int64_t> TraceSet::levels() const {
  std::vector<std::int64_t> out;
  out.reserve(tables_.size());
  for (const auto& [n, t] : tables_) out.push_back(n);
  return out;
}

std::int64_t dim_sigma(const Factorization& n, Weight k,
                       const SignPattern& sigma, Space kind,
                       const TraceTable& traces) {
  require_squarefree(n);
  if (sigma.size() != n.omega())
    throw UsageError("sign pattern length " + std::to_string(sigma.size()) +
                     " does not match omega(" + std::to_string(n.value()) +
                     ") = " + std::to_string(n.omega()));
  if (traces.kind() != kind || traces.level() != n.value())
    throw UsageError("trace table is for a different level or space");

  __int128 acc = dimension::dim_space(kind, n, k);
  for (const auto& d : numthy::divisors(n)) {
    if (d.value() == 1) continue;
    const __int128 t = traces.row(d.value()).at(k.k);
    acc += static_cast<__int128>(sigma.value_on(n, d)) * t;
  }
  const std::int64_t m = std::int64_t{1} << n.omega();
  if (acc % m != 0)
    throw DataError("trace-data inconsistency: eigenspace dimension at (" +
                    std::to_string(n.value()) + ", k=" + std::to_string(k.k) +
                    ", " + sigma.to_string() + ") is not integral");
  const std::int64_t dim = checked_int64(acc / m, "eigenspace dimension");
  if (dim < 0)
    throw DataError("trace-data inconsistency: eigenspace dimension at (" +
                    std::to_string(n.value()) + ", k=" + std::to_string(k.k) +
                    ", " + sigma.to_string() + ") is negative");
  return dim;
}

TraceTable invert_traces(const Factorization& n, Space kind,
                         const SigmaDims& dims) {
  require_squarefree(n);
  const auto patterns = enumerate_patterns(n);
  if (dims.size() != patterns.size())
    throw UsageError("need dimension sequences for all " +
                     std::to_string(patterns.size()) + " sign patterns");
  std::size_t window = std::numeric_limits<std::size_t>::max();
  for (const auto& p : patterns) {
    const auto it = dims.find(p);
    if (it == dims.end())
      throw UsageError("missing dimension sequence for pattern \"" +
                       p.to_string() + "\"");
    window = std::min(window, it->second.size());
  }
  if (window < 25)
    throw UsageError("need dimension sequences for k = 1..25 at least");

  // The d = 1 character sum must reproduce the plain dimension.
  for (std::size_t i = 0; i < window; ++i) {
    __int128 total = 0;
    for (const auto& [p, seq] : dims) total += seq[i];
    const std::int64_t expect =
        dimension::dim_space(kind, n, Weight(static_cast<int>(i + 1)));
    if (total != expect)
      throw DataError(
          "pattern dimensions do not sum to the full dimension at (" +
          std::to_string(n.value()) + ", k=" + std::to_string(i + 1) + ")");
  }

  TraceTable out(kind, n.value());
  for (const auto& d : numthy::divisors(n)) {
    if (d.value() == 1) continue;
    std::vector<std::int64_t> t(window);
    for (std::size_t i = 0; i < window; ++i) {
      __int128 acc = 0;
      for (const auto& [p, seq] : dims)
        acc += static_cast<__int128>(p.value_on(n, d)) * seq[i];
      t[i] = checked_int64(acc, "trace value");
    }
    for (std::size_t i = 1; i + 12 < window; ++i)
      if (t[i] != t[i + 12])
        throw DataError("trace of W_" + std::to_string(d.value()) +
                        " at level " + std::to_string(n.value()) +
                        " is not 12-periodic from k = 2 on");
    TraceRow row;
    row.value_k1 = t[0];
    for (std::int64_t j = 2; j <= 13; ++j)
      row.periodic[static_cast<std::size_t>(j % 12)] =
          t[static_cast<std::size_t>(j - 1)];
    row.provenance = Provenance::Derived;
    out.set_row(d.value(), row);
  }

  // Round trip: the table must reproduce its defining sequences bit-exactly.
  for (const auto& [p, seq] : dims)
    for (std::size_t i = 0; i < window; ++i)
      if (dim_sigma(n, Weight(static_cast<int>(i + 1)), p, kind, out) !=
          seq[i])
        throw DataError("inverted trace table fails to reproduce its inputs");
  return out;
}

const TraceSet& builtin_fixtures() {
  static const TraceSet set = [] {
    // The three bijective weight sequences attached to the known sign-refined
    // eigenspaces at levels 11, 14 and 15 (full spaces).
    const auto up = [](int k) {
      return std::int64_t{k} - 1 + (k % 2 == 0 ? 1 : -1) + (k == 1 ? 1 : 0);
    };
    const auto straight = [](int k) { return std::int64_t{k} - 1; };
    const auto down = [](int k) {
      return std::int64_t{k} - 1 - (k % 2 == 0 ? 1 : -1);
    };
    const auto seq = [](auto f) {
      std::vector<std::int64_t> v;
      for (int k = 1; k <= 49; ++k) v.push_back(f(k));
      return v;
    };

    TraceSet s(Space::Full);
    {
      SigmaDims dims;
      dims[SignPattern::parse("+")] = seq(up);
      dims[SignPattern::parse("-")] = seq(down);
      s.add(invert_traces(numthy::factorize(11), Space::Full, dims));
    }
    for (const std::int64_t n : {std::int64_t{14}, std::int64_t{15}}) {
      SigmaDims dims;
      dims[SignPattern::parse("++")] = seq(up);
      dims[SignPattern::parse("+-")] = seq(down);
      dims[SignPattern::parse("-+")] = seq(straight);
      dims[SignPattern::parse("--")] = seq(straight);
      s.add(invert_traces(numthy::factorize(n), Space::Full, dims));
    }
    return s;
  }();
  return set;
}

namespace {

constexpr std::string_view kHeaderPrefix = "#modform-traces v1 kind=";

std::int64_t parse_i64(std::string_view field, std::size_t line_no) {
  std::int64_t v = 0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw DataError("trace file line " + std::to_string(line_no) +
                    ": expected a signed integer, got \"" +
                    std::string(field) + "\"");
  return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

TraceSet load_traces(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line))
    throw DataError("trace file is empty (missing header)");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind(kHeaderPrefix, 0) != 0)
    throw DataError("trace file must start with \"" +
                    std::string(kHeaderPrefix) + "<full|new>\"");
  const std::string kind_name(line.substr(kHeaderPrefix.size()));
  Space kind;
  try {
    kind = dimension::space_from_name(kind_name);
  } catch (const UsageError&) {
    throw DataError("trace file header names unknown kind \"" + kind_name +
                    "\"");
  }

  // Rows grouped by level; assembled into tables after the whole file is
  // read so completeness can be checked.
  std::map<std::int64_t, std::map<std::int64_t, TraceRow>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 15)
      throw DataError("trace file line " + std::to_string(line_no) +
                      ": expected 15 tab-separated fields, got " +
                      std::to_string(fields.size()));
    const std::int64_t n = parse_i64(fields[0], line_no);
    const std::int64_t d = parse_i64(fields[1], line_no);
    if (n < 1)
      throw DataError("trace file line " + std::to_string(line_no) +
                      ": level must be positive");
    if (!numthy::factorize(n).is_squarefree())
      throw DataError("trace file line " + std::to_string(line_no) +
                      ": level " + std::to_string(n) + " is not squarefree");
    if (d <= 1 || n % d != 0)
      throw DataError("trace file line " + std::to_string(line_no) + ": d=" +
                      std::to_string(d) + " is not a divisor != 1 of " +
                      std::to_string(n));
    if (rows[n].count(d) > 0)
      throw DataError("trace file line " + std::to_string(line_no) +
                      ": duplicate row for (" + std::to_string(n) + "," +
                      std::to_string(d) + ")");
    TraceRow row;
    row.value_k1 = parse_i64(fields[2], line_no);
    for (std::int64_t j = 2; j <= 13; ++j)
      row.periodic[static_cast<std::size_t>(j % 12)] =
          parse_i64(fields[static_cast<std::size_t>(j + 1)], line_no);
    row.provenance = Provenance::Ingested;
    rows[n].emplace(d, row);
  }

  TraceSet set(kind);
  for (const auto& [n, table_rows] : rows) {
    TraceTable table(kind, n);
    for (const auto& [d, row] : table_rows) table.set_row(d, row);
    if (!table.complete()) {
      std::string missing;
      for (const auto& d : numthy::divisors(numthy::factorize(n)))
        if (d.value() != 1 && !table.has_row(d.value()))
          missing += (missing.empty() ? "" : ",") + std::to_string(d.value());
      throw DataError("incomplete trace table for level " + std::to_string(n) +
                      ": missing d=" + missing);
    }
    // Every sign pattern must get a nonnegative integral dimension out of the
    // divisor sum over a window covering k = 1 and two full periods.
    const auto fact = numthy::factorize(n);
    for (const auto& sigma : enumerate_patterns(fact))
      for (int k = 1; k <= 25; ++k)
        dim_sigma(fact, Weight(k), sigma, kind, table);
    set.add(std::move(table));
  }
  return set;
}

TraceSet load_traces(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open trace file " + path.string());
  return load_traces(in);
}

void save_traces(const TraceSet& set, std::ostream& out) {
  out << kHeaderPrefix << dimension::space_name(set.kind()) << "\n";
  out << "# columns: N  d  v1  p2..p13  (v1 = value at k=1; pj = value for "
         "k == j mod 12, k >= 2)\n";
  for (const std::int64_t n : set.levels()) {
    for (const auto& [d, row] : set.table(n).rows()) {
      out << n << '\t' << d << '\t' << row.value_k1;
      for (std::int64_t j = 2; j <= 13; ++j)
        out << '\t' << row.periodic[static_cast<std::size_t>(j % 12)];
      out << '\n';
    }
  }
}

void save_traces(const TraceSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw DataError("cannot open " + path.string() + " for writing");
  save_traces(set, out);
  out.flush();
  if (!out)
    throw DataError("failed writing trace file " + path.string());
}

std::vector<std::int64_t> SigmaClassification::all_sigma_levels() const {
  std::map<std::int64_t, bool> all_true;
  for (const auto& v : verdicts) {
    const auto it = all_true.find(v.level);
    if (it == all_true.end())
      all_true.emplace(v.level, v.hits_all);
    else
      it->second = it->second && v.hits_all;
  }
  std::vector<std::int64_t> out;
  for (const auto& [n, ok] : all_true)
    if (ok) out.push_back(n);
  return out;
}

std::vector<std::pair<std::int64_t, SignPattern>>
SigmaClassification::sporadic_pairs() const {
  const auto full = all_sigma_levels();
  std::vector<std::pair<std::int64_t, SignPattern>> out;
  for (const auto& v : verdicts)
    if (v.hits_all && !std::binary_search(full.begin(), full.end(), v.level))
      out.emplace_back(v.level, v.sigma);
  return out;
}

SigmaClassification classify_sigma(Space kind, const TraceSet& traces) {
  if (traces.kind() != kind)
    throw UsageError("trace set kind does not match the requested space");
  SigmaClassification out;
  for (const std::int64_t n : sequence::density_prefilter(kind)) {
    if (!traces.contains(n) || !traces.table(n).complete()) {
      out.missing_levels.push_back(n);
      continue;
    }
    const auto fact = numthy::factorize(n);
    const auto& table = traces.table(n);
    const std::int64_t psi = numthy::rat_to_int64(numthy::eval(
        kind == Space::Full ? numthy::fns::psi() : numthy::fns::psi_new(),
        fact));
    const std::int64_t b = std::int64_t{1} << fact.omega();
    for (const auto& sigma : enumerate_patterns(fact)) {
      const auto form = sequence::extract_form(
          [&](int k) {
            return dim_sigma(fact, Weight(k), sigma, kind, table);
          },
          2 * psi, b);
      const auto cov = sequence::hits_all_naturals(form);
      out.verdicts.push_back(
          SigmaVerdict{n, sigma, cov.hits_all, cov.least_missing});
    }
  }
  return out;
}

}  // namespace modform::signpattern
