// Command-line front end: exact dimensions, certified omitted-value scans,
// classification tables, zero tables, densities, and the reproduction suite.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "modform/certify.hpp"
#include "modform/common.hpp"
#include "modform/dimension.hpp"
#include "modform/numthy.hpp"
#include "modform/sequence.hpp"
#include "modform/signpattern.hpp"
#include "modform/verify.hpp"

namespace {

using modform::DataError;
using modform::UsageError;
using modform::dimension::Space;
using modform::dimension::Weight;
using json = nlohmann::ordered_json;
namespace certify = modform::certify;
namespace numthy = modform::numthy;
namespace sequence = modform::sequence;
namespace signpattern = modform::signpattern;
namespace verify = modform::verify;

int default_threads() {
  if (const char* env = std::getenv("MODFORM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw UsageError("MODFORM_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

Space space_of(const std::string& name) {
  return modform::dimension::space_from_name(name);
}

Weight weight_of(std::int64_t weight2k) {
  if (weight2k < 2 || weight2k % 2 != 0 || weight2k > 1'000'000)
    throw UsageError("--weight2k takes the even weight 2k, got " +
                     std::to_string(weight2k));
  return Weight::from_2k(static_cast<int>(weight2k));
}

std::string rat_str(const numthy::Rat& r) { return r.get_str(); }

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void emit(const json& record, bool as_json) {
  if (as_json) {
    std::cout << record.dump(2) << "\n";
    return;
  }
  // TSV: a '#' header naming the columns, then one row. The elapsed-time
  // field stays JSON-only so TSV output is byte-identical across runs.
  std::string header = "#", row;
  for (const auto& [key, value] : record.items()) {
    if (key == "elapsed_seconds" || key == "command" ||
        key == "tool_version")
      continue;
    header += key + '\t';
    row += (value.is_string() ? value.get<std::string>() : value.dump()) + '\t';
  }
  if (!header.empty()) header.pop_back();
  if (!row.empty()) row.pop_back();
  std::cout << header << "\n" << row << "\n";
}

// The sign-pattern trace source for dim/classify: an explicit file when
// given, otherwise the built-in derived tables (full space) or just the
// trivial level-1 table (new space).
signpattern::TraceSet trace_source(Space space,
                                   const std::optional<std::string>& path) {
  if (path) {
    auto set = signpattern::load_traces(std::filesystem::path(*path));
    if (set.kind() != space)
      throw DataError("trace file " + *path + " holds " +
                      std::string(modform::dimension::space_name(set.kind())) +
                      "-space tables, but the " +
                      std::string(modform::dimension::space_name(space)) +
                      " space was requested");
    return set;
  }
  if (space == Space::Full) {
    signpattern::TraceSet copy(Space::Full);
    const auto& fx = signpattern::builtin_fixtures();
    for (const auto n : fx.levels())
      if (n != 1) copy.add(fx.table(n));
    return copy;
  }
  return signpattern::TraceSet(Space::New);
}

int cmd_dim(std::int64_t level, std::int64_t weight2k,
            const std::string& space_name,
            const std::optional<std::string>& sigma_text,
            const std::optional<std::string>& traces_path, bool as_json) {
  const auto t0 = std::chrono::steady_clock::now();
  const Space space = space_of(space_name);
  const Weight k = weight_of(weight2k);
  const auto fact = numthy::factorize(level);

  json record;
  record["command"] = "dim";
  record["space"] = space_name;
  record["level"] = level;
  record["weight2k"] = weight2k;
  std::int64_t dim;
  if (sigma_text) {
    const auto sigma = signpattern::SignPattern::parse(*sigma_text);
    const auto traces = trace_source(space, traces_path);
    dim = signpattern::dim_sigma(fact, k, sigma, space, traces.table(level));
    record["sigma"] = sigma.to_string().empty() ? "." : sigma.to_string();
  } else {
    dim = modform::dimension::dim_space(space, fact, k);
    record["sigma"] = ".";
  }
  record["dim"] = dim;
  record["tool_version"] = std::string(modform::kToolVersion);
  record["elapsed_seconds"] = elapsed_since(t0);
  emit(record, as_json);
  return 0;
}

int cmd_scan_omitted(const std::string& space_name, std::int64_t weight2k,
                     std::optional<std::int64_t> candidate,
                     std::optional<std::int64_t> limit,
                     const std::optional<std::string>& out_path, int threads,
                     bool as_json) {
  const auto t0 = std::chrono::steady_clock::now();
  const Space space = space_of(space_name);
  const Weight k = weight_of(weight2k);

  certify::Options opt;
  opt.threads = threads;
  if (limit) opt.limit = *limit;
  std::optional<std::uint64_t> cand;
  if (candidate) {
    if (*candidate < 0) throw UsageError("--candidate must be nonnegative");
    cand = static_cast<std::uint64_t>(*candidate);
  }
  const auto cert = certify::find_omission(space, k, cand, opt);
  const std::string cert_text = certify::certificate_to_json(cert);
  if (out_path) {
    std::ofstream out(*out_path);
    if (!out) throw DataError("cannot open " + *out_path + " for writing");
    out << cert_text;
    if (cert_text.empty() || cert_text.back() != '\n') out << "\n";
    if (!out.good()) throw DataError("failed writing " + *out_path);
  }

  if (as_json) {
    json record;
    record["command"] = "scan-omitted";
    record["certificate"] = json::parse(cert_text);
    if (out_path) record["certificate_path"] = *out_path;
    record["summary"] = "OMITTED " + std::to_string(cert.omitted) +
                        " up to N0=" + std::to_string(cert.scan_bound) +
                        " certified";
    record["tool_version"] = std::string(modform::kToolVersion);
    record["elapsed_seconds"] = elapsed_since(t0);
    std::cout << record.dump(2) << "\n";
  } else {
    std::cout << "OMITTED " << cert.omitted << " up to N0=" << cert.scan_bound
              << " certified\n";
  }
  return 0;
}

int cmd_classify(const std::string& mode,
                 const std::optional<std::string>& traces_path, bool as_json) {
  const auto t0 = std::chrono::steady_clock::now();
  const bool sigma_mode = mode.rfind("sigma-", 0) == 0;
  const bool weight_mode = mode.rfind("weight-", 0) == 0;
  if (!sigma_mode && !weight_mode)
    throw UsageError("--mode must be one of weight-full, weight-new, "
                     "sigma-full, sigma-new");
  const Space space = space_of(mode.substr(mode.find('-') + 1));

  if (weight_mode) {
    const auto levels = sequence::classify_weight(space);
    if (as_json) {
      json record;
      record["command"] = "classify";
      record["mode"] = mode;
      record["surjective_levels"] = levels;
      record["tool_version"] = std::string(modform::kToolVersion);
      record["elapsed_seconds"] = elapsed_since(t0);
      std::cout << record.dump(2) << "\n";
    } else {
      std::cout << "#level\thits_every_natural\n";
      for (const auto n : levels) std::cout << n << "\ttrue\n";
      std::string list;
      for (const auto n : levels)
        list += (list.empty() ? "" : ",") + std::to_string(n);
      std::cout << "# surjective levels: {" << list << "}\n";
    }
    return 0;
  }

  const auto traces = trace_source(space, traces_path);
  const auto cls = signpattern::classify_sigma(space, traces);
  if (as_json) {
    json record;
    record["command"] = "classify";
    record["mode"] = mode;
    json rows = json::array();
    for (const auto& v : cls.verdicts) {
      json row;
      row["level"] = v.level;
      row["sigma"] = v.sigma.to_string().empty() ? "." : v.sigma.to_string();
      row["hits_every_natural"] = v.hits_all;
      if (!v.hits_all) row["least_missing"] = v.least_missing;
      rows.push_back(row);
    }
    record["verdicts"] = rows;
    record["all_sigma_levels"] = cls.all_sigma_levels();
    json sporadic = json::array();
    for (const auto& [n, sigma] : cls.sporadic_pairs())
      sporadic.push_back({{"level", n}, {"sigma", sigma.to_string()}});
    record["sporadic_pairs"] = sporadic;
    record["missing_trace_levels"] = cls.missing_levels;
    record["tool_version"] = std::string(modform::kToolVersion);
    record["elapsed_seconds"] = elapsed_since(t0);
    std::cout << record.dump(2) << "\n";
  } else {
    std::cout << "#level\tsigma\thits_every_natural\tleast_missing\n";
    for (const auto& v : cls.verdicts) {
      const std::string s =
          v.sigma.to_string().empty() ? "." : v.sigma.to_string();
      std::cout << v.level << '\t' << s << '\t'
                << (v.hits_all ? "true" : "false") << '\t';
      if (v.hits_all)
        std::cout << ".\n";
      else
        std::cout << v.least_missing << "\n";
    }
    std::string alls, spors, miss;
    for (const auto n : cls.all_sigma_levels())
      alls += (alls.empty() ? "" : ",") + std::to_string(n);
    for (const auto& [n, sigma] : cls.sporadic_pairs())
      spors += (spors.empty() ? "" : " ") + ("(" + std::to_string(n) + "," +
                                             sigma.to_string() + ")");
    for (const auto n : cls.missing_levels)
      miss += (miss.empty() ? "" : ",") + std::to_string(n);
    std::cout << "# all-sigma levels: {" << alls << "}\n";
    std::cout << "# sporadic pairs: " << (spors.empty() ? "none" : spors)
              << "\n";
    std::cout << "# levels lacking trace data: "
              << (miss.empty() ? "none" : miss) << "\n";
  }
  return 0;
}

int cmd_zero_pairs(const std::string& space_name, int threads, bool as_json) {
  const auto t0 = std::chrono::steady_clock::now();
  const Space space = space_of(space_name);
  certify::Options opt;
  opt.threads = threads;
  const auto table = certify::zero_pairs(space, opt);
  if (as_json) {
    json record;
    record["command"] = "zero-pairs";
    record["space"] = space_name;
    json rows = json::array();
    for (const auto& [n, k] : table.pairs)
      rows.push_back({{"level", n}, {"weight2k", 2 * k}});
    record["pairs"] = rows;
    record["levels"] = table.levels();
    record["level_bound"] = table.level_bound;
    record["threshold"] = table.threshold;
    record["tool_version"] = std::string(modform::kToolVersion);
    record["elapsed_seconds"] = elapsed_since(t0);
    std::cout << record.dump(2) << "\n";
  } else {
    std::cout << "#level\tweight2k\n";
    for (const auto& [n, k] : table.pairs)
      std::cout << n << '\t' << 2 * k << "\n";
    std::string list;
    for (const auto n : table.levels())
      list += (list.empty() ? "" : ",") + std::to_string(n);
    std::cout << "# levels: {" << list << "}\n";
    std::cout << "# complete for all levels (certified past level "
              << table.level_bound << ")\n";
  }
  return 0;
}

int cmd_density(const std::string& space_name,
                std::optional<std::int64_t> level, bool plain,
                std::optional<std::int64_t> empirical_x,
                std::optional<std::int64_t> weight2k,
                std::optional<std::int64_t> limit, int threads, bool as_json) {
  const auto t0 = std::chrono::steady_clock::now();
  const Space space = space_of(space_name);
  if (level.has_value() == empirical_x.has_value())
    throw UsageError(
        "density takes exactly one of --level (multiset density) or "
        "--empirical-x (attained-value density)");

  json record;
  record["command"] = "density";
  record["space"] = space_name;
  if (level) {
    const auto d =
        sequence::multiset_density(numthy::factorize(*level), space, !plain);
    record["level"] = *level;
    record["refined"] = !plain;
    record["density"] = rat_str(d);
  } else {
    if (!weight2k)
      throw UsageError("--empirical-x needs --weight2k");
    certify::Options opt;
    opt.threads = threads;
    if (limit) opt.limit = *limit;
    const auto d = sequence::empirical_set_density(space, weight_of(*weight2k),
                                                   *empirical_x, opt);
    record["weight2k"] = *weight2k;
    record["x"] = *empirical_x;
    record["density"] = rat_str(d);
  }
  record["tool_version"] = std::string(modform::kToolVersion);
  record["elapsed_seconds"] = elapsed_since(t0);
  emit(record, as_json);
  return 0;
}

int cmd_verify_paper(const std::optional<std::string>& traces_path, bool quick,
                     int threads, bool as_json) {
  verify::Options opt;
  opt.quick = quick;
  opt.threads = threads;
  if (traces_path) opt.traces = std::filesystem::path(*traces_path);
  const auto results = verify::run_all(opt);
  if (as_json) {
    json record;
    record["command"] = "verify-paper";
    json rows = json::array();
    for (const auto& r : results)
      rows.push_back({{"check", r.name},
                      {"status", verify::status_name(r.status)},
                      {"detail", r.detail},
                      {"elapsed_seconds", r.seconds}});
    record["checks"] = rows;
    record["all_passed"] = verify::all_passed(results);
    record["tool_version"] = std::string(modform::kToolVersion);
    std::cout << record.dump(2) << "\n";
  } else {
    for (const auto& r : results)
      std::printf("%-22s %-4s %7.2fs  %s\n", r.name.c_str(),
                  verify::status_name(r.status), r.seconds, r.detail.c_str());
    std::printf("result: %s\n",
                verify::all_passed(results) ? "all checks passed"
                                            : "FAILURES present");
  }
  return verify::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact dimension engine for spaces of cusp forms"};
  app.set_version_flag("--version", std::string(modform::kToolVersion));
  app.require_subcommand(1);

  // dim
  auto* dim = app.add_subcommand("dim", "dimension of one space");
  std::int64_t dim_level = 0, dim_weight = 0;
  std::string dim_space_name;
  std::optional<std::string> dim_sigma, dim_traces;
  bool dim_json = false;
  dim->add_option("--level", dim_level, "level N >= 1")->required();
  dim->add_option("--weight2k", dim_weight, "even weight 2k")->required();
  dim->add_option("--space", dim_space_name, "full or new")->required();
  dim->add_option("--sigma", dim_sigma,
                  "sign pattern, e.g. -+ ('.' for level 1)");
  dim->add_option("--traces", dim_traces, "involution trace file");
  dim->add_flag("--json", dim_json, "JSON output");

  // scan-omitted
  auto* scan = app.add_subcommand(
      "scan-omitted", "least omitted dimension value, certified");
  std::string scan_space_name;
  std::int64_t scan_weight = 0;
  std::optional<std::int64_t> scan_candidate, scan_limit;
  std::optional<std::string> scan_out;
  int scan_threads = 0;
  bool scan_json = false;
  scan->add_option("--space", scan_space_name, "full or new")->required();
  scan->add_option("--weight2k", scan_weight, "even weight 2k")->required();
  scan->add_option("--candidate", scan_candidate,
                   "verify this value instead of searching");
  scan->add_option("--limit", scan_limit, "scan budget in levels");
  scan->add_option("--out", scan_out, "write the certificate JSON here");
  scan->add_option("--threads", scan_threads, "scan parallelism")->check(CLI::PositiveNumber);
  scan->add_flag("--json", scan_json, "JSON output");

  // classify
  auto* classify = app.add_subcommand(
      "classify", "which spaces attain every natural number");
  std::string classify_mode;
  std::optional<std::string> classify_traces;
  bool classify_json = false;
  classify
      ->add_option("--mode", classify_mode,
                   "weight-full | weight-new | sigma-full | sigma-new")
      ->required();
  classify->add_option("--traces", classify_traces, "involution trace file");
  classify->add_flag("--json", classify_json, "JSON output");

  // zero-pairs
  auto* zeros = app.add_subcommand(
      "zero-pairs", "all (level, weight) pairs with dimension zero");
  std::string zeros_space_name;
  int zeros_threads = 0;
  bool zeros_json = false;
  zeros->add_option("--space", zeros_space_name, "full or new")->required();
  zeros->add_option("--threads", zeros_threads, "scan parallelism")->check(CLI::PositiveNumber);
  zeros->add_flag("--json", zeros_json, "JSON output");

  // density
  auto* density = app.add_subcommand(
      "density", "multiset density of a level, or empirical value-set density");
  std::string density_space_name;
  std::optional<std::int64_t> density_level, density_x, density_weight,
      density_limit;
  bool density_plain = false, density_json = false;
  int density_threads = 0;
  density->add_option("--space", density_space_name, "full or new")
      ->required();
  density->add_option("--level", density_level,
                      "exact multiset density of this level");
  density->add_flag("--plain", density_plain,
                    "without the sign refinement (with --level)");
  density->add_option("--empirical-x", density_x,
                      "count attained values in [0,x] from a certified scan");
  density->add_option("--weight2k", density_weight,
                      "even weight 2k (with --empirical-x)");
  density->add_option("--limit", density_limit, "scan budget in levels");
  density->add_option("--threads", density_threads, "scan parallelism")->check(CLI::PositiveNumber);
  density->add_flag("--json", density_json, "JSON output");

  // verify-paper
  auto* vp = app.add_subcommand("verify-paper",
                                "run the full reproduction suite");
  std::optional<std::string> vp_traces;
  bool vp_quick = false, vp_json = false;
  int vp_threads = 0;
  vp->add_option("--traces", vp_traces, "involution trace file");
  vp->add_flag("--quick", vp_quick, "skip the two weight-2 scans");
  vp->add_option("--threads", vp_threads, "scan parallelism")->check(CLI::PositiveNumber);
  vp->add_flag("--json", vp_json, "JSON output");

  try {
    app.parse(argc, argv);

    const auto threads_or_default = [](int flag_value) {
      if (flag_value < 0) throw UsageError("--threads must be positive");
      return flag_value > 0 ? flag_value : default_threads();
    };

    if (*dim)
      return cmd_dim(dim_level, dim_weight, dim_space_name, dim_sigma,
                     dim_traces, dim_json);
    if (*scan)
      return cmd_scan_omitted(scan_space_name, scan_weight, scan_candidate,
                              scan_limit, scan_out,
                              threads_or_default(scan_threads), scan_json);
    if (*classify)
      return cmd_classify(classify_mode, classify_traces, classify_json);
    if (*zeros)
      return cmd_zero_pairs(zeros_space_name,
                            threads_or_default(zeros_threads), zeros_json);
    if (*density)
      return cmd_density(density_space_name, density_level, density_plain,
                         density_x, density_weight, density_limit,
                         threads_or_default(density_threads), density_json);
    if (*vp)
      return cmd_verify_paper(vp_traces, vp_quick,
                              threads_or_default(vp_threads), vp_json);
    throw UsageError("no subcommand selected");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  } catch (const modform::UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const modform::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const modform::ResourceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
