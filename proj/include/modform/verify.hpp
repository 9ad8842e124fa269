#pragma once

// The reproduction suite: every headline computational result this project
// claims, packaged as named checks with PASS / FAIL / SKIP outcomes.  Used by
// the `verify-paper` CLI subcommand and by the acceptance test binary.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace modform::verify {

enum class Status { Pass, Fail, Skip };

const char* status_name(Status s);  // "PASS" / "FAIL" / "SKIP"

struct CheckResult {
  std::string name;
  Status status = Status::Fail;
  std::string detail;  // what was established, or why it failed / was skipped
  double seconds = 0.0;
};

struct Options {
  // Skip the two weight-2 omission scans (the only long-running checks).
  bool quick = false;
  // Externally computed involution traces; extends the sign-pattern checks
  // beyond the built-in tables.
  std::optional<std::filesystem::path> traces;
  int threads = 1;
};

// Runs all checks in order. Individual failures are reported in the results,
// not thrown.
std::vector<CheckResult> run_all(const Options& opt = {});

// True when no check failed (skips are not failures).
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace modform::verify
