#pragma once

// Corpus-level experiments: outcome matrices under fixed strategies, seeded
// failure campaigns, overhead measurement and exploration sessions.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "npefix/frontend/checker.hpp"
#include "npefix/runtime/interpreter.hpp"
#include "npefix/runtime/patch.hpp"
#include "npefix/transform/transform.hpp"

namespace npefix {

class CorpusError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct CorpusCase {
  std::string name;
  std::vector<std::string> files;  // relative to the manifest directory
  Entry entry;
  std::optional<std::string> expected_output;     // normal cases
  std::optional<std::string> expected_exception;  // crashing cases
  std::vector<std::string> tags;

  bool crashes() const { return expected_exception.has_value(); }
  bool has_tag(std::string_view tag) const;
};

struct Corpus {
  std::string name;
  std::filesystem::path root;
  std::vector<CorpusCase> cases;
};

/// Reads a manifest:
/// {"name": ..., "cases": [{"name", "files": [...], "entry", "method",
///   "expect": {"output": "..."} | {"crash": "NullPointerException"}, "tags": [...]}]}
Corpus load_corpus(const std::filesystem::path& manifest);

CheckedProgramPtr load_case(const Corpus& corpus, const CorpusCase& c);

/// Runs the case uninstrumented and throws CorpusError when it does not
/// behave as the manifest says.
void validate_case(const Corpus& corpus, const CorpusCase& c, const RunOptions& options = {});

struct HarnessOptions {
  std::vector<StrategyId> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  int jobs = 1;
  int depth_budget = 3;
  uint64_t max_steps = 20'000'000;
};

struct MatrixRow {
  std::string name;
  std::map<StrategyId, Outcome> cells;
  int success_count = 0;

  bool operator==(const MatrixRow&) const = default;
};

struct OutcomeMatrix {
  std::string corpus;
  std::vector<StrategyId> strategies;
  std::vector<MatrixRow> rows;
  std::map<StrategyId, int> totals;  // OK cells per strategy
  int union_count = 0;               // rows with at least one OK

  std::string to_json() const;
  std::string to_text() const;
  static OutcomeMatrix from_json(const std::string& text);
  bool operator==(const OutcomeMatrix&) const = default;
};

/// One fixed-strategy run per (crashing case, strategy). Every case is first
/// validated to crash uninstrumented with a NullPointerException.
OutcomeMatrix run_matrix(const Corpus& corpus, const HarnessOptions& options = {});

/// A program and an entry that crashes with a NullPointerException.
struct CrashTask {
  std::string name;
  CheckedProgramPtr original;
  Entry entry;
};

OutcomeMatrix run_matrix(const std::string& corpus_name, const std::vector<CrashTask>& tasks,
                         const HarnessOptions& options = {});

// -- seeding ------------------------------------------------------------------

/// Demo project layout: `app/*.mj` (application), `tests/*.mj` (test classes
/// whose instance methods named test* are the test cases), optional
/// `inventory.json` with {"null_checks": N}.
struct SeedingProject {
  std::filesystem::path root;
  std::vector<std::string> app_files;
  std::vector<std::string> test_files;
  std::optional<size_t> inventory;
};

SeedingProject load_seeding_project(const std::filesystem::path& root);

struct TestOutcome {
  std::string test;  // Class.method
  ExitStatus status = ExitStatus::Normal;
  std::string exception_type;
};

struct CampaignResult {
  SeedReport seed;
  std::vector<TestOutcome> baseline;  // unseeded project
  std::vector<TestOutcome> seeded;
  size_t failing_npe = 0;
  size_t failing_assertion = 0;
  size_t failing_other = 0;
  OutcomeMatrix matrix;  // over the NullPointerException failures
  Program seeded_program;

  double union_rate() const;  // percent of NPE failures repaired by some strategy
  std::string to_json() const;
  std::string to_text() const;
};

CampaignResult run_seeding_campaign(const std::filesystem::path& project_dir, const HarnessOptions& options = {});

// -- overhead -----------------------------------------------------------------

struct OverheadRow {
  std::string name;
  double original_ms = 0;
  double transformed_ms = 0;
  double overhead_pct = 0;
  int reps = 0;
};

struct OverheadReport {
  std::vector<OverheadRow> rows;

  std::string to_json() const;
  /// Columns as in "336 -> 381 = 13%": means in ms, overhead truncated to an
  /// integer percent.
  std::string to_text() const;
};

/// Times every normal case `reps` times original and `reps` times
/// instrumented (repair idle), interleaved, after one warm-up run of each.
/// Cases tagged "self-comparison" are measured original against original.
OverheadReport measure_overhead(const Corpus& corpus, int reps = 10, const HarnessOptions& options = {});

// -- exploration --------------------------------------------------------------

struct SessionResult {
  std::string name;
  uint64_t seed = 0;
  std::vector<LogRecord> log;
  size_t invocations = 0;
  bool deployed = false;
  bool exhausted = false;
  size_t candidates = 0;  // candidate count at the first crash point
  ExecutionResult last;
  std::vector<PatchSuggestion> patches;
  std::string deployments;  // deployment table after the session

  std::string log_jsonl() const;
};

/// Re-runs the failing task with an exploring controller until it succeeds,
/// every candidate at a crash point is exhausted, or `max_invocations`.
SessionResult run_exploration_session(const CrashTask& task, uint64_t seed, const HarnessOptions& options = {},
                                      size_t max_invocations = 200, const std::string& deployments_json = "");

}  // namespace npefix
