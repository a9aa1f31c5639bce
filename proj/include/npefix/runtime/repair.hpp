#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "npefix/runtime/strategy.hpp"
#include "npefix/runtime/value_pool.hpp"

namespace npefix {

enum class RepairMode {
  Off,      // uninstrumented program
  Idle,     // instrumented, hooks only do bookkeeping
  Fixed,    // one strategy, first candidate in deterministic order
  Explore,  // random choice among untried candidates
};

/// One line of the repair log.
struct LogRecord {
  std::string event;  // crash | try | success | deploy | exhausted
  std::string crash_point;
  std::optional<Strategy> strategy;
  std::optional<uint64_t> rng_draw;
  uint64_t timestamp = 0;  // logical clock, shared by all runs of a controller
  std::optional<Outcome> outcome;

  std::string to_json_line() const;
  bool operator==(const LogRecord&) const = default;
};

struct CrashPointState {
  std::string key;
  std::set<Strategy> tried;
  std::optional<Strategy> deployed;
  size_t candidates = 0;  // size of the candidate set at the first exploration
};

/// What the interpreter knows at a harmful null dereference.
struct RepairContext {
  std::string crash_point;
  std::string required_type;
  bool guarded = false;                // inside a skipLine guard of this activation
  bool method_skip_available = false;  // enclosing method instrumented for S4
  std::string return_type;             // "void" for void methods and constructors
  std::vector<PoolEntry> pool_required;   // candidates of required_type
  std::vector<PoolEntry> pool_return;     // candidates of return_type
  std::vector<std::string> types_required;
  std::vector<std::string> types_return;
};

struct Decision {
  std::optional<Strategy> strategy;   // empty when nothing can be applied
  std::optional<Outcome> inapplicable;  // NoV / NoI / RI / US for fixed mode
  bool deployed = false;              // reapplication of a deployed strategy
  bool exhausted = false;
};

/// Fig.-1 style controller: keeps per-crash-point state across runs, takes
/// one sticky decision per crash point and run, and deploys on success.
class RepairController {
public:
  static RepairController off() { return RepairController(RepairMode::Off); }
  static RepairController idle() { return RepairController(RepairMode::Idle); }
  static RepairController fixed(StrategyId id);
  static RepairController explore(uint64_t seed);

  RepairMode mode() const { return mode_; }
  std::optional<StrategyId> fixed_strategy() const { return fixed_; }
  uint64_t seed() const { return seed_; }
  bool repairing() const { return mode_ == RepairMode::Fixed || mode_ == RepairMode::Explore; }

  void begin_run();
  Decision decide(const RepairContext& ctx);
  /// Closes the run. On success every strategy tried during the run is
  /// deployed; returns the newly deployed (crash point, strategy) pairs.
  std::vector<std::pair<std::string, Strategy>> end_run(bool success);

  /// First inapplicability code of the current run, if its first decision
  /// could not be applied.
  std::optional<Outcome> first_inapplicable() const { return first_inapplicable_; }
  bool any_decision_in_run() const { return !run_decisions_.empty(); }
  bool exhausted_in_run() const { return exhausted_in_run_; }
  uint64_t draws_in_run() const { return draws_in_run_; }

  const std::vector<LogRecord>& log() const { return log_; }
  size_t run_log_begin() const { return run_log_begin_; }
  const std::map<std::string, CrashPointState>& states() const { return states_; }

  /// Deployment table: {crash_point: {strategy, parameter}}.
  std::string deployments_json() const;
  void load_deployments(const std::string& json_text);
  void deploy(const std::string& crash_point, const Strategy& s);

  /// Every applicable parametrized candidate, in the order S1a(p..), S1b(p..),
  /// S2a(t..), S2b(t..), S3, S4a, S4b(p..), S4c(t..), S4d.
  static std::vector<Strategy> expand_candidates(const RepairContext& ctx);

  /// First candidate of `id` in deterministic order, or the reason it cannot
  /// be applied (checked in the order RI, NoV, NoI, US).
  static std::variant<Strategy, Outcome> first_candidate(StrategyId id, const RepairContext& ctx);

private:
  explicit RepairController(RepairMode mode) : mode_(mode) {}
  void record(std::string event, const std::string& key, std::optional<Strategy> s = {},
              std::optional<uint64_t> draw = {}, std::optional<Outcome> outcome = {});

  RepairMode mode_;
  std::optional<StrategyId> fixed_;
  uint64_t seed_ = 0;
  std::mt19937_64 rng_;
  std::map<std::string, CrashPointState> states_;
  std::map<std::string, Decision> run_decisions_;
  std::vector<std::string> run_order_;
  std::optional<Outcome> first_inapplicable_;
  bool exhausted_in_run_ = false;
  uint64_t draws_in_run_ = 0;
  std::vector<LogRecord> log_;
  size_t run_log_begin_ = 0;
  uint64_t clock_ = 0;
};

}  // namespace npefix
