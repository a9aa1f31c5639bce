#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "npefix/frontend/checker.hpp"
#include "npefix/runtime/repair.hpp"
#include "npefix/runtime/value.hpp"

namespace npefix {

/// Entry point of a run: a static method, or an instance method invoked on
/// a fresh instance built with the zero-argument constructor.
struct Entry {
  std::string cls;              // empty: the class declaring `void main()`
  std::string method = "main";
};

/// Hooks into exception flow. `predicted_caught` is the catch-stack answer
/// at the throw site; it is only meaningful for instrumented programs.
class ExecutionObserver {
public:
  virtual ~ExecutionObserver() = default;
  virtual void on_throw(const Object* exc, bool predicted_caught) { (void)exc, (void)predicted_caught; }
  virtual void on_catch(const Object* exc) { (void)exc; }
  virtual void on_uncaught(const Object* exc) { (void)exc; }
};

struct RunOptions {
  Entry entry;
  uint64_t max_steps = 20'000'000;
  int max_depth = 1000;
  int depth_budget = 3;  // new_var recursion budget
  bool trace_catch_stack = false;
  ExecutionObserver* observer = nullptr;
};

enum class ExitStatus { Normal, Uncaught, Aborted };

struct ExecutionResult {
  std::string stdout_text;
  ExitStatus status = ExitStatus::Normal;
  std::string exception_type;  // for Uncaught; the abort reason for Aborted
  std::string exception_message;
  std::vector<LogRecord> log;  // records appended during this run
  std::optional<Outcome> outcome;  // set when the controller was repairing
  std::vector<std::pair<std::string, Strategy>> deployed;
  std::vector<std::string> catch_trace;
  uint64_t steps = 0;

  bool normal() const { return status == ExitStatus::Normal; }
  bool uncaught(std::string_view type) const { return status == ExitStatus::Uncaught && exception_type == type; }
  /// One-line description of the exit: "normal", "uncaught T: msg", "aborted: why".
  std::string describe_exit() const;
};

/// Runs one task. Repair is driven by `controller`; with an Off or Idle
/// controller instrumented hooks only do their bookkeeping. Deterministic
/// given the program, the options and the controller state.
ExecutionResult run(const CheckedProgram& program, const RunOptions& options, RepairController& controller);

/// Runs without repair.
ExecutionResult run(const CheckedProgram& program, const RunOptions& options = {});

}  // namespace npefix
