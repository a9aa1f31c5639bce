#pragma once

// Source-to-source instrumentation of MiniJ programs.
//
// Every pass takes a type-checked program (annotations are needed to tell
// locals from fields and to know receiver types) and returns a new, unchecked
// AST. transform_all re-checks between passes.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "npefix/frontend/ast.hpp"
#include "npefix/frontend/checker.hpp"

namespace npefix {

struct TransformConfig {
  bool enable_catch_stack = true;
  bool enable_deref_checks = true;
  bool enable_value_pool = true;
  bool enable_line_skip = true;
  bool enable_method_skip = true;
  // Prefix of injected local variables. Must itself start with the reserved
  // prefix, so injected names can never collide with user names.
  std::string prefix{kReservedPrefix};

  static TransformConfig all() { return {}; }
  static TransformConfig none() { return {false, false, false, false, false}; }
  bool any() const {
    return enable_catch_stack || enable_deref_checks || enable_value_pool || enable_line_skip ||
           enable_method_skip;
  }
};

class TransformError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Hook names recognised by the checker and the interpreter.
namespace hooks {
inline constexpr const char* kFreeId = "__npefix_freeId";
inline constexpr const char* kCatchAdd = "__npefix_catchAdd";
inline constexpr const char* kCatchRemove = "__npefix_catchRemove";
inline constexpr const char* kStartMethod = "__npefix_startMethod";
inline constexpr const char* kEndMethod = "__npefix_endMethod";
inline constexpr const char* kInitVar = "__npefix_initVar";
inline constexpr const char* kModifVar = "__npefix_modifVar";
inline constexpr const char* kCheckForNull = "__npefix_checkForNull";
inline constexpr const char* kSkipLine = "__npefix_skipLine";
inline constexpr const char* kStrategyIs = "__npefix_strategyIs";
inline constexpr const char* kGetVar = "__npefix_getVar";
inline constexpr const char* kNewVar = "__npefix_newVar";
}  // namespace hooks

Program inject_value_pool(const CheckedProgram& in, std::string_view prefix = kReservedPrefix);
Program inject_catch_stack(const CheckedProgram& in, std::string_view prefix = kReservedPrefix);
Program inject_method_skip(const CheckedProgram& in, std::string_view prefix = kReservedPrefix);
Program inject_line_skip(const CheckedProgram& in);
Program inject_deref_checks(const CheckedProgram& in);

/// Applies the enabled passes in the order value pool, catch stack, method
/// skip, line skip, deref checks, and type-checks the result. Throws
/// TransformError on already-instrumented input or an invalid prefix.
CheckedProgramPtr transform_all(const CheckedProgram& in, const TransformConfig& config = {});

struct RemovedCheck {
  std::string path;
  Span span;             // the removed `if`
  std::string subject;   // printed form of the tested variable or field
  std::string op;        // "==" or "!=" as written
  bool negated = false;  // wrapped in one or more `!`
  std::string guarded;   // statement kind of the first kept statement, or "empty"
};

struct SeedReport {
  std::vector<RemovedCheck> removed_checks;
  size_t count = 0;
};

struct SeedResult {
  Program program;
  SeedReport report;
};

/// Removes every `if` testing a variable or field against null, keeping the
/// branch taken when it is non-null. `unit_filter` restricts the rewrite to
/// selected compilation units (all when empty). Works on an unchecked AST.
SeedResult seed_remove_null_checks(const Program& program,
                                   const std::function<bool(const CompilationUnit&)>& unit_filter = {});

}  // namespace npefix
