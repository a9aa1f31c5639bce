#pragma once

#include <optional>
#include <string>

#include "npefix/frontend/checker.hpp"
#include "npefix/runtime/strategy.hpp"

namespace npefix {

/// Source-level counterpart of a runtime repair: statements that replace the
/// statement holding the crash point.
struct PatchSuggestion {
  std::string crash_point;
  Strategy strategy;
  std::string path;
  uint32_t line = 0;           // line of the replaced statement
  std::string method;          // signature of the enclosing method
  std::string original;        // the replaced statement, printed
  std::string snippet;         // replacement statements, printed
  Span stmt_span;              // span of the replaced statement

  std::string to_json() const;
};

/// Renders `strategy` at `crash_point` of the uninstrumented program.
/// Empty when the site is unknown, or the strategy has no source form there
/// (global injection into a receiver that is not assignable).
std::optional<PatchSuggestion> suggest_patch(const CheckedProgram& original, const std::string& crash_point,
                                             const Strategy& strategy, int depth_budget = 3);

/// The original program with the crash statement replaced by the snippet,
/// type-checked. Throws SyntaxError or TypeError when the patch is invalid.
CheckedProgramPtr apply_patch(const CheckedProgram& original, const PatchSuggestion& patch);

}  // namespace npefix
