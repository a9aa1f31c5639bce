#pragma once

#include <memory>
#include <string>
#include <vector>

#include "npefix/frontend/ast.hpp"
#include "npefix/frontend/parser.hpp"
#include "npefix/frontend/types.hpp"

namespace npefix {

struct CheckOptions {
  /// Accept `__npefix_*` identifiers and hook calls. Required for programs
  /// produced by the instrumentation; user code may not use the prefix.
  bool allow_reserved = false;
};

/// A type-checked program: annotated AST plus its type table.
///
/// Owns both the user program and a copy of the built-in classes; the type
/// table points into them, so instances are only handed out by shared_ptr.
struct CheckedProgram {
  Program program;
  Program prelude;
  TypeTable types;
  bool instrumented = false;

  CheckedProgram() = default;
  CheckedProgram(const CheckedProgram&) = delete;
  CheckedProgram& operator=(const CheckedProgram&) = delete;

  /// Locates the class declaring `void main()`; empty when there is none or
  /// when several classes declare one.
  std::string default_entry() const;
};

using CheckedProgramPtr = std::shared_ptr<const CheckedProgram>;

/// MiniJ source of the built-in classes (Exception hierarchy and the
/// framework's force-return signal).
const std::string& prelude_source();

/// Type-checks `program`. Throws TypeError on the first violation.
CheckedProgramPtr check_program(Program program, CheckOptions options = {});

/// Parses and checks in one step.
CheckedProgramPtr load_program(const std::vector<SourceUnit>& sources, CheckOptions options = {});

/// True when the program mentions any `__npefix_` identifier.
bool uses_reserved_names(const Program& program);

}  // namespace npefix
