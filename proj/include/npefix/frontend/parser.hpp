#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "npefix/frontend/ast.hpp"

namespace npefix {

/// One MiniJ source file.
struct SourceUnit {
  std::string path;
  std::string text;
};

SourceUnit read_source(const std::string& path);

/// Parses one file. Throws SyntaxError with the offending span and the
/// tokens that would have been accepted there.
CompilationUnit parse_unit(const SourceUnit& source);

Program parse_program(const std::vector<SourceUnit>& sources);

/// Parses a sequence of statements, as found inside a method body.
std::vector<Stmt> parse_statements(std::string_view path, std::string_view text);

Expr parse_expression(std::string_view path, std::string_view text);

}  // namespace npefix
