#pragma once

#include <string>

#include "npefix/frontend/ast.hpp"

namespace npefix {

std::string print_expr(const Expr& expr);
std::string print_stmt(const Stmt& stmt, int indent = 0);
std::string print_block(const Block& block, int indent = 0);
std::string print_class(const ClassDecl& cls);
std::string print_unit(const CompilationUnit& unit);

/// All units concatenated, each preceded by a `// file: <path>` banner when
/// the program has more than one unit.
std::string print_program(const Program& program);

std::string quote_string(std::string_view raw);

}  // namespace npefix
