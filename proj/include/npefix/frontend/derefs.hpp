#pragma once

#include <string>
#include <vector>

#include "npefix/frontend/ast.hpp"

namespace npefix {

/// A field access or method call whose receiver may be null.
struct DerefSite {
  std::string key;             // crash-point key, "<path>:<line>:<col>" of the member name
  std::string receiver_type;   // static type T of the receiver
  std::string method_signature;
  bool skippable = false;
  std::string path;
  Span span;                   // the whole dereferencing expression
  const Expr* expr = nullptr;  // FieldAccess or MethodCall node
  const Stmt* stmt = nullptr;  // innermost enclosing statement
  const ClassDecl* cls = nullptr;
  const MethodDecl* method = nullptr;
};

std::string crash_point_key(std::string_view path, Span member_span);

/// Receivers that can never be null (`this`, class names) are not
/// instrumented. Requires checker annotations.
bool is_instrumentable_receiver(const Expr& receiver);

/// Whether a dereference occurring directly in `stmt` could be skipped by
/// guarding `stmt`. Conditions of if/while are never skippable.
bool is_statement_skippable(const Stmt& stmt, const MethodDecl& method);

/// Dereferencing expressions (FieldAccess or MethodCall with an
/// instrumentable receiver) evaluated directly by `stmt`, not by statements
/// nested in it. Ordered by the position of the member name.
std::vector<const Expr*> statement_dereferences(const Stmt& stmt);

/// The receiver of a FieldAccess or a qualified MethodCall, else null.
const Expr* receiver_of(const Expr& e);

/// Every dereference site in method and constructor bodies, in source order.
/// Requires a type-checked program.
std::vector<DerefSite> enumerate_dereferences(const Program& program);

}  // namespace npefix
