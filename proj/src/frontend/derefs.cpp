#include "npefix/frontend/derefs.hpp"

#include <algorithm>
#include <functional>

namespace npefix {

namespace {

using BlockPath = std::vector<std::pair<const Block*, size_t>>;

bool find_path(const Block& block, const Stmt* target, BlockPath& path) {
  for (size_t i = 0; i < block.stmts.size(); ++i) {
    const Stmt& s = block.stmts[i];
    path.emplace_back(&block, i);
    if (&s == target) return true;
    bool found = std::visit(
        [&](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IfStmt>) {
            return find_path(n.then_block, target, path) ||
                   (n.else_block && find_path(*n.else_block, target, path));
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            return find_path(n.body, target, path);
          } else if constexpr (std::is_same_v<T, TryStmt>) {
            if (find_path(n.body, target, path)) return true;
            for (const auto& c : n.catches)
              if (find_path(c.body, target, path)) return true;
            return n.finally_block && find_path(*n.finally_block, target, path);
          } else if constexpr (std::is_same_v<T, BlockStmt>) {
            return find_path(n.block, target, path);
          } else {
            return false;
          }
        },
        s.node);
    if (found) return true;
    path.pop_back();
  }
  return false;
}

void for_each_expr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FieldAccess>) {
          for_each_expr(*n.object, fn);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          if (n.receiver) for_each_expr(*n.receiver, fn);
          for (const auto& a : n.args) for_each_expr(a, fn);
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          for (const auto& a : n.args) for_each_expr(a, fn);
        } else if constexpr (std::is_same_v<T, Unary>) {
          for_each_expr(*n.operand, fn);
        } else if constexpr (std::is_same_v<T, Binary>) {
          for_each_expr(*n.lhs, fn);
          for_each_expr(*n.rhs, fn);
        }
      },
      e.node);
}

void for_each_stmt_expr(const Stmt& s, const std::function<void(const Expr&)>& fn);

void for_each_block_expr(const Block& b, const std::function<void(const Expr&)>& fn) {
  for (const auto& s : b.stmts) for_each_stmt_expr(s, fn);
}

void for_each_stmt_expr(const Stmt& s, const std::function<void(const Expr&)>& fn) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          if (n.init) for_each_expr(*n.init, fn);
        } else if constexpr (std::is_same_v<T, Assign>) {
          for_each_expr(n.target, fn);
          for_each_expr(n.value, fn);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          for_each_expr(n.expr, fn);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          for_each_expr(n.cond, fn);
          for_each_block_expr(n.then_block, fn);
          if (n.else_block) for_each_block_expr(*n.else_block, fn);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          for_each_expr(n.cond, fn);
          for_each_block_expr(n.body, fn);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          if (n.value) for_each_expr(*n.value, fn);
        } else if constexpr (std::is_same_v<T, ThrowStmt>) {
          for_each_expr(n.value, fn);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          for_each_block_expr(n.body, fn);
          for (const auto& c : n.catches) for_each_block_expr(c.body, fn);
          if (n.finally_block) for_each_block_expr(*n.finally_block, fn);
        } else if constexpr (std::is_same_v<T, BlockStmt>) {
          for_each_block_expr(n.block, fn);
        }
      },
      s.node);
}

bool used_after(const BlockPath& path, const std::string& name) {
  bool used = false;
  auto probe = [&](const Expr& e) {
    if (const auto* n = e.as<Name>(); n && n->id == name) used = true;
  };
  for (const auto& [block, index] : path)
    for (size_t i = index + 1; i < block->stmts.size() && !used; ++i)
      for_each_stmt_expr(block->stmts[i], probe);
  return used;
}

bool has_later_exit(const BlockPath& path) {
  for (const auto& [block, index] : path)
    for (size_t i = index + 1; i < block->stmts.size(); ++i)
      if (block->stmts[i].is<ReturnStmt>() || block->stmts[i].is<ThrowStmt>()) return true;
  return false;
}

// Visits the expressions that belong to `s` itself, not to nested statements.
void own_exprs(const Stmt& s, const std::function<void(const Expr&)>& fn) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          if (n.init) for_each_expr(*n.init, fn);
        } else if constexpr (std::is_same_v<T, Assign>) {
          for_each_expr(n.target, fn);
          for_each_expr(n.value, fn);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          for_each_expr(n.expr, fn);
        } else if constexpr (std::is_same_v<T, IfStmt> || std::is_same_v<T, WhileStmt>) {
          for_each_expr(n.cond, fn);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          if (n.value) for_each_expr(*n.value, fn);
        } else if constexpr (std::is_same_v<T, ThrowStmt>) {
          for_each_expr(n.value, fn);
        }
      },
      s.node);
}

}  // namespace

std::string crash_point_key(std::string_view path, Span member_span) {
  return std::string(path) + ":" + std::to_string(member_span.line) + ":" +
         std::to_string(member_span.col);
}

bool is_instrumentable_receiver(const Expr& receiver) {
  if (receiver.is<ThisExpr>()) return false;
  if (receiver.ann.name_kind == NameKind::Class) return false;
  return true;
}

bool is_statement_skippable(const Stmt& stmt, const MethodDecl& method) {
  if (stmt.is<IfStmt>() || stmt.is<WhileStmt>()) return false;
  if (stmt.is<ExprStmt>() || stmt.is<Assign>()) return true;
  if (!method.body) return false;
  BlockPath path;
  if (!find_path(*method.body, &stmt, path)) return false;
  if (const auto* decl = stmt.as<VarDecl>()) return !used_after(path, decl->name);
  if (stmt.is<ReturnStmt>() || stmt.is<ThrowStmt>()) {
    if (method.return_type == "void") return true;
    return has_later_exit(path);
  }
  return false;
}

const Expr* receiver_of(const Expr& e) {
  if (const auto* fa = e.as<FieldAccess>()) return fa->object.get();
  if (const auto* mc = e.as<MethodCall>()) return mc->receiver.get();
  return nullptr;
}

static Span member_span_of(const Expr& e) {
  if (const auto* fa = e.as<FieldAccess>()) return fa->member_span;
  return e.as<MethodCall>()->member_span;
}

std::vector<const Expr*> statement_dereferences(const Stmt& stmt) {
  std::vector<const Expr*> out;
  own_exprs(stmt, [&](const Expr& e) {
    const Expr* r = receiver_of(e);
    if (r && is_instrumentable_receiver(*r)) out.push_back(&e);
  });
  std::stable_sort(out.begin(), out.end(), [](const Expr* a, const Expr* b) {
    return member_span_of(*a).begin < member_span_of(*b).begin;
  });
  return out;
}

std::vector<DerefSite> enumerate_dereferences(const Program& program) {
  std::vector<DerefSite> out;
  for (const auto& unit : program.units) {
    for (const auto& cls : unit.classes) {
      for (const auto* group : {&cls.constructors, &cls.methods}) {
        for (const auto& method : *group) {
          if (!method.body) continue;
          std::string sig = method_signature(cls, method);
          std::function<void(const Block&)> walk_block;
          auto visit_stmt = [&](const Stmt& s) {
            auto derefs = statement_dereferences(s);
            if (derefs.empty()) return;
            bool skippable = is_statement_skippable(s, method);
            for (const Expr* e : derefs) {
              DerefSite site;
              site.key = crash_point_key(unit.path, member_span_of(*e));
              site.receiver_type = receiver_of(*e)->ann.type;
              site.method_signature = sig;
              site.skippable = skippable;
              site.path = unit.path;
              site.span = e->span;
              site.expr = e;
              site.stmt = &s;
              site.cls = &cls;
              site.method = &method;
              out.push_back(std::move(site));
            }
          };
          walk_block = [&](const Block& b) {
            for (const auto& s : b.stmts) {
              visit_stmt(s);
              std::visit(
                  [&](const auto& n) {
                    using T = std::decay_t<decltype(n)>;
                    if constexpr (std::is_same_v<T, IfStmt>) {
                      walk_block(n.then_block);
                      if (n.else_block) walk_block(*n.else_block);
                    } else if constexpr (std::is_same_v<T, WhileStmt>) {
                      walk_block(n.body);
                    } else if constexpr (std::is_same_v<T, TryStmt>) {
                      walk_block(n.body);
                      for (const auto& c : n.catches) walk_block(c.body);
                      if (n.finally_block) walk_block(*n.finally_block);
                    } else if constexpr (std::is_same_v<T, BlockStmt>) {
                      walk_block(n.block);
                    }
                  },
                  s.node);
            }
          };
          walk_block(*method.body);
        }
      }
    }
  }
  return out;
}

}  // namespace npefix
