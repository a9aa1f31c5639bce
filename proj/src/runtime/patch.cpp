#include "npefix/runtime/patch.hpp"

#include <functional>

#include "json.hpp"
#include "npefix/frontend/derefs.hpp"
#include "npefix/frontend/errors.hpp"
#include "npefix/frontend/parser.hpp"
#include "npefix/frontend/printer.hpp"
#include "npefix/runtime/new_var.hpp"

namespace npefix {

std::string PatchSuggestion::to_json() const {
  nlohmann::json j;
  j["crash_point"] = crash_point;
  j["strategy"] = std::string(to_string(strategy.id));
  j["parameter"] = strategy.parameter.empty() ? nlohmann::json(nullptr) : nlohmann::json(strategy.parameter);
  j["path"] = path;
  j["line"] = line;
  j["method"] = method;
  j["original"] = original;
  j["snippet"] = snippet;
  return j.dump();
}

namespace {

bool same_node(const Span& a, const Span& b) { return a.begin == b.begin && a.end == b.end; }

// Replaces the first expression in `e` (pre-order) with the span and kind of
// `target`.
bool substitute(Expr& e, const Expr& target, const Expr& replacement) {
  if (same_node(e.span, target.span) && e.node.index() == target.node.index()) {
    e = replacement;
    return true;
  }
  return std::visit(
      [&](auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FieldAccess>) {
          return substitute(*n.object, target, replacement);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          if (n.receiver && substitute(*n.receiver, target, replacement)) return true;
          for (auto& a : n.args)
            if (substitute(a, target, replacement)) return true;
          return false;
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          for (auto& a : n.args)
            if (substitute(a, target, replacement)) return true;
          return false;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return substitute(*n.operand, target, replacement);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return substitute(*n.lhs, target, replacement) || substitute(*n.rhs, target, replacement);
        } else {
          return false;
        }
      },
      e.node);
}

// Substitutes inside the expressions owned by `s` (conditions, values, targets).
bool substitute(Stmt& s, const Expr& target, const Expr& replacement) {
  return std::visit(
      [&](auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          return n.init && substitute(*n.init, target, replacement);
        } else if constexpr (std::is_same_v<T, Assign>) {
          return substitute(n.target, target, replacement) || substitute(n.value, target, replacement);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          return substitute(n.expr, target, replacement);
        } else if constexpr (std::is_same_v<T, IfStmt> || std::is_same_v<T, WhileStmt>) {
          return substitute(n.cond, target, replacement);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          return n.value && substitute(*n.value, target, replacement);
        } else if constexpr (std::is_same_v<T, ThrowStmt>) {
          return substitute(n.value, target, replacement);
        } else {
          return false;
        }
      },
      s.node);
}

bool is_assignable(const Expr& r) {
  if (r.is<Name>()) return r.ann.name_kind != NameKind::Class;
  return r.is<FieldAccess>() && r.ann.name_kind != NameKind::Class;
}

std::string indent_lines(const std::string& text, int indent) {
  return std::string(static_cast<size_t>(indent) * 4, ' ') + text;
}

// `T x = init;` becomes `T x;` plus the statement `x = init;`, so only the
// assignment is guarded.
struct Split {
  std::string decl;   // empty when the statement is not a declaration
  Stmt stmt;
};

Split split_declaration(const Stmt& s) {
  Split out{"", s};
  if (const auto* d = s.as<VarDecl>(); d && d->init) {
    out.decl = d->type + " " + d->name + ";\n";
    Expr target;
    target.node = Name{d->name};
    out.stmt.node = Assign{std::move(target), *d->init};
  }
  return out;
}

std::string block_of(const Stmt& s) { return "{\n" + print_stmt(s, 1) + "}"; }

bool replace_stmt(Block& b, const Span& span, std::vector<Stmt>& with) {
  for (size_t i = 0; i < b.stmts.size(); ++i) {
    Stmt& s = b.stmts[i];
    if (same_node(s.span, span)) {
      b.stmts.erase(b.stmts.begin() + static_cast<std::ptrdiff_t>(i));
      b.stmts.insert(b.stmts.begin() + static_cast<std::ptrdiff_t>(i), with.begin(), with.end());
      return true;
    }
    bool done = std::visit(
        [&](auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IfStmt>) {
            return replace_stmt(n.then_block, span, with) || (n.else_block && replace_stmt(*n.else_block, span, with));
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            return replace_stmt(n.body, span, with);
          } else if constexpr (std::is_same_v<T, TryStmt>) {
            if (replace_stmt(n.body, span, with)) return true;
            for (auto& c : n.catches)
              if (replace_stmt(c.body, span, with)) return true;
            return n.finally_block && replace_stmt(*n.finally_block, span, with);
          } else if constexpr (std::is_same_v<T, BlockStmt>) {
            return replace_stmt(n.block, span, with);
          } else {
            return false;
          }
        },
        s.node);
    if (done) return true;
  }
  return false;
}

}  // namespace

std::optional<PatchSuggestion> suggest_patch(const CheckedProgram& original, const std::string& crash_point,
                                             const Strategy& strategy, int depth_budget) {
  const DerefSite* site = nullptr;
  auto sites = enumerate_dereferences(original.program);
  for (const auto& s : sites)
    if (s.key == crash_point) site = &s;
  if (!site) return std::nullopt;

  const Expr& receiver = *receiver_of(*site->expr);
  const std::string r = print_expr(receiver);
  ConstructionPlanner planner(original.types, depth_budget);

  // Source text of the value a strategy injects or returns.
  auto value_text = [&]() -> std::optional<std::string> {
    switch (strategy.id) {
      case StrategyId::S1a:
      case StrategyId::S1b:
      case StrategyId::S4b:
        return strategy.parameter;
      case StrategyId::S2a:
      case StrategyId::S2b:
      case StrategyId::S4c: {
        auto plan = planner.plan(strategy.parameter);
        if (!plan) return std::nullopt;
        return ConstructionPlanner::render(*plan);
      }
      case StrategyId::S4a: return "null";
      default: return "";
    }
  }();
  if (!value_text) return std::nullopt;

  const Stmt& stmt = *site->stmt;
  std::string text;
  switch (strategy.id) {
    case StrategyId::S1b:
    case StrategyId::S2b:
      if (!is_assignable(receiver)) return std::nullopt;
      text = "if (" + r + " == null) {\n" + indent_lines(r + " = " + *value_text + ";\n", 1) + "}\n" +
             print_stmt(stmt);
      break;
    case StrategyId::S1a:
    case StrategyId::S2a: {
      Split split = split_declaration(stmt);
      Stmt replaced = split.stmt;
      Expr replacement = parse_expression(site->path, *value_text);
      if (!substitute(replaced, receiver, replacement)) return std::nullopt;
      text = split.decl + "if (" + r + " == null) " + block_of(replaced) + " else " + block_of(split.stmt) + "\n";
      break;
    }
    case StrategyId::S3: {
      Split split = split_declaration(stmt);
      text = split.decl + "if (" + r + " != null) " + block_of(split.stmt) + "\n";
      break;
    }
    default: {
      std::string ret = strategy.id == StrategyId::S4d ? "return;" : "return " + *value_text + ";";
      text = "if (" + r + " == null) {\n" + indent_lines(ret, 1) + "\n}\n" + print_stmt(stmt);
      break;
    }
  }

  // Normalize through the parser; a snippet that does not parse is a bug.
  std::string snippet;
  for (const auto& s : parse_statements(site->path, text)) snippet += print_stmt(s);

  PatchSuggestion p;
  p.crash_point = crash_point;
  p.strategy = strategy;
  p.path = site->path;
  p.line = stmt.span.line;
  p.method = site->method_signature;
  p.original = print_stmt(stmt);
  p.snippet = std::move(snippet);
  p.stmt_span = stmt.span;
  return p;
}

CheckedProgramPtr apply_patch(const CheckedProgram& original, const PatchSuggestion& patch) {
  Program copy = original.program;
  std::vector<Stmt> with = parse_statements(patch.path, patch.snippet);
  bool done = false;
  for (auto& unit : copy.units) {
    if (unit.path != patch.path) continue;
    for (auto& cls : unit.classes)
      for (auto* group : {&cls.constructors, &cls.methods})
        for (auto& m : *group)
          if (!done && m.body) done = replace_stmt(*m.body, patch.stmt_span, with);
  }
  if (!done) throw TypeError(patch.path, patch.stmt_span, "patch target statement not found");
  return check_program(std::move(copy));
}

}  // namespace npefix
