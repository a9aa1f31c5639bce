#include "npefix/transform/transform.hpp"

#include <algorithm>
#include <set>

#include "npefix/frontend/derefs.hpp"
#include "npefix/frontend/errors.hpp"
#include "npefix/frontend/printer.hpp"
#include "npefix/frontend/types.hpp"

namespace npefix {

namespace {

// -- node builders ------------------------------------------------------------

Expr mk(Expr::Node node) {
  Expr e;
  e.node = std::move(node);
  return e;
}

Expr str(std::string s) { return mk(StringLit{std::move(s)}); }
Expr name(std::string id) { return mk(Name{std::move(id)}); }

Expr hook(const char* method, std::vector<Expr> args) {
  MethodCall call;
  call.method = method;
  call.args = std::move(args);
  return mk(std::move(call));
}

Stmt st(Stmt::Node node) {
  Stmt s;
  s.node = std::move(node);
  return s;
}

Stmt expr_stmt(Expr e) { return st(ExprStmt{std::move(e)}); }

Stmt decl(std::string type, std::string var, std::optional<Expr> init) {
  return st(VarDecl{std::move(type), std::move(var), std::move(init)});
}

Stmt ret(std::optional<Expr> value) { return st(ReturnStmt{std::move(value)}); }

Block block(std::vector<Stmt> stmts) {
  Block b;
  b.stmts = std::move(stmts);
  return b;
}

Stmt guard(Expr cond, Stmt body) {
  std::vector<Stmt> stmts;
  stmts.push_back(std::move(body));
  return st(IfStmt{std::move(cond), block(std::move(stmts)), std::nullopt});
}

// -- generic rewriting --------------------------------------------------------

// Called bottom-up with the original statement and a copy whose nested blocks
// were already rewritten; returns the replacement statements.
using StmtRewriter = std::function<std::vector<Stmt>(const Stmt& original, Stmt copy)>;

Block rewrite_block(const Block& b, const StmtRewriter& fn);

Stmt rewrite_children(const Stmt& s, const StmtRewriter& fn) {
  Stmt copy = s;
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        const T& orig = std::get<T>(s.node);
        if constexpr (std::is_same_v<T, IfStmt>) {
          n.then_block = rewrite_block(orig.then_block, fn);
          if (orig.else_block) n.else_block = rewrite_block(*orig.else_block, fn);
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          n.body = rewrite_block(orig.body, fn);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          n.body = rewrite_block(orig.body, fn);
          for (size_t i = 0; i < orig.catches.size(); ++i)
            n.catches[i].body = rewrite_block(orig.catches[i].body, fn);
          if (orig.finally_block) n.finally_block = rewrite_block(*orig.finally_block, fn);
        } else if constexpr (std::is_same_v<T, BlockStmt>) {
          n.block = rewrite_block(orig.block, fn);
        }
      },
      copy.node);
  return copy;
}

Block rewrite_block(const Block& b, const StmtRewriter& fn) {
  Block out;
  out.span = b.span;
  for (const Stmt& s : b.stmts)
    for (Stmt& r : fn(s, rewrite_children(s, fn))) out.stmts.push_back(std::move(r));
  return out;
}

std::vector<Stmt> keep(Stmt s) {
  std::vector<Stmt> v;
  v.push_back(std::move(s));
  return v;
}

// Applies `fn` to every method and constructor body of the program.
template <class Fn>
Program map_methods(const Program& in, Fn&& fn) {
  Program out = in;
  for (size_t u = 0; u < in.units.size(); ++u) {
    for (size_t c = 0; c < in.units[u].classes.size(); ++c) {
      const ClassDecl& cls = in.units[u].classes[c];
      ClassDecl& dst = out.units[u].classes[c];
      auto apply = [&](const std::vector<MethodDecl>& src, std::vector<MethodDecl>& into) {
        for (size_t m = 0; m < src.size(); ++m)
          if (src[m].body) into[m].body = fn(in.units[u], cls, src[m]);
      };
      apply(cls.constructors, dst.constructors);
      apply(cls.methods, dst.methods);
    }
  }
  return out;
}

// Applies `fn` to every expression owned by `s` itself.
void map_own_exprs(Stmt& s, const std::function<void(Expr&)>& fn) {
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          if (n.init) fn(*n.init);
        } else if constexpr (std::is_same_v<T, Assign>) {
          fn(n.target);
          fn(n.value);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          fn(n.expr);
        } else if constexpr (std::is_same_v<T, IfStmt> || std::is_same_v<T, WhileStmt>) {
          fn(n.cond);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          if (n.value) fn(*n.value);
        } else if constexpr (std::is_same_v<T, ThrowStmt>) {
          fn(n.value);
        }
      },
      s.node);
}

Span member_span(const Expr& e) {
  if (const auto* fa = e.as<FieldAccess>()) return fa->member_span;
  return e.as<MethodCall>()->member_span;
}

bool is_hook_call(const Expr& e, const char* hook_name) {
  const auto* call = e.as<MethodCall>();
  return call && !call->receiver && call->method == hook_name;
}

}  // namespace

// -- value pool -----------------------------------------------------------------

Program inject_value_pool(const CheckedProgram& in, std::string_view prefix) {
  const std::string mid = std::string(prefix) + "mid";
  return map_methods(in.program, [&](const CompilationUnit&, const ClassDecl&, const MethodDecl& m) {
    Block body = rewrite_block(*m.body, [&](const Stmt&, Stmt s) {
      if (auto* d = s.as<VarDecl>(); d && d->init) {
        d->init = hook(hooks::kInitVar, [&] {
          std::vector<Expr> a;
          a.push_back(std::move(*d->init));
          a.push_back(name(mid));
          a.push_back(str(d->name));
          a.push_back(str(d->type));
          return a;
        }());
      } else if (auto* a = s.as<Assign>()) {
        const auto* target = a->target.as<Name>();
        if (target && a->target.ann.name_kind == NameKind::Local) {
          std::vector<Expr> args;
          args.push_back(std::move(a->value));
          args.push_back(name(mid));
          args.push_back(str(target->id));
          args.push_back(str(a->target.ann.type));
          a->value = hook(hooks::kModifVar, std::move(args));
        }
      }
      return keep(std::move(s));
    });

    std::vector<Expr> start;
    start.push_back(name(mid));
    start.push_back(m.is_static ? mk(NullLit{}) : mk(ThisExpr{}));
    for (const auto& p : m.params) {
      start.push_back(str(p.name));
      start.push_back(str(p.type));
      start.push_back(name(p.name));
    }

    TryStmt wrapper;
    wrapper.body = std::move(body);
    std::vector<Expr> end_args;
    end_args.push_back(name(mid));
    wrapper.finally_block = block(keep(expr_stmt(hook(hooks::kEndMethod, std::move(end_args)))));
    wrapper.synthetic.value = true;

    std::vector<Stmt> out;
    out.push_back(decl("int", mid, hook(hooks::kFreeId, {})));
    out.push_back(expr_stmt(hook(hooks::kStartMethod, std::move(start))));
    out.push_back(st(std::move(wrapper)));
    Block b = block(std::move(out));
    b.span = m.body->span;
    return b;
  });
}

// -- catch stack ----------------------------------------------------------------

Program inject_catch_stack(const CheckedProgram& in, std::string_view prefix) {
  return map_methods(in.program, [&](const CompilationUnit&, const ClassDecl&, const MethodDecl& m) {
    int counter = 0;
    return rewrite_block(*m.body, [&](const Stmt&, Stmt s) {
      auto* t = s.as<TryStmt>();
      if (!t || t->synthetic.value) return keep(std::move(s));
      const std::string id = std::string(prefix) + "try" + std::to_string(counter++);
      auto remove_call = [&] {
        std::vector<Expr> a;
        a.push_back(name(id));
        return expr_stmt(hook(hooks::kCatchRemove, std::move(a)));
      };

      std::vector<Expr> add_args;
      add_args.push_back(name(id));
      for (const auto& c : t->catches) add_args.push_back(str(c.type));
      t->body.stmts.insert(t->body.stmts.begin(), expr_stmt(hook(hooks::kCatchAdd, std::move(add_args))));
      for (auto& c : t->catches) c.body.stmts.insert(c.body.stmts.begin(), remove_call());
      if (!t->finally_block) t->finally_block = Block{};
      t->finally_block->stmts.insert(t->finally_block->stmts.begin(), remove_call());

      std::vector<Stmt> out;
      out.push_back(decl("int", id, hook(hooks::kFreeId, {})));
      out.push_back(std::move(s));
      return out;
    });
  });
}

// -- method skip ----------------------------------------------------------------

Program inject_method_skip(const CheckedProgram& in, std::string_view prefix) {
  const std::string signal = std::string(prefix) + "f";
  return map_methods(in.program, [&](const CompilationUnit&, const ClassDecl&, const MethodDecl& m) {
    std::vector<Stmt> dispatch;
    const std::string& rt = m.return_type;
    auto strategy_is = [](const char* id) {
      std::vector<Expr> a;
      a.push_back(str(id));
      return hook(hooks::kStrategyIs, std::move(a));
    };
    auto typed_hook = [&](const char* h) {
      std::vector<Expr> a;
      a.push_back(str(rt));
      return hook(h, std::move(a));
    };
    if (rt == "void") {
      dispatch.push_back(ret(std::nullopt));
    } else {
      // null is not a value of the primitive types
      if (!TypeTable::is_primitive(rt)) dispatch.push_back(guard(strategy_is("S4a"), ret(mk(NullLit{}))));
      dispatch.push_back(guard(strategy_is("S4b"), ret(typed_hook(hooks::kGetVar))));
      dispatch.push_back(guard(strategy_is("S4c"), ret(typed_hook(hooks::kNewVar))));
      dispatch.push_back(st(ThrowStmt{name(signal)}));
    }

    TryStmt wrapper;
    wrapper.body = *m.body;
    CatchClause handler;
    handler.type = std::string(kForceReturnError);
    handler.var = signal;
    handler.body = block(std::move(dispatch));
    wrapper.catches.push_back(std::move(handler));
    wrapper.synthetic.value = true;
    Block b = block(keep(st(std::move(wrapper))));
    b.span = m.body->span;
    return b;
  });
}

// -- line skip ------------------------------------------------------------------

namespace {

bool is_simple_receiver(const Expr& r) {
  if (r.is<Name>()) return r.ann.name_kind != NameKind::Class;
  if (const auto* fa = r.as<FieldAccess>()) return fa->object->is<ThisExpr>();
  return false;
}

}  // namespace

Program inject_line_skip(const CheckedProgram& in) {
  return map_methods(in.program, [&](const CompilationUnit& unit, const ClassDecl&, const MethodDecl& m) {
    return rewrite_block(*m.body, [&](const Stmt& orig, Stmt s) {
      bool candidate = orig.is<VarDecl>() || orig.is<Assign>() || orig.is<ExprStmt>() ||
                       orig.is<ReturnStmt>() || orig.is<ThrowStmt>();
      if (!candidate) return keep(std::move(s));
      auto derefs = statement_dereferences(orig);
      if (derefs.empty() || !is_statement_skippable(orig, m)) return keep(std::move(s));

      std::vector<Expr> args;
      std::set<std::string> seen;
      for (const Expr* d : derefs) {
        const Expr* r = receiver_of(*d);
        if (!is_simple_receiver(*r) || !seen.insert(print_expr(*r)).second) continue;
        args.push_back(str(crash_point_key(unit.path, member_span(*d))));
        args.push_back(*r);
        args.push_back(str(r->ann.type));
      }
      Expr cond = hook(hooks::kSkipLine, std::move(args));

      if (auto* d = s.as<VarDecl>()) {
        std::vector<Stmt> out;
        Expr init = std::move(*d->init);
        d->init.reset();
        std::string var = d->name;
        out.push_back(std::move(s));
        out.push_back(guard(std::move(cond), st(Assign{name(var), std::move(init)})));
        return out;
      }
      return keep(guard(std::move(cond), std::move(s)));
    });
  });
}

// -- dereference checks ---------------------------------------------------------

namespace {

void wrap_receivers(Expr& e, const std::string& path, const TypeTable& types) {
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FieldAccess>) {
          wrap_receivers(*n.object, path, types);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          if (n.receiver) wrap_receivers(*n.receiver, path, types);
          for (auto& a : n.args) wrap_receivers(a, path, types);
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          for (auto& a : n.args) wrap_receivers(a, path, types);
        } else if constexpr (std::is_same_v<T, Unary>) {
          wrap_receivers(*n.operand, path, types);
        } else if constexpr (std::is_same_v<T, Binary>) {
          wrap_receivers(*n.lhs, path, types);
          wrap_receivers(*n.rhs, path, types);
        }
      },
      e.node);

  Box<Expr>* slot = nullptr;
  if (auto* fa = e.as<FieldAccess>()) slot = &fa->object;
  else if (auto* mc = e.as<MethodCall>(); mc && mc->receiver) slot = &mc->receiver;
  if (!slot) return;
  Expr& r = **slot;
  if (!is_instrumentable_receiver(r) || is_hook_call(r, hooks::kCheckForNull)) return;
  if (!types.is_class_type(r.ann.type)) return;
  std::string type = r.ann.type;
  std::vector<Expr> args;
  args.push_back(std::move(r));
  args.push_back(str(crash_point_key(path, member_span(e))));
  args.push_back(str(std::move(type)));
  *slot = Box<Expr>(hook(hooks::kCheckForNull, std::move(args)));
}

}  // namespace

Program inject_deref_checks(const CheckedProgram& in) {
  return map_methods(in.program, [&](const CompilationUnit& unit, const ClassDecl&, const MethodDecl& m) {
    return rewrite_block(*m.body, [&](const Stmt&, Stmt s) {
      map_own_exprs(s, [&](Expr& e) { wrap_receivers(e, unit.path, in.types); });
      return keep(std::move(s));
    });
  });
}

// -- pipeline -------------------------------------------------------------------

CheckedProgramPtr transform_all(const CheckedProgram& in, const TransformConfig& config) {
  if (in.instrumented || uses_reserved_names(in.program))
    throw TransformError("program is already instrumented (reserved names present)");
  if (!std::string_view(config.prefix).starts_with(kReservedPrefix))
    throw TransformError("name prefix must start with '" + std::string(kReservedPrefix) + "'");

  CheckedProgramPtr holder;
  const CheckedProgram* cur = &in;
  auto step = [&](const char* pass, Program p) {
    try {
      holder = check_program(std::move(p), CheckOptions{true});
    } catch (const FrontendError& e) {
      throw TransformError(std::string("internal error: output of ") + pass +
                           " does not type-check: " + e.what());
    }
    cur = holder.get();
  };
  if (config.enable_value_pool) step("value pool", inject_value_pool(*cur, config.prefix));
  if (config.enable_catch_stack) step("catch stack", inject_catch_stack(*cur, config.prefix));
  if (config.enable_method_skip) step("method skip", inject_method_skip(*cur, config.prefix));
  if (config.enable_line_skip) step("line skip", inject_line_skip(*cur));
  if (config.enable_deref_checks) step("deref checks", inject_deref_checks(*cur));
  if (!holder) holder = check_program(in.program);
  return holder;
}

// -- null-check seeding ---------------------------------------------------------

namespace {

// Matches `x == null`, `null != x`, `!(x == null)`, ... on a variable or
// field. Sets `nonnull_when_true` to whether the then-branch runs for x != null.
bool match_null_check(const Expr& cond, std::string& subject, std::string& op,
                      bool& nonnull_when_true) {
  const Expr* e = &cond;
  bool negated = false;
  while (const auto* u = e->as<Unary>()) {
    if (u->op != UnaryOp::Not) return false;
    negated = !negated;
    e = u->operand.get();
  }
  const auto* b = e->as<Binary>();
  if (!b || (b->op != BinaryOp::Eq && b->op != BinaryOp::Ne)) return false;
  const Expr* other = nullptr;
  if (b->rhs->is<NullLit>()) other = b->lhs.get();
  else if (b->lhs->is<NullLit>()) other = b->rhs.get();
  if (!other || !(other->is<Name>() || other->is<FieldAccess>())) return false;
  subject = print_expr(*other);
  op = std::string(to_string(b->op));
  nonnull_when_true = (b->op == BinaryOp::Ne) != negated;
  return true;
}

std::string stmt_kind(const Stmt& s) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) return "declaration";
        else if constexpr (std::is_same_v<T, Assign>) return "assignment";
        else if constexpr (std::is_same_v<T, ExprStmt>) return "expression";
        else if constexpr (std::is_same_v<T, IfStmt>) return "if";
        else if constexpr (std::is_same_v<T, WhileStmt>) return "while";
        else if constexpr (std::is_same_v<T, ReturnStmt>) return "return";
        else if constexpr (std::is_same_v<T, ThrowStmt>) return "throw";
        else if constexpr (std::is_same_v<T, TryStmt>) return "try";
        else return "block";
      },
      s.node);
}

}  // namespace

SeedResult seed_remove_null_checks(const Program& program,
                                   const std::function<bool(const CompilationUnit&)>& unit_filter) {
  SeedResult result;
  result.program = program;
  for (size_t u = 0; u < program.units.size(); ++u) {
    const CompilationUnit& unit = program.units[u];
    if (unit_filter && !unit_filter(unit)) continue;
    auto fn = [&](const Stmt& orig, Stmt s) {
      auto* i = s.as<IfStmt>();
      std::string subject, op;
      bool nonnull_when_true = false;
      if (!i || !match_null_check(i->cond, subject, op, nonnull_when_true)) return keep(std::move(s));
      std::vector<Stmt> kept;
      if (nonnull_when_true) kept = std::move(i->then_block.stmts);
      else if (i->else_block) kept = std::move(i->else_block->stmts);
      RemovedCheck rc;
      rc.path = unit.path;
      rc.span = orig.span;
      rc.subject = subject;
      rc.op = op;
      rc.negated = !i->cond.is<Binary>();
      rc.guarded = kept.empty() ? "empty" : stmt_kind(kept.front());
      result.report.removed_checks.push_back(std::move(rc));
      return kept;
    };
    size_t first = result.report.removed_checks.size();
    CompilationUnit& dst = result.program.units[u];
    for (size_t c = 0; c < unit.classes.size(); ++c) {
      const ClassDecl& cls = unit.classes[c];
      for (size_t m = 0; m < cls.constructors.size(); ++m)
        if (cls.constructors[m].body)
          dst.classes[c].constructors[m].body = rewrite_block(*cls.constructors[m].body, fn);
      for (size_t m = 0; m < cls.methods.size(); ++m)
        if (cls.methods[m].body) dst.classes[c].methods[m].body = rewrite_block(*cls.methods[m].body, fn);
    }
    // rewriting is bottom-up; report in source order
    std::stable_sort(result.report.removed_checks.begin() + first, result.report.removed_checks.end(),
                     [](const RemovedCheck& a, const RemovedCheck& b) { return a.span.begin < b.span.begin; });
  }
  result.report.count = result.report.removed_checks.size();
  return result;
}

}  // namespace npefix
