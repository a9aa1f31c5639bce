#include "npefix/frontend/checker.hpp"

#include <map>
#include <set>

#include "npefix/frontend/errors.hpp"

namespace npefix {

const std::string& prelude_source() {
  static const std::string text = R"(class Exception {
    String message;
    Exception() { }
    Exception(String m) { message = m; }
    String getMessage() { return message; }
}
class NullPointerException extends Exception {
    NullPointerException() { }
    NullPointerException(String m) { message = m; }
}
class AssertionError extends Exception {
    AssertionError() { }
    AssertionError(String m) { message = m; }
}
class ArithmeticException extends Exception {
    ArithmeticException() { }
    ArithmeticException(String m) { message = m; }
}
class StackOverflowError extends Exception {
    StackOverflowError() { }
    StackOverflowError(String m) { message = m; }
}
class __npefix_ForceReturnError {
}
)";
  return text;
}

namespace {

const std::map<std::string, Hook, std::less<>>& hook_names() {
  static const std::map<std::string, Hook, std::less<>> table = {
      {"__npefix_freeId", Hook::FreeId},         {"__npefix_catchAdd", Hook::CatchAdd},
      {"__npefix_catchRemove", Hook::CatchRemove}, {"__npefix_startMethod", Hook::StartMethod},
      {"__npefix_endMethod", Hook::EndMethod},   {"__npefix_initVar", Hook::InitVar},
      {"__npefix_modifVar", Hook::ModifVar},     {"__npefix_checkForNull", Hook::CheckForNull},
      {"__npefix_skipLine", Hook::SkipLine},     {"__npefix_strategyIs", Hook::StrategyIs},
      {"__npefix_getVar", Hook::GetVar},         {"__npefix_newVar", Hook::NewVar},
  };
  return table;
}

Builtin builtin_of(std::string_view name) {
  if (name == "print") return Builtin::Print;
  if (name == "assertTrue") return Builtin::AssertTrue;
  if (name == "assertEquals") return Builtin::AssertEquals;
  return Builtin::None;
}

class Checker {
public:
  Checker(CheckedProgram& out, CheckOptions options) : out_(out), options_(options) {}

  void run() {
    register_classes(out_.prelude, true);
    register_classes(out_.program, false);
    if (auto cycle = out_.types.finalize())
      fail_at(out_.types.find(*cycle)->path, out_.types.find(*cycle)->decl->span,
              "cyclic inheritance involving '" + *cycle + "'");
    validate_hierarchy();
    bool saved = options_.allow_reserved;
    options_.allow_reserved = true;
    check_units(out_.prelude);
    options_.allow_reserved = saved;
    check_units(out_.program);
  }

private:
  // -- diagnostics -----------------------------------------------------------

  [[noreturn]] void fail_at(const std::string& path, Span span, const std::string& msg) const {
    throw TypeError(path, span, msg);
  }
  [[noreturn]] void fail(Span span, const std::string& msg) const { fail_at(path_, span, msg); }

  void check_name(Span span, const std::string& name) const {
    if (is_reserved_name(name) && !options_.allow_reserved)
      fail(span, "identifier '" + name + "' uses the reserved prefix");
  }

  // -- declarations ----------------------------------------------------------

  void register_classes(Program& program, bool builtin) {
    for (auto& unit : program.units) {
      path_ = unit.path;
      for (auto& cls : unit.classes) {
        if (!builtin) check_name(cls.span, cls.name);
        if (out_.types.has_class(cls.name) || TypeTable::is_primitive(cls.name) || cls.name == "void")
          fail(cls.span, "duplicate class '" + cls.name + "'");
        ClassInfo info;
        info.name = cls.name;
        info.kind = cls.kind;
        info.super = cls.extends;
        info.interfaces = cls.implements;
        info.decl = &cls;
        info.path = unit.path;
        info.builtin = builtin;
        for (auto& f : cls.fields) {
          if (!builtin) check_name(f.span, f.name);
          for (const auto& other : info.fields)
            if (other.name == f.name) fail(f.span, "duplicate field '" + f.name + "'");
          info.fields.push_back(FieldInfo{f.name, f.type, f.is_static, cls.name, &f});
        }
        for (auto& c : cls.constructors) {
          for (const auto* other : info.constructors)
            if (other->params.size() == c.params.size())
              fail(c.span, "constructors of '" + cls.name + "' must differ in arity");
          info.constructors.push_back(&c);
        }
        for (auto& m : cls.methods) {
          if (!builtin) check_name(m.span, m.name);
          if (info.methods.count(m.name)) fail(m.span, "duplicate method '" + m.name + "'");
          if (cls.kind == ClassKind::Interface) m.is_abstract = true;
          info.methods.emplace(m.name, &m);
        }
        out_.types.add(std::move(info));
      }
    }
  }

  void validate_hierarchy() {
    const TypeTable& t = out_.types;
    for (const auto& name : t.classes()) {
      const ClassInfo& c = *t.find(name);
      path_ = c.path;
      const ClassDecl& decl = *c.decl;
      if (c.super) {
        const ClassInfo* s = t.find(*c.super);
        if (!s) fail(decl.span, "unknown superclass '" + *c.super + "'");
        if (s->kind == ClassKind::Interface) fail(decl.span, "cannot extend interface '" + s->name + "'");
      }
      for (const auto& i : c.interfaces) {
        const ClassInfo* s = t.find(i);
        if (!s) fail(decl.span, "unknown interface '" + i + "'");
        if (s->kind != ClassKind::Interface) fail(decl.span, "'" + i + "' is not an interface");
      }
      if (c.kind == ClassKind::Interface && (!c.fields.empty() || !c.constructors.empty()))
        fail(decl.span, "interfaces may only declare method signatures");
      for (const auto& f : c.fields) {
        if (!t.is_valid_type(f.type)) fail(f.decl->span, "unknown type '" + f.type + "'");
        if (c.super && t.find_field(*c.super, f.name))
          fail(f.decl->span, "field '" + f.name + "' hides an inherited field");
      }
      for (const auto& [mname, m] : c.methods) {
        check_signature_types(*m);
        if (m->is_abstract && c.kind == ClassKind::Class)
          fail(m->span, "abstract method '" + mname + "' in concrete class");
        if (m->is_abstract && m->is_static) fail(m->span, "static methods cannot be abstract");
        // Overrides must keep the signature.
        std::vector<std::string> parents = c.interfaces;
        if (c.super) parents.insert(parents.begin(), *c.super);
        for (const auto& p : parents) {
          const MethodDecl* base = t.find_method(p, mname);
          if (!base) continue;
          bool same = base->return_type == m->return_type && base->params.size() == m->params.size() &&
                      base->is_static == m->is_static;
          for (size_t i = 0; same && i < m->params.size(); ++i)
            same = base->params[i].type == m->params[i].type;
          if (!same) fail(m->span, "method '" + mname + "' overrides with a different signature");
        }
      }
      for (const auto* ctor : c.constructors) check_signature_types(*ctor);
      if (c.kind == ClassKind::Class) {
        for (const auto& anc : t.ancestors(name)) {
          for (const auto& [mname, m] : t.find(anc)->methods) {
            if (!m->is_abstract) continue;
            std::string owner;
            const MethodDecl* impl = t.find_method(name, mname, &owner);
            if (!impl || impl->is_abstract)
              fail(decl.span, "class '" + name + "' does not implement '" + mname + "'");
          }
        }
      }
    }
  }

  void check_signature_types(const MethodDecl& m) {
    if (m.return_type != "void" && !out_.types.is_valid_type(m.return_type))
      fail(m.span, "unknown type '" + m.return_type + "'");
    std::set<std::string> seen;
    for (const auto& p : m.params) {
      if (!out_.types.is_valid_type(p.type)) fail(p.span, "unknown type '" + p.type + "'");
      if (!seen.insert(p.name).second) fail(p.span, "duplicate parameter '" + p.name + "'");
    }
  }

  void check_units(Program& program) {
    for (auto& unit : program.units) {
      path_ = unit.path;
      for (auto& cls : unit.classes) {
        class_ = &cls;
        for (auto& f : cls.fields) {
          if (!f.init) continue;
          begin_method(f.is_static, nullptr);
          std::string t = expr(*f.init);
          require_assignable(f.init->span, t, f.type);
        }
        for (auto& c : cls.constructors) method(c);
        for (auto& m : cls.methods) method(m);
      }
    }
  }

  void begin_method(bool is_static, const MethodDecl* m) {
    static_context_ = is_static;
    method_ = m;
    scopes_.assign(1, {});
    names_in_method_.clear();
  }

  void method(MethodDecl& m) {
    if (!m.body) return;
    begin_method(m.is_static, &m);
    for (const auto& p : m.params) {
      check_name(p.span, p.name);
      declare(p.span, p.name, p.type);
    }
    block(*m.body);
    if (m.return_type != "void" && can_complete(*m.body))
      fail(m.span, "missing return statement in '" + m.name + "'");
  }

  // Java-style reachability: whether control can fall off the end.
  static bool can_complete(const Block& b) {
    for (const auto& s : b.stmts)
      if (!can_complete(s)) return false;
    return true;
  }

  static bool can_complete(const Stmt& s) {
    if (s.is<ReturnStmt>() || s.is<ThrowStmt>()) return false;
    if (const auto* i = s.as<IfStmt>())
      return !i->else_block || can_complete(i->then_block) || can_complete(*i->else_block);
    if (const auto* w = s.as<WhileStmt>()) {
      const auto* lit = w->cond.as<BoolLit>();
      return !(lit && lit->value);
    }
    if (const auto* t = s.as<TryStmt>()) {
      if (t->finally_block && !can_complete(*t->finally_block)) return false;
      bool any = can_complete(t->body);
      for (const auto& c : t->catches) any = any || can_complete(c.body);
      return any;
    }
    if (const auto* b = s.as<BlockStmt>()) return can_complete(b->block);
    return true;
  }

  void declare(Span span, const std::string& name, const std::string& type) {
    if (!names_in_method_.insert(name).second)
      fail(span, "variable '" + name + "' is already declared in this method");
    scopes_.back()[name] = type;
  }

  const std::string* lookup_local(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  // -- statements ------------------------------------------------------------

  void block(Block& b) {
    scopes_.emplace_back();
    for (auto& s : b.stmts) stmt(s);
    scopes_.pop_back();
  }

  void require_assignable(Span span, const std::string& from, const std::string& to) const {
    if (!out_.types.is_assignable(from, to))
      fail(span, "cannot assign '" + from + "' to '" + to + "'");
  }

  void stmt(Stmt& s) {
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarDecl>) {
            check_name(s.span, n.name);
            if (!out_.types.is_valid_type(n.type)) fail(s.span, "unknown type '" + n.type + "'");
            if (n.init) require_assignable(n.init->span, value(*n.init), n.type);
            declare(s.span, n.name, n.type);
          } else if constexpr (std::is_same_v<T, Assign>) {
            std::string target = expr(n.target);
            if (n.target.ann.name_kind == NameKind::Class) fail(n.target.span, "cannot assign to a class");
            require_assignable(n.value.span, value(n.value), target);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            if (!n.expr.template is<MethodCall>() && !n.expr.template is<NewExpr>())
              fail(n.expr.span, "expression statement must be a call or an instantiation");
            expr(n.expr);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            require_bool(n.cond);
            block(n.then_block);
            if (n.else_block) block(*n.else_block);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            require_bool(n.cond);
            block(n.body);
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            std::string expected = method_ ? method_->return_type : "void";
            if (n.value) {
              if (expected == "void") fail(s.span, "void method cannot return a value");
              require_assignable(n.value->span, value(*n.value), expected);
            } else if (expected != "void") {
              fail(s.span, "missing return value");
            }
          } else if constexpr (std::is_same_v<T, ThrowStmt>) {
            std::string t = value(n.value);
            if (t != kNullType && !(out_.types.is_class_type(t) && out_.types.is_throwable(t)))
              fail(n.value.span, "cannot throw '" + t + "'");
          } else if constexpr (std::is_same_v<T, TryStmt>) {
            block(n.body);
            for (auto& c : n.catches) {
              if (!out_.types.is_class_type(c.type) || !out_.types.is_throwable(c.type))
                fail(c.span, "cannot catch '" + c.type + "'");
              if (is_reserved_name(c.type) && !options_.allow_reserved)
                fail(c.span, "type '" + c.type + "' uses the reserved prefix");
              check_name(c.span, c.var);
              scopes_.emplace_back();
              declare(c.span, c.var, c.type);
              block(c.body);
              scopes_.pop_back();
            }
            if (n.finally_block) block(*n.finally_block);
          } else if constexpr (std::is_same_v<T, BlockStmt>) {
            block(n.block);
          }
        },
        s.node);
  }

  void require_bool(Expr& e) {
    std::string t = value(e);
    if (t != "bool") fail(e.span, "condition must be bool, found '" + t + "'");
  }

  // -- expressions -----------------------------------------------------------

  // Checks an expression used as a value (not void, not a bare class name).
  std::string value(Expr& e) {
    std::string t = expr(e);
    if (t == "void") fail(e.span, "void expression used as a value");
    if (e.ann.name_kind == NameKind::Class) fail(e.span, "class name used as a value");
    return t;
  }

  std::string string_literal_arg(Expr& e) {
    value(e);
    const auto* lit = e.as<StringLit>();
    if (!lit) fail(e.span, "expected a string literal");
    return lit->value;
  }

  std::string hook_call(Expr& e, MethodCall& call, Hook hook) {
    auto& args = call.args;
    auto arity = [&](size_t n) {
      if (args.size() != n) fail(e.span, call.method + " expects " + std::to_string(n) + " arguments");
    };
    auto want_int = [&](Expr& a) {
      if (value(a) != "int") fail(a.span, "expected int");
    };
    switch (hook) {
      case Hook::FreeId:
        arity(0);
        return "int";
      case Hook::CatchAdd:
        if (args.empty()) fail(e.span, "catchAdd expects a try id");
        want_int(args[0]);
        for (size_t i = 1; i < args.size(); ++i) {
          std::string t = string_literal_arg(args[i]);
          if (!out_.types.is_class_type(t)) fail(args[i].span, "unknown exception type '" + t + "'");
        }
        return "void";
      case Hook::CatchRemove:
      case Hook::EndMethod:
        arity(1);
        want_int(args[0]);
        return "void";
      case Hook::StartMethod: {
        if (args.size() < 2 || (args.size() - 2) % 3 != 0) fail(e.span, "malformed startMethod call");
        want_int(args[0]);
        if (!out_.types.is_reference(value(args[1]))) fail(args[1].span, "expected an object or null");
        for (size_t i = 2; i < args.size(); i += 3) {
          string_literal_arg(args[i]);
          string_literal_arg(args[i + 1]);
          value(args[i + 2]);
        }
        return "void";
      }
      case Hook::InitVar:
      case Hook::ModifVar: {
        arity(4);
        std::string t = value(args[0]);
        want_int(args[1]);
        string_literal_arg(args[2]);
        std::string declared = string_literal_arg(args[3]);
        require_assignable(args[0].span, t, declared);
        return t;
      }
      case Hook::CheckForNull: {
        arity(3);
        std::string t = value(args[0]);
        if (!out_.types.is_reference(t)) fail(args[0].span, "checkForNull expects a reference");
        string_literal_arg(args[1]);
        std::string required = string_literal_arg(args[2]);
        if (!out_.types.is_class_type(required)) fail(args[2].span, "unknown type '" + required + "'");
        return t;
      }
      case Hook::SkipLine:
        if (args.size() % 3 != 0) fail(e.span, "skipLine expects (key, receiver, type) triples");
        for (size_t i = 0; i < args.size(); i += 3) {
          string_literal_arg(args[i]);
          if (!out_.types.is_reference(value(args[i + 1]))) fail(args[i + 1].span, "expected a reference");
          string_literal_arg(args[i + 2]);
        }
        return "bool";
      case Hook::StrategyIs:
        arity(1);
        string_literal_arg(args[0]);
        return "bool";
      case Hook::GetVar:
      case Hook::NewVar: {
        arity(1);
        std::string t = string_literal_arg(args[0]);
        if (!out_.types.is_valid_type(t)) fail(args[0].span, "unknown type '" + t + "'");
        return t;
      }
      case Hook::None:
        break;
    }
    fail(e.span, "unknown hook");
  }

  void check_args(Span span, const MethodDecl& m, std::vector<Expr>& args, const std::string& what) {
    if (args.size() != m.params.size())
      fail(span, what + " expects " + std::to_string(m.params.size()) + " arguments, got " +
                     std::to_string(args.size()));
    for (size_t i = 0; i < args.size(); ++i) require_assignable(args[i].span, value(args[i]), m.params[i].type);
  }

  std::string call_expr(Expr& e, MethodCall& call) {
    const TypeTable& t = out_.types;
    if (!call.receiver) {
      if (Builtin b = builtin_of(call.method); b != Builtin::None) {
        e.ann.call_kind = CallKind::Builtin;
        e.ann.builtin = b;
        if (b == Builtin::Print || b == Builtin::AssertTrue) {
          if (call.args.size() != 1) fail(e.span, call.method + " expects 1 argument");
          std::string a = value(call.args[0]);
          if (b == Builtin::AssertTrue && a != "bool") fail(call.args[0].span, "assertTrue expects bool");
        } else {
          if (call.args.size() != 2) fail(e.span, "assertEquals expects 2 arguments");
          comparable(e.span, value(call.args[0]), value(call.args[1]));
        }
        return "void";
      }
      if (is_reserved_name(call.method)) {
        if (!options_.allow_reserved) fail(e.span, "call to reserved hook '" + call.method + "'");
        auto it = hook_names().find(call.method);
        if (it == hook_names().end()) fail(e.span, "unknown hook '" + call.method + "'");
        e.ann.call_kind = CallKind::Hook;
        e.ann.hook = it->second;
        out_.instrumented = true;
        return hook_call(e, call, it->second);
      }
      std::string owner;
      const MethodDecl* m = t.find_method(class_->name, call.method, &owner);
      if (!m) fail(e.span, "unknown method '" + call.method + "'");
      if (!m->is_static && static_context_)
        fail(e.span, "instance method '" + call.method + "' called from a static context");
      e.ann.call_kind = m->is_static ? CallKind::Static : CallKind::ImplicitThis;
      e.ann.owner = owner;
      check_args(e.span, *m, call.args, call.method);
      return m->return_type;
    }

    std::string recv = expr(*call.receiver);
    bool is_class = call.receiver->ann.name_kind == NameKind::Class;
    if (!t.is_class_type(recv)) fail(call.receiver->span, "cannot call a method on '" + recv + "'");
    std::string owner;
    const MethodDecl* m = t.find_method(recv, call.method, &owner);
    if (!m) fail(e.span, "unknown method '" + call.method + "' in '" + recv + "'");
    if (is_class && !m->is_static) fail(e.span, "method '" + call.method + "' is not static");
    if (!is_class && m->is_static) fail(e.span, "static method '" + call.method + "' called on an instance");
    e.ann.call_kind = is_class ? CallKind::Static : CallKind::Virtual;
    e.ann.owner = owner;
    check_args(e.span, *m, call.args, call.method);
    return m->return_type;
  }

  void comparable(Span span, const std::string& a, const std::string& b) const {
    const TypeTable& t = out_.types;
    bool ok = (a == b && TypeTable::is_primitive(a)) || (t.is_reference(a) && t.is_reference(b));
    if (!ok) fail(span, "cannot compare '" + a + "' with '" + b + "'");
  }

  std::string binary_expr(Expr& e, Binary& b) {
    std::string l = value(*b.lhs);
    std::string r = value(*b.rhs);
    switch (b.op) {
      case BinaryOp::Add:
        if (l == "String" || r == "String") return "String";
        [[fallthrough]];
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod:
        if (l != "int" || r != "int") fail(e.span, "arithmetic on non-int operands");
        return "int";
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        if (l != "int" || r != "int") fail(e.span, "comparison of non-int operands");
        return "bool";
      case BinaryOp::Eq:
      case BinaryOp::Ne:
        comparable(e.span, l, r);
        return "bool";
      case BinaryOp::And:
      case BinaryOp::Or:
        if (l != "bool" || r != "bool") fail(e.span, "logical operator on non-bool operands");
        return "bool";
    }
    return "void";
  }

  std::string expr(Expr& e) {
    const TypeTable& t = out_.types;
    std::string type = std::visit(
        [&](auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return "int";
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return "bool";
          } else if constexpr (std::is_same_v<T, StringLit>) {
            return "String";
          } else if constexpr (std::is_same_v<T, NullLit>) {
            return std::string(kNullType);
          } else if constexpr (std::is_same_v<T, ThisExpr>) {
            if (static_context_) fail(e.span, "'this' in a static context");
            return class_->name;
          } else if constexpr (std::is_same_v<T, Name>) {
            if (const std::string* local = lookup_local(n.id)) {
              e.ann.name_kind = NameKind::Local;
              return *local;
            }
            if (const FieldInfo* f = t.find_field(class_->name, n.id)) {
              if (!f->is_static && static_context_)
                fail(e.span, "instance field '" + n.id + "' used in a static context");
              e.ann.name_kind = f->is_static ? NameKind::StaticField : NameKind::Field;
              e.ann.owner = f->owner;
              return f->type;
            }
            if (t.is_class_type(n.id)) {
              e.ann.name_kind = NameKind::Class;
              return n.id;
            }
            fail(e.span, "unknown name '" + n.id + "'");
          } else if constexpr (std::is_same_v<T, FieldAccess>) {
            std::string recv = expr(*n.object);
            bool is_class = n.object->ann.name_kind == NameKind::Class;
            if (!t.is_class_type(recv)) fail(n.object->span, "cannot access a field of '" + recv + "'");
            const FieldInfo* f = t.find_field(recv, n.field);
            if (!f) fail(e.span, "unknown field '" + n.field + "' in '" + recv + "'");
            if (is_class != f->is_static)
              fail(e.span, is_class ? "field '" + n.field + "' is not static"
                                    : "static field '" + n.field + "' accessed through an instance");
            e.ann.name_kind = f->is_static ? NameKind::StaticField : NameKind::Field;
            e.ann.owner = f->owner;
            return f->type;
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            return call_expr(e, n);
          } else if constexpr (std::is_same_v<T, NewExpr>) {
            const ClassInfo* c = t.find(n.type);
            if (!c) fail(e.span, "unknown class '" + n.type + "'");
            if (!c->instantiable()) fail(e.span, "cannot instantiate '" + n.type + "'");
            if (c->constructors.empty()) {
              if (!n.args.empty()) fail(e.span, "'" + n.type + "' only has a default constructor");
            } else {
              const MethodDecl* ctor = nullptr;
              for (const auto* k : c->constructors)
                if (k->params.size() == n.args.size()) ctor = k;
              if (!ctor) fail(e.span, "no constructor of '" + n.type + "' takes " +
                                          std::to_string(n.args.size()) + " arguments");
              check_args(e.span, *ctor, n.args, n.type);
            }
            return n.type;
          } else if constexpr (std::is_same_v<T, Unary>) {
            std::string o = value(*n.operand);
            if (n.op == UnaryOp::Not && o != "bool") fail(e.span, "'!' expects bool");
            if (n.op == UnaryOp::Neg && o != "int") fail(e.span, "'-' expects int");
            return o;
          } else if constexpr (std::is_same_v<T, Binary>) {
            return binary_expr(e, n);
          }
        },
        e.node);
    e.ann.type = type;
    return type;
  }

  CheckedProgram& out_;
  CheckOptions options_;
  std::string path_;
  const ClassDecl* class_ = nullptr;
  const MethodDecl* method_ = nullptr;
  bool static_context_ = false;
  std::vector<std::map<std::string, std::string>> scopes_;
  std::set<std::string> names_in_method_;
};

bool expr_uses_reserved(const Expr& e);

bool block_uses_reserved(const Block& b);

bool stmt_uses_reserved(const Stmt& s) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          return is_reserved_name(n.name) || is_reserved_name(n.type) || (n.init && expr_uses_reserved(*n.init));
        } else if constexpr (std::is_same_v<T, Assign>) {
          return expr_uses_reserved(n.target) || expr_uses_reserved(n.value);
        } else if constexpr (std::is_same_v<T, ExprStmt>) {
          return expr_uses_reserved(n.expr);
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          return expr_uses_reserved(n.cond) || block_uses_reserved(n.then_block) ||
                 (n.else_block && block_uses_reserved(*n.else_block));
        } else if constexpr (std::is_same_v<T, WhileStmt>) {
          return expr_uses_reserved(n.cond) || block_uses_reserved(n.body);
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          return n.value && expr_uses_reserved(*n.value);
        } else if constexpr (std::is_same_v<T, ThrowStmt>) {
          return expr_uses_reserved(n.value);
        } else if constexpr (std::is_same_v<T, TryStmt>) {
          if (block_uses_reserved(n.body)) return true;
          for (const auto& c : n.catches)
            if (is_reserved_name(c.type) || is_reserved_name(c.var) || block_uses_reserved(c.body))
              return true;
          return n.finally_block && block_uses_reserved(*n.finally_block);
        } else {
          return block_uses_reserved(n.block);
        }
      },
      s.node);
}

bool block_uses_reserved(const Block& b) {
  for (const auto& s : b.stmts)
    if (stmt_uses_reserved(s)) return true;
  return false;
}

bool expr_uses_reserved(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Name>) {
          return is_reserved_name(n.id);
        } else if constexpr (std::is_same_v<T, FieldAccess>) {
          return is_reserved_name(n.field) || expr_uses_reserved(*n.object);
        } else if constexpr (std::is_same_v<T, MethodCall>) {
          if (is_reserved_name(n.method) || (n.receiver && expr_uses_reserved(*n.receiver))) return true;
          for (const auto& a : n.args)
            if (expr_uses_reserved(a)) return true;
          return false;
        } else if constexpr (std::is_same_v<T, NewExpr>) {
          if (is_reserved_name(n.type)) return true;
          for (const auto& a : n.args)
            if (expr_uses_reserved(a)) return true;
          return false;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return expr_uses_reserved(*n.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return expr_uses_reserved(*n.lhs) || expr_uses_reserved(*n.rhs);
        } else {
          return false;
        }
      },
      e.node);
}

}  // namespace

std::string CheckedProgram::default_entry() const {
  std::string found;
  for (const auto& unit : program.units)
    for (const auto& cls : unit.classes)
      for (const auto& m : cls.methods)
        if (m.name == "main" && m.params.empty() && m.return_type == "void" && m.body) {
          if (!found.empty()) return {};
          found = cls.name;
        }
  return found;
}

bool uses_reserved_names(const Program& program) {
  for (const auto& unit : program.units)
    for (const auto& cls : unit.classes) {
      if (is_reserved_name(cls.name)) return true;
      for (const auto& f : cls.fields)
        if (is_reserved_name(f.name) || (f.init && expr_uses_reserved(*f.init))) return true;
      for (const auto* group : {&cls.constructors, &cls.methods})
        for (const auto& m : *group) {
          if (is_reserved_name(m.name)) return true;
          for (const auto& p : m.params)
            if (is_reserved_name(p.name)) return true;
          if (m.body && block_uses_reserved(*m.body)) return true;
        }
    }
  return false;
}

CheckedProgramPtr check_program(Program program, CheckOptions options) {
  auto out = std::make_shared<CheckedProgram>();
  out->program = std::move(program);
  static const Program prelude = [] {
    Program p;
    p.units.push_back(parse_unit(SourceUnit{"<prelude>", prelude_source()}));
    return p;
  }();
  out->prelude = prelude;
  Checker(*out, options).run();
  return out;
}

CheckedProgramPtr load_program(const std::vector<SourceUnit>& sources, CheckOptions options) {
  return check_program(parse_program(sources), options);
}

}  // namespace npefix
