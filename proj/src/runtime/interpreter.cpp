#include "npefix/runtime/interpreter.hpp"

#include <pthread.h>

#include <exception>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "npefix/runtime/catch_stack.hpp"
#include "npefix/runtime/new_var.hpp"
#include "npefix/runtime/value_pool.hpp"

namespace npefix {

std::string ExecutionResult::describe_exit() const {
  switch (status) {
    case ExitStatus::Normal: return "normal";
    case ExitStatus::Uncaught:
      return "uncaught " + exception_type + (exception_message.empty() ? "" : ": " + exception_message);
    case ExitStatus::Aborted: return "aborted: " + exception_type;
  }
  return "";
}

namespace {

// A MiniJ exception in flight.
struct ThrowSignal {
  Object* exc;
};

// Ends the run without unwinding MiniJ handlers.
struct AbortSignal {
  std::string reason;
};

// Raised by checkForNull under S3; caught by the enclosing skipLine guard of
// the same activation.
struct SkipLineSignal {};

enum class Flow { Normal, Return };

struct Frame {
  const ClassInfo* cls = nullptr;
  const MethodDecl* method = nullptr;  // null for field initializers
  Object* self = nullptr;
  std::vector<std::pair<std::string_view, Value>> locals;
  Value ret;
  int guard_depth = 0;
  bool method_skip = false;
};

// Truncates the locals of a frame when a block is left by any path.
struct LocalScope {
  Frame& f;
  size_t mark;
  explicit LocalScope(Frame& frame) : f(frame), mark(frame.locals.size()) {}
  ~LocalScope() { f.locals.resize(mark); }
};

template <class T>
struct Restore {
  T& ref;
  T saved;
  explicit Restore(T& r) : ref(r), saved(r) {}
  ~Restore() { ref = saved; }
};

// Assignable location evaluated once: a local, a field of an object, or a static.
struct LRef {
  enum Kind { Local, Field, Static } kind = Local;
  std::string_view name;
  Object* obj = nullptr;
  std::string static_key;
};

const std::string& literal(const Expr& e) {
  const auto* s = e.as<StringLit>();
  if (!s) throw std::logic_error("hook argument must be a string literal");
  return s->value;
}

class Interpreter {
public:
  Interpreter(const CheckedProgram& program, const RunOptions& options, RepairController& ctl)
      : program_(program), types_(program.types), opt_(options), ctl_(ctl),
        planner_(program.types, options.depth_budget) {}

  ExecutionResult execute();

private:
  // -- heap and classes ------------------------------------------------------
  const ClassLayout* layout(const ClassInfo* c) {
    auto [it, inserted] = layouts_.try_emplace(c);
    if (inserted) {
      ClassLayout& l = it->second;
      l.info = c;
      l.fields = types_.instance_fields(c->name);
      for (size_t i = 0; i < l.fields.size(); ++i) l.index.emplace(l.fields[i].name, i);
    }
    return &it->second;
  }

  Object* alloc(const ClassInfo* c) {
    const ClassLayout* l = layout(c);
    Object* o = heap_.allocate(l);
    for (size_t i = 0; i < l->fields.size(); ++i) o->fields[i] = default_value(l->fields[i].type);
    return o;
  }

  const ClassInfo* class_info(std::string_view name) {
    const ClassInfo* c = types_.find(name);
    if (!c) throw std::logic_error("unknown class at runtime: " + std::string(name));
    return c;
  }

  // Method lookup from the dynamic class, cached.
  std::pair<const MethodDecl*, const ClassInfo*> resolve(const ClassInfo* cls, const std::string& name) {
    auto& per_class = method_cache_[cls];
    auto it = per_class.find(name);
    if (it != per_class.end()) return it->second;
    std::string owner;
    const MethodDecl* m = types_.find_method(cls->name, name, &owner);
    if (!m) throw std::logic_error("unresolved method " + cls->name + "." + name);
    auto entry = std::make_pair(m, class_info(owner));
    per_class.emplace(name, entry);
    return entry;
  }

  bool has_method_skip(const MethodDecl* m) {
    auto it = skip_cache_.find(m);
    if (it != skip_cache_.end()) return it->second;
    bool found = false;
    if (m->body && m->body->stmts.size() == 1)
      if (const auto* t = m->body->stmts[0].as<TryStmt>())
        for (const auto& c : t->catches)
          if (c.type == kForceReturnError) found = true;
    skip_cache_.emplace(m, found);
    return found;
  }

  static std::string static_key(const std::string& owner, const std::string& field) {
    return owner + "." + field;
  }

  std::vector<PoolEntry> static_entries() const {
    std::vector<PoolEntry> out;
    for (const auto& f : static_order_) {
      std::string key = static_key(f.owner, f.name);
      out.push_back(PoolEntry{key, f.type, statics_.at(key)});
    }
    return out;
  }

  // -- exceptions -------------------------------------------------------------
  [[noreturn]] void throw_object(Object* o) {
    if (opt_.observer) opt_.observer->on_throw(o, catch_.will_be_caught(o->class_name(), types_));
    throw ThrowSignal{o};
  }

  [[noreturn]] void raise(std::string_view type, const std::string& message) {
    Object* o = alloc(class_info(type));
    if (Value* m = o->field("message")) *m = message;
    throw_object(o);
  }

  [[noreturn]] void raise_npe(const std::string& member) {
    raise(kNullPointerException, "null dereference at ." + member);
  }

  void step() {
    if (++steps_ > opt_.max_steps) throw AbortSignal{"step limit exceeded"};
  }

  // -- calls -----------------------------------------------------------------
  Value invoke(const ClassInfo* cls, const MethodDecl* m, Object* self, std::vector<Value> args) {
    if (depth_ >= opt_.max_depth) raise(kStackOverflowError, "call depth limit reached");
    if (!m->body) throw AbortSignal{"abstract method invoked: " + method_signature(*cls->decl, *m)};
    Frame f;
    f.cls = cls;
    f.method = m;
    f.self = self;
    f.method_skip = has_method_skip(m);
    f.locals.reserve(m->params.size() + 8);
    for (size_t i = 0; i < args.size(); ++i) f.locals.emplace_back(m->params[i].name, std::move(args[i]));
    ++depth_;
    struct Depth {
      int& d;
      ~Depth() { --d; }
    } depth_guard{depth_};
    step();
    exec_block(*m->body, f);
    // a skipped `return` can fall off a value method; primitives then read as defaults
    if (is_null(f.ret) && TypeTable::is_primitive(m->return_type)) return default_value(m->return_type);
    return std::move(f.ret);
  }

  Object* instantiate(const ClassInfo* c, const MethodDecl* ctor, std::vector<Value> args) {
    Object* o = alloc(c);
    const ClassLayout* l = o->layout;
    for (size_t i = 0; i < l->fields.size(); ++i) {
      const FieldInfo& fi = l->fields[i];
      if (!fi.decl || !fi.decl->init) continue;
      Frame init;
      init.cls = class_info(fi.owner);
      init.self = o;
      o->fields[i] = eval(*fi.decl->init, init);
    }
    if (ctor) invoke(c, ctor, o, std::move(args));
    return o;
  }

  static const MethodDecl* ctor_for(const ClassInfo* c, size_t arity) {
    for (const auto* k : c->constructors)
      if (k->params.size() == arity) return k;
    return nullptr;
  }

  std::vector<Value> eval_args(const std::vector<Expr>& args, Frame& f) {
    std::vector<Value> out;
    out.reserve(args.size());
    for (const auto& a : args) out.push_back(eval(a, f));
    return out;
  }

  // -- statements ------------------------------------------------------------
  Flow exec_block(const Block& b, Frame& f) {
    LocalScope scope(f);
    for (const Stmt& s : b.stmts)
      if (exec(s, f) == Flow::Return) return Flow::Return;
    return Flow::Normal;
  }

  Value* local(Frame& f, std::string_view name) {
    for (auto it = f.locals.rbegin(); it != f.locals.rend(); ++it)
      if (it->first == name) return &it->second;
    throw std::logic_error("unbound local " + std::string(name));
  }

  Flow exec(const Stmt& s, Frame& f) {
    step();
    return std::visit(
        [&](const auto& n) -> Flow {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarDecl>) {
            Value v = n.init ? eval(*n.init, f) : default_value(n.type);
            f.locals.emplace_back(n.name, std::move(v));
          } else if constexpr (std::is_same_v<T, Assign>) {
            assign(n.target, n.value, f);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            eval(n.expr, f);
          } else if constexpr (std::is_same_v<T, IfStmt>) {
            return exec_if(n, f);
          } else if constexpr (std::is_same_v<T, WhileStmt>) {
            while (std::get<bool>(eval(n.cond, f))) {
              if (exec_block(n.body, f) == Flow::Return) return Flow::Return;
              step();
            }
          } else if constexpr (std::is_same_v<T, ReturnStmt>) {
            f.ret = n.value ? eval(*n.value, f) : Value{};
            return Flow::Return;
          } else if constexpr (std::is_same_v<T, ThrowStmt>) {
            Value v = eval(n.value, f);
            Object* o = as_object(v);
            if (!o) raise(kNullPointerException, "throw of null");
            throw_object(o);
          } else if constexpr (std::is_same_v<T, TryStmt>) {
            return exec_try(n, f);
          } else if constexpr (std::is_same_v<T, BlockStmt>) {
            return exec_block(n.block, f);
          }
          return Flow::Normal;
        },
        s.node);
  }

  Flow exec_if(const IfStmt& n, Frame& f) {
    if (n.cond.ann.hook == Hook::SkipLine) {
      // instrumented line-skip guard
      if (!std::get<bool>(eval(n.cond, f))) return Flow::Normal;
      ++f.guard_depth;
      struct Guard {
        int& d;
        ~Guard() { --d; }
      } g{f.guard_depth};
      try {
        return exec_block(n.then_block, f);
      } catch (const SkipLineSignal&) {
        return Flow::Normal;
      }
    }
    if (std::get<bool>(eval(n.cond, f))) return exec_block(n.then_block, f);
    if (n.else_block) return exec_block(*n.else_block, f);
    return Flow::Normal;
  }

  Flow exec_try(const TryStmt& t, Frame& f) {
    Flow flow = Flow::Normal;
    std::exception_ptr pending;
    try {
      flow = exec_block(t.body, f);
    } catch (const ThrowSignal& sig) {
      const CatchClause* handler = nullptr;
      for (const auto& c : t.catches) {
        if (types_.is_subtype(sig.exc->class_name(), c.type)) {
          handler = &c;
          break;
        }
      }
      if (handler) {
        if (opt_.observer) opt_.observer->on_catch(sig.exc);
        Object* exc = sig.exc;
        try {
          LocalScope scope(f);
          f.locals.emplace_back(handler->var, exc);
          flow = exec_block(handler->body, f);
        } catch (const ThrowSignal&) {
          pending = std::current_exception();
        }
      } else {
        pending = std::current_exception();
      }
    }
    if (t.finally_block) {
      Value saved = f.ret;
      if (exec_block(*t.finally_block, f) == Flow::Return) return Flow::Return;
      f.ret = std::move(saved);
    }
    if (pending) std::rethrow_exception(pending);
    return flow;
  }

  // -- lvalues ---------------------------------------------------------------
  LRef eval_lref(const Expr& e, Frame& f) {
    LRef r;
    if (const auto* n = e.as<Name>()) {
      r.name = n->id;
      switch (e.ann.name_kind) {
        case NameKind::Local: r.kind = LRef::Local; break;
        case NameKind::Field: r.kind = LRef::Field; r.obj = f.self; break;
        case NameKind::StaticField: r.kind = LRef::Static; r.static_key = static_key(e.ann.owner, n->id); break;
        default: throw std::logic_error("not an lvalue");
      }
      return r;
    }
    const auto& fa = std::get<FieldAccess>(e.node);
    r.name = fa.field;
    if (e.ann.name_kind == NameKind::StaticField) {
      r.kind = LRef::Static;
      r.static_key = static_key(e.ann.owner, fa.field);
      return r;
    }
    Value obj = eval(*fa.object, f);
    r.kind = LRef::Field;
    r.obj = as_object(obj);
    if (!r.obj) raise_npe(fa.field);
    return r;
  }

  Value& slot(const LRef& r, Frame& f) {
    switch (r.kind) {
      case LRef::Local: return *local(f, r.name);
      case LRef::Field: return *r.obj->field(std::string(r.name));
      case LRef::Static: return statics_.at(r.static_key);
    }
    throw std::logic_error("bad lvalue");
  }

  void assign(const Expr& target, const Expr& value, Frame& f) {
    if (const auto* fa = target.as<FieldAccess>(); fa && target.ann.name_kind != NameKind::StaticField) {
      Value obj = eval(*fa->object, f);
      Value v = eval(value, f);
      Object* o = as_object(obj);
      if (!o) raise_npe(fa->field);
      *o->field(fa->field) = std::move(v);
      return;
    }
    LRef r = eval_lref(target, f);
    Value v = eval(value, f);
    slot(r, f) = std::move(v);
  }

  // -- expressions -----------------------------------------------------------
  Value eval(const Expr& e, Frame& f) {
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, StringLit>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, NullLit>) {
            return std::monostate{};
          } else if constexpr (std::is_same_v<T, ThisExpr>) {
            return f.self;
          } else if constexpr (std::is_same_v<T, Name>) {
            switch (e.ann.name_kind) {
              case NameKind::Local: return *local(f, n.id);
              case NameKind::Field: return *f.self->field(n.id);
              case NameKind::StaticField: return statics_.at(static_key(e.ann.owner, n.id));
              default: throw std::logic_error("class name used as a value");
            }
          } else if constexpr (std::is_same_v<T, FieldAccess>) {
            if (e.ann.name_kind == NameKind::StaticField) return statics_.at(static_key(e.ann.owner, n.field));
            Value obj = eval(*n.object, f);
            Object* o = as_object(obj);
            if (!o) raise_npe(n.field);
            return *o->field(n.field);
          } else if constexpr (std::is_same_v<T, MethodCall>) {
            return eval_call(e, n, f);
          } else if constexpr (std::is_same_v<T, NewExpr>) {
            const ClassInfo* c = class_info(n.type);
            std::vector<Value> args = eval_args(n.args, f);
            step();
            const MethodDecl* ctor = ctor_for(c, args.size());
            return instantiate(c, ctor, std::move(args));
          } else if constexpr (std::is_same_v<T, Unary>) {
            Value v = eval(*n.operand, f);
            if (n.op == UnaryOp::Not) return !std::get<bool>(v);
            return static_cast<int64_t>(0ULL - static_cast<uint64_t>(std::get<int64_t>(v)));
          } else if constexpr (std::is_same_v<T, Binary>) {
            return eval_binary(n, f);
          }
        },
        e.node);
  }

  Value eval_binary(const Binary& b, Frame& f) {
    if (b.op == BinaryOp::And) return std::get<bool>(eval(*b.lhs, f)) && std::get<bool>(eval(*b.rhs, f));
    if (b.op == BinaryOp::Or) return std::get<bool>(eval(*b.lhs, f)) || std::get<bool>(eval(*b.rhs, f));
    Value l = eval(*b.lhs, f);
    Value r = eval(*b.rhs, f);
    switch (b.op) {
      case BinaryOp::Eq: return values_equal(l, r);
      case BinaryOp::Ne: return !values_equal(l, r);
      case BinaryOp::Add:
        if (std::holds_alternative<std::string>(l) || std::holds_alternative<std::string>(r))
          return format_value(l) + format_value(r);
        break;
      default: break;
    }
    auto x = static_cast<uint64_t>(std::get<int64_t>(l));
    auto y = static_cast<uint64_t>(std::get<int64_t>(r));
    int64_t a = std::get<int64_t>(l), c = std::get<int64_t>(r);
    switch (b.op) {
      case BinaryOp::Add: return static_cast<int64_t>(x + y);
      case BinaryOp::Sub: return static_cast<int64_t>(x - y);
      case BinaryOp::Mul: return static_cast<int64_t>(x * y);
      case BinaryOp::Div:
      case BinaryOp::Mod:
        if (c == 0) raise(kArithmeticException, "/ by zero");
        if (c == -1) return b.op == BinaryOp::Div ? static_cast<int64_t>(0ULL - x) : int64_t{0};
        return b.op == BinaryOp::Div ? a / c : a % c;
      case BinaryOp::Lt: return a < c;
      case BinaryOp::Le: return a <= c;
      case BinaryOp::Gt: return a > c;
      case BinaryOp::Ge: return a >= c;
      default: break;
    }
    throw std::logic_error("bad binary operator");
  }

  Value eval_call(const Expr& e, const MethodCall& call, Frame& f) {
    switch (e.ann.call_kind) {
      case CallKind::Builtin: return eval_builtin(e.ann.builtin, call, f);
      case CallKind::Hook: return eval_hook(e.ann.hook, call, f);
      case CallKind::Static: {
        const ClassInfo* owner = class_info(e.ann.owner);
        auto [m, decl_owner] = resolve(owner, call.method);
        return invoke(decl_owner, m, nullptr, eval_args(call.args, f));
      }
      case CallKind::ImplicitThis: {
        auto [m, decl_owner] = resolve(f.self->layout->info, call.method);
        return invoke(decl_owner, m, f.self, eval_args(call.args, f));
      }
      case CallKind::Virtual: {
        Value recv = eval(*call.receiver, f);
        std::vector<Value> args = eval_args(call.args, f);
        Object* o = as_object(recv);
        if (!o) raise_npe(call.method + "()");
        auto [m, decl_owner] = resolve(o->layout->info, call.method);
        return invoke(decl_owner, m, o, std::move(args));
      }
      case CallKind::Unresolved: break;
    }
    throw std::logic_error("unresolved call " + call.method);
  }

  Value eval_builtin(Builtin b, const MethodCall& call, Frame& f) {
    std::vector<Value> args = eval_args(call.args, f);
    switch (b) {
      case Builtin::Print:
        out_ += format_value(args[0]);
        out_ += '\n';
        break;
      case Builtin::AssertTrue:
        if (!std::get<bool>(args[0])) raise(kAssertionError, "assertion failed");
        break;
      case Builtin::AssertEquals:
        if (!values_equal(args[0], args[1]))
          raise(kAssertionError, "expected: <" + format_value(args[0]) + "> but was: <" +
                                     format_value(args[1]) + ">");
        break;
      case Builtin::None: break;
    }
    return {};
  }

  // -- repair hooks ----------------------------------------------------------
  bool harmful_null_repairable() const {
    return ctl_.repairing() && !suspended_ && !catch_.will_be_caught(kNullPointerException, types_);
  }

  Decision decide(const std::string& key, const std::string& required, Frame& f, bool guarded) {
    RepairContext ctx;
    ctx.crash_point = key;
    ctx.required_type = required;
    ctx.guarded = guarded;
    ctx.method_skip_available = f.method && f.method_skip;
    ctx.return_type = f.method && !f.method->is_constructor ? f.method->return_type : "void";
    std::vector<PoolEntry> statics = static_entries();
    ctx.pool_required = pool_.candidates(required, types_, statics);
    ctx.types_required = planner_.constructible_types(required);
    if (ctx.return_type != "void") {
      ctx.pool_return = pool_.candidates(ctx.return_type, types_, statics);
      ctx.types_return = planner_.constructible_types(ctx.return_type);
    }
    if (!first_key_) first_key_ = key;
    return ctl_.decide(ctx);
  }

  void application_failed(const std::string& key, Outcome o) {
    if (first_key_ && *first_key_ == key && !first_failure_) first_failure_ = o;
  }

  std::optional<Value> manufacture(std::string_view type) {
    auto plan = planner_.plan(type);
    if (!plan) return std::nullopt;
    Restore<bool> restore(suspended_);
    suspended_ = true;
    try {
      return build(*plan);
    } catch (const ThrowSignal&) {
      return std::nullopt;
    }
  }

  Value build(const ConstructionPlan& p) {
    if (p.primitive) return default_value(p.type);
    std::vector<Value> args;
    for (const auto& a : p.args) args.push_back(build(a));
    return instantiate(class_info(p.type), p.ctor, std::move(args));
  }

  std::optional<Value> pooled(const std::string& name) {
    auto v = pool_.lookup(name, types_, static_entries());
    if (!v || is_null(*v)) return std::nullopt;
    return v;
  }

  // Raises the force-return signal for S4*, or returns when the strategy
  // cannot be applied here.
  void force_return(const std::string& key, const Strategy& s, Frame& f) {
    if (!f.method || !f.method_skip) {
      application_failed(key, Outcome::US);
      return;
    }
    Value v;
    if (s.id == StrategyId::S4b) {
      auto p = pooled(s.parameter);
      if (!p) return application_failed(key, Outcome::NoV);
      v = *p;
    } else if (s.id == StrategyId::S4c) {
      auto m = manufacture(s.parameter);
      if (!m) return application_failed(key, Outcome::NoI);
      v = *m;
    }
    pending_force_ = std::make_pair(s, std::move(v));
    throw ThrowSignal{alloc(class_info(kForceReturnError))};
  }

  Value check_for_null(const MethodCall& call, Frame& f) {
    const Expr& target = call.args[0];
    const std::string& key = literal(call.args[1]);
    const std::string& required = literal(call.args[2]);
    bool is_lvalue = (target.is<Name>() && target.ann.name_kind != NameKind::Class) || target.is<FieldAccess>();
    LRef ref;
    Value v;
    if (is_lvalue) {
      ref = eval_lref(target, f);
      v = slot(ref, f);
    } else {
      v = eval(target, f);
    }
    if (!is_null(v) || !harmful_null_repairable()) return v;

    Decision d = decide(key, required, f, f.guard_depth > 0);
    if (!d.strategy) return v;
    const Strategy& s = *d.strategy;
    switch (s.id) {
      case StrategyId::S1a:
      case StrategyId::S1b: {
        auto p = pooled(s.parameter);
        if (!p) {
          application_failed(key, Outcome::NoV);
          return v;
        }
        if (s.id == StrategyId::S1b) rebind(target, ref, is_lvalue, *p, f);
        return *p;
      }
      case StrategyId::S2a:
      case StrategyId::S2b: {
        auto m = manufacture(s.parameter);
        if (!m) {
          application_failed(key, Outcome::NoI);
          return v;
        }
        if (s.id == StrategyId::S2b) rebind(target, ref, is_lvalue, *m, f);
        return *m;
      }
      case StrategyId::S3:
        if (f.guard_depth > 0) throw SkipLineSignal{};
        application_failed(key, Outcome::US);
        return v;
      default:
        force_return(key, s, f);
        return v;
    }
  }

  void rebind(const Expr& target, const LRef& ref, bool is_lvalue, const Value& v, Frame& f) {
    if (!is_lvalue) return;
    slot(ref, f) = v;
    if (ref.kind == LRef::Local) pool_.update_top(std::string(target.as<Name>()->id), v);
  }

  bool skip_line(const MethodCall& call, Frame& f) {
    for (size_t i = 0; i + 2 < call.args.size(); i += 3) {
      const std::string& key = literal(call.args[i]);
      Value v = eval(call.args[i + 1], f);
      if (!is_null(v) || !harmful_null_repairable()) continue;
      Decision d = decide(key, literal(call.args[i + 2]), f, true);
      if (!d.strategy) continue;
      if (d.strategy->id == StrategyId::S3) return false;
      if (is_method_skip(d.strategy->id)) force_return(key, *d.strategy, f);
    }
    return true;
  }

  Value eval_hook(Hook h, const MethodCall& call, Frame& f) {
    const auto& a = call.args;
    switch (h) {
      case Hook::FreeId: return ++next_id_;
      case Hook::CatchAdd: {
        int64_t id = std::get<int64_t>(eval(a[0], f));
        std::vector<std::string> types;
        for (size_t i = 1; i < a.size(); ++i) types.push_back(literal(a[i]));
        if (opt_.trace_catch_stack) {
          std::string line = "add " + std::to_string(id);
          for (const auto& t : types) line += " " + t;
          trace_.push_back(std::move(line));
        }
        catch_.add(id, std::move(types));
        return {};
      }
      case Hook::CatchRemove: {
        int64_t id = std::get<int64_t>(eval(a[0], f));
        if (opt_.trace_catch_stack) trace_.push_back("remove " + std::to_string(id));
        catch_.remove(id);
        return {};
      }
      case Hook::StartMethod: {
        int64_t id = std::get<int64_t>(eval(a[0], f));
        Object* self = as_object(eval(a[1], f));
        std::vector<PoolEntry> params;
        for (size_t i = 2; i + 2 < a.size(); i += 3)
          params.push_back(PoolEntry{literal(a[i]), literal(a[i + 1]), eval(a[i + 2], f)});
        pool_.start(id, self, std::move(params));
        return {};
      }
      case Hook::EndMethod:
        pool_.end(std::get<int64_t>(eval(a[0], f)));
        return {};
      case Hook::InitVar:
      case Hook::ModifVar: {
        Value v = eval(a[0], f);
        int64_t id = std::get<int64_t>(eval(a[1], f));
        pool_.set(id, literal(a[2]), literal(a[3]), v);
        return v;
      }
      case Hook::CheckForNull: return check_for_null(call, f);
      case Hook::SkipLine: return skip_line(call, f);
      case Hook::StrategyIs:
        return pending_force_ && to_string(pending_force_->first.id) == literal(a[0]);
      case Hook::GetVar:
      case Hook::NewVar:
        if (!pending_force_) throw std::logic_error("no pending force-return value");
        return pending_force_->second;
      case Hook::None: break;
    }
    throw std::logic_error("unknown hook " + call.method);
  }

  // -- state -----------------------------------------------------------------
  const CheckedProgram& program_;
  const TypeTable& types_;
  const RunOptions& opt_;
  RepairController& ctl_;
  ConstructionPlanner planner_;
  Heap heap_;
  std::unordered_map<const ClassInfo*, ClassLayout> layouts_;
  std::unordered_map<const ClassInfo*, std::unordered_map<std::string, std::pair<const MethodDecl*, const ClassInfo*>>>
      method_cache_;
  std::unordered_map<const MethodDecl*, bool> skip_cache_;
  std::unordered_map<std::string, Value> statics_;
  std::vector<FieldInfo> static_order_;
  CatchStack catch_;
  ValuePool pool_;
  std::optional<std::pair<Strategy, Value>> pending_force_;
  std::optional<std::string> first_key_;
  std::optional<Outcome> first_failure_;
  std::vector<std::string> trace_;
  std::string out_;
  uint64_t steps_ = 0;
  int64_t next_id_ = 0;
  int depth_ = 0;
  bool suspended_ = false;
};

ExecutionResult Interpreter::execute() {
  ExecutionResult result;
  std::string cls_name = opt_.entry.cls.empty() ? program_.default_entry() : opt_.entry.cls;
  if (cls_name.empty()) throw std::invalid_argument("no entry class: none or several declare void main()");
  const ClassInfo* cls = types_.find(cls_name);
  if (!cls) throw std::invalid_argument("unknown entry class '" + cls_name + "'");
  std::string owner;
  const MethodDecl* entry = types_.find_method(cls_name, opt_.entry.method, &owner);
  if (!entry || !entry->params.empty())
    throw std::invalid_argument("entry " + cls_name + "." + opt_.entry.method + "() not found");

  ctl_.begin_run();
  try {
    static_order_ = types_.static_fields();
    for (const auto& sf : static_order_) statics_[static_key(sf.owner, sf.name)] = default_value(sf.type);
    for (const auto& sf : static_order_) {
      if (!sf.decl || !sf.decl->init) continue;
      Frame init;
      init.cls = class_info(sf.owner);
      statics_[static_key(sf.owner, sf.name)] = eval(*sf.decl->init, init);
    }
    if (entry->is_static) {
      invoke(class_info(owner), entry, nullptr, {});
    } else {
      if (!cls->instantiable()) throw std::invalid_argument("entry class '" + cls_name + "' is not instantiable");
      const MethodDecl* ctor = ctor_for(cls, 0);
      if (!ctor && !cls->constructors.empty())
        throw std::invalid_argument("entry class '" + cls_name + "' has no zero-argument constructor");
      Object* self = instantiate(cls, ctor, {});
      invoke(class_info(owner), entry, self, {});
    }
  } catch (const ThrowSignal& sig) {
    if (opt_.observer) opt_.observer->on_uncaught(sig.exc);
    result.status = ExitStatus::Uncaught;
    result.exception_type = sig.exc->class_name();
    if (Value* m = sig.exc->field("message"); m && std::holds_alternative<std::string>(*m))
      result.exception_message = std::get<std::string>(*m);
  } catch (const AbortSignal& a) {
    result.status = ExitStatus::Aborted;
    result.exception_type = a.reason;
  } catch (const SkipLineSignal&) {
    result.status = ExitStatus::Aborted;
    result.exception_type = "line skip outside a guard";
  }

  result.deployed = ctl_.end_run(result.normal());
  if (ctl_.repairing()) {
    if (auto o = ctl_.first_inapplicable()) result.outcome = o;
    else if (first_failure_) result.outcome = first_failure_;
    else if (result.normal()) result.outcome = Outcome::OK;
    else if (result.uncaught(kNullPointerException)) result.outcome = Outcome::NPE;
    else result.outcome = Outcome::Ex;
  }
  result.log.assign(ctl_.log().begin() + static_cast<std::ptrdiff_t>(ctl_.run_log_begin()), ctl_.log().end());
  result.stdout_text = std::move(out_);
  result.catch_trace = std::move(trace_);
  result.steps = steps_;
  return result;
}

// Runs `fn` on a thread with a large stack so deep MiniJ recursion reaches
// the interpreter's own depth limit first.
void run_with_stack(const std::function<void()>& fn) {
  constexpr size_t kStackSize = size_t{1} << 29;
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kStackSize);
  pthread_t thread;
  auto trampoline = [](void* arg) -> void* {
    (*static_cast<const std::function<void()>*>(arg))();
    return nullptr;
  };
  int rc = pthread_create(&thread, &attr, trampoline, const_cast<std::function<void()>*>(&fn));
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    fn();
    return;
  }
  pthread_join(thread, nullptr);
}

}  // namespace

ExecutionResult run(const CheckedProgram& program, const RunOptions& options, RepairController& controller) {
  ExecutionResult result;
  std::exception_ptr error;
  run_with_stack([&] {
    try {
      Interpreter interp(program, options, controller);
      result = interp.execute();
    } catch (...) {
      error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);
  return result;
}

ExecutionResult run(const CheckedProgram& program, const RunOptions& options) {
  RepairController off = program.instrumented ? RepairController::idle() : RepairController::off();
  return run(program, options, off);
}

}  // namespace npefix
