#pragma once

// Abstract syntax tree of MiniJ programs.
//
// Nodes have value semantics: copying a node deep-copies its children, so the
// transformers can rewrite freely. Spans and checker annotations never take
// part in equality, which makes `==` a structural comparison.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace npefix {

struct Span {
  uint32_t begin = 0;
  uint32_t end = 0;
  uint32_t line = 1;
  uint32_t col = 1;

  friend bool operator==(const Span&, const Span&) { return true; }
};

/// Owning pointer with deep-copy semantics.
template <class T>
class Box {
public:
  Box() = default;
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = other.ptr_ ? std::make_unique<T>(*other.ptr_) : nullptr;
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }
  T* get() { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }
  explicit operator bool() const { return static_cast<bool>(ptr_); }

  friend bool operator==(const Box& a, const Box& b) {
    if (!a.ptr_ || !b.ptr_) return !a.ptr_ && !b.ptr_;
    return *a.ptr_ == *b.ptr_;
  }

private:
  std::unique_ptr<T> ptr_;
};

inline constexpr std::string_view kReservedPrefix = "__npefix_";

inline bool is_reserved_name(std::string_view name) { return name.starts_with(kReservedPrefix); }

// ---------------------------------------------------------------------------
// Checker annotations. Filled in by the type checker, ignored by equality.

enum class NameKind { Unresolved, Local, Field, StaticField, Class };

enum class CallKind {
  Unresolved,
  Virtual,       // receiver.m(...)
  Static,        // ClassName.m(...) or unqualified call to a static method
  ImplicitThis,  // unqualified call to an instance method
  Builtin,       // print / assertTrue / assertEquals
  Hook,          // __npefix_* runtime hooks
};

enum class Hook {
  None,
  FreeId,
  CatchAdd,
  CatchRemove,
  StartMethod,
  EndMethod,
  InitVar,
  ModifVar,
  CheckForNull,
  SkipLine,
  StrategyIs,
  GetVar,
  NewVar,
};

enum class Builtin { None, Print, AssertTrue, AssertEquals };

struct Annotation {
  std::string type;   // static type after checking ("int", "bool", "String", "null", class name)
  NameKind name_kind = NameKind::Unresolved;
  CallKind call_kind = CallKind::Unresolved;
  Hook hook = Hook::None;
  Builtin builtin = Builtin::None;
  std::string owner;  // declaring class of the resolved field or method

  friend bool operator==(const Annotation&, const Annotation&) { return true; }
};

// ---------------------------------------------------------------------------
// Expressions

struct Expr;

struct IntLit { int64_t value = 0; bool operator==(const IntLit&) const = default; };
struct BoolLit { bool value = false; bool operator==(const BoolLit&) const = default; };
struct StringLit { std::string value; bool operator==(const StringLit&) const = default; };
struct NullLit { bool operator==(const NullLit&) const = default; };
struct ThisExpr { bool operator==(const ThisExpr&) const = default; };
struct Name { std::string id; bool operator==(const Name&) const = default; };

struct FieldAccess {
  Box<Expr> object;
  std::string field;
  Span member_span;
  bool operator==(const FieldAccess&) const = default;
};

struct MethodCall {
  Box<Expr> receiver;  // empty for unqualified calls
  std::string method;
  std::vector<Expr> args;
  Span member_span;
  bool operator==(const MethodCall&) const = default;
};

struct NewExpr {
  std::string type;
  std::vector<Expr> args;
  bool operator==(const NewExpr&) const = default;
};

enum class UnaryOp { Not, Neg };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct Unary {
  UnaryOp op;
  Box<Expr> operand;
  bool operator==(const Unary&) const = default;
};

struct Binary {
  BinaryOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const Binary&) const = default;
};

struct Expr {
  using Node = std::variant<IntLit, BoolLit, StringLit, NullLit, ThisExpr, Name, FieldAccess,
                            MethodCall, NewExpr, Unary, Binary>;
  Node node;
  Span span;
  Annotation ann;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  T* as() { return std::get_if<T>(&node); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(node); }

  bool operator==(const Expr&) const = default;
};

// ---------------------------------------------------------------------------
// Statements

struct Stmt;

struct Block {
  std::vector<Stmt> stmts;
  Span span;
  bool operator==(const Block&) const = default;
};

struct VarDecl {
  std::string type;
  std::string name;
  std::optional<Expr> init;
  bool operator==(const VarDecl&) const = default;
};

struct Assign {
  Expr target;  // Name or FieldAccess
  Expr value;
  bool operator==(const Assign&) const = default;
};

struct ExprStmt { Expr expr; bool operator==(const ExprStmt&) const = default; };

struct IfStmt {
  Expr cond;
  Block then_block;
  std::optional<Block> else_block;
  bool operator==(const IfStmt&) const = default;
};

struct WhileStmt {
  Expr cond;
  Block body;
  bool operator==(const WhileStmt&) const = default;
};

struct ReturnStmt { std::optional<Expr> value; bool operator==(const ReturnStmt&) const = default; };
struct ThrowStmt { Expr value; bool operator==(const ThrowStmt&) const = default; };

struct CatchClause {
  std::string type;
  std::string var;
  Block body;
  Span span;
  bool operator==(const CatchClause&) const = default;
};

struct TryStmt {
  Block body;
  std::vector<CatchClause> catches;
  std::optional<Block> finally_block;
  // Set on try statements injected by the instrumentation itself. Not printed.
  struct Synthetic {
    bool value = false;
    friend bool operator==(const Synthetic&, const Synthetic&) { return true; }
  } synthetic;
  bool operator==(const TryStmt&) const = default;
};

struct BlockStmt { Block block; bool operator==(const BlockStmt&) const = default; };

struct Stmt {
  using Node = std::variant<VarDecl, Assign, ExprStmt, IfStmt, WhileStmt, ReturnStmt, ThrowStmt,
                            TryStmt, BlockStmt>;
  Node node;
  Span span;

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  T* as() { return std::get_if<T>(&node); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(node); }

  bool operator==(const Stmt&) const = default;
};

// ---------------------------------------------------------------------------
// Declarations

struct Param {
  std::string type;
  std::string name;
  Span span;
  bool operator==(const Param&) const = default;
};

struct FieldDecl {
  bool is_static = false;
  std::string type;
  std::string name;
  std::optional<Expr> init;
  Span span;
  bool operator==(const FieldDecl&) const = default;
};

struct MethodDecl {
  bool is_static = false;
  bool is_abstract = false;
  bool is_constructor = false;
  std::string return_type;  // "void" for constructors
  std::string name;         // class name for constructors
  std::vector<Param> params;
  std::optional<Block> body;  // absent for abstract methods
  Span span;
  bool operator==(const MethodDecl&) const = default;
};

enum class ClassKind { Class, Abstract, Interface };

struct ClassDecl {
  ClassKind kind = ClassKind::Class;
  std::string name;
  std::optional<std::string> extends;
  std::vector<std::string> implements;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> constructors;
  std::vector<MethodDecl> methods;
  Span span;
  bool operator==(const ClassDecl&) const = default;
};

struct CompilationUnit {
  std::string path;
  std::vector<ClassDecl> classes;
  bool operator==(const CompilationUnit&) const = default;
};

struct Program {
  std::vector<CompilationUnit> units;
  bool operator==(const Program&) const = default;

  const ClassDecl* find_class(std::string_view name) const {
    for (const auto& unit : units)
      for (const auto& cls : unit.classes)
        if (cls.name == name) return &cls;
    return nullptr;
  }
};

std::string method_signature(const ClassDecl& cls, const MethodDecl& method);

std::string_view to_string(BinaryOp op);

}  // namespace npefix
