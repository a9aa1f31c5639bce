#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "npefix/frontend/ast.hpp"

namespace npefix {

inline constexpr std::string_view kExceptionType = "Exception";
inline constexpr std::string_view kNullPointerException = "NullPointerException";
inline constexpr std::string_view kAssertionError = "AssertionError";
inline constexpr std::string_view kArithmeticException = "ArithmeticException";
inline constexpr std::string_view kStackOverflowError = "StackOverflowError";
inline constexpr std::string_view kForceReturnError = "__npefix_ForceReturnError";
inline constexpr std::string_view kNullType = "null";

struct FieldInfo {
  std::string name;
  std::string type;
  bool is_static = false;
  std::string owner;
  const FieldDecl* decl = nullptr;
};

struct ClassInfo {
  std::string name;
  ClassKind kind = ClassKind::Class;
  std::optional<std::string> super;
  std::vector<std::string> interfaces;
  const ClassDecl* decl = nullptr;
  std::string path;
  bool builtin = false;
  std::vector<FieldInfo> fields;                        // own fields, declaration order
  std::vector<const MethodDecl*> constructors;
  std::map<std::string, const MethodDecl*, std::less<>> methods;  // own methods

  bool instantiable() const { return kind == ClassKind::Class; }
};

/// Class hierarchy of a program together with the built-in classes.
///
/// The subtype relation is reflexive and transitive; the table refuses
/// cyclic hierarchies at construction time.
class TypeTable {
public:
  /// Registers a class. Order of registration is the declaration order used
  /// wherever the runtime needs a deterministic enumeration.
  void add(ClassInfo info);

  /// Computes the ancestor closure. Returns the name of a class on a cycle,
  /// or nothing when the hierarchy is well-formed.
  std::optional<std::string> finalize();

  const ClassInfo* find(std::string_view name) const;
  bool has_class(std::string_view name) const { return find(name) != nullptr; }
  const std::vector<std::string>& classes() const { return order_; }

  static bool is_primitive(std::string_view type) {
    return type == "int" || type == "bool" || type == "String";
  }
  bool is_class_type(std::string_view type) const { return has_class(type); }
  bool is_reference(std::string_view type) const { return type == kNullType || is_class_type(type); }
  bool is_valid_type(std::string_view type) const { return is_primitive(type) || is_class_type(type); }

  bool is_subtype(std::string_view sub, std::string_view super) const;
  bool is_assignable(std::string_view from, std::string_view to) const;
  bool is_throwable(std::string_view type) const {
    return is_subtype(type, kExceptionType) || is_subtype(type, kForceReturnError);
  }

  /// Looks a method up along the superclass chain, then through interfaces.
  const MethodDecl* find_method(std::string_view cls, std::string_view name,
                                std::string* owner = nullptr) const;
  const FieldInfo* find_field(std::string_view cls, std::string_view name) const;

  /// Instance fields of `cls`, ancestors first.
  std::vector<FieldInfo> instance_fields(std::string_view cls) const;

  /// Static fields of every class, in declaration order.
  std::vector<FieldInfo> static_fields() const;

  /// Instantiable subtypes of `type` (including itself), in declaration order
  /// with `type` first when it is instantiable.
  std::vector<std::string> concrete_subtypes(std::string_view type) const;

  const std::set<std::string, std::less<>>& ancestors(std::string_view cls) const;

private:
  std::map<std::string, ClassInfo, std::less<>> classes_;
  std::map<std::string, std::set<std::string, std::less<>>, std::less<>> ancestors_;
  std::vector<std::string> order_;
};

}  // namespace npefix
