#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "npefix/frontend/types.hpp"

namespace npefix {

struct Object;

/// Runtime value. Objects live in a Heap and are referenced by pointer.
using Value = std::variant<std::monostate, int64_t, bool, std::string, Object*>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }
inline Object* as_object(const Value& v) {
  auto* p = std::get_if<Object*>(&v);
  return p ? *p : nullptr;
}

/// Field layout of a class: every instance field, ancestors first.
struct ClassLayout {
  const ClassInfo* info = nullptr;
  std::vector<FieldInfo> fields;
  std::unordered_map<std::string, size_t> index;
};

struct Object {
  const ClassLayout* layout = nullptr;
  std::vector<Value> fields;

  const std::string& class_name() const { return layout->info->name; }
  Value* field(const std::string& name) {
    auto it = layout->index.find(name);
    return it == layout->index.end() ? nullptr : &fields[it->second];
  }
};

/// Arena for objects. Nothing is collected before the heap is destroyed.
class Heap {
public:
  Object* allocate(const ClassLayout* layout) {
    Object& o = objects_.emplace_back();
    o.layout = layout;
    o.fields.resize(layout->fields.size());
    return &o;
  }
  size_t size() const { return objects_.size(); }

private:
  std::deque<Object> objects_;
};

/// Default value of a declared type: 0, false, "" or null.
Value default_value(std::string_view type);

/// Dynamic type name: "int", "bool", "String", "null" or the class name.
std::string dynamic_type(const Value& v);

/// Text written by `print` and used in string concatenation.
std::string format_value(const Value& v);

/// Equality used by `==` and assertEquals: identity for objects, value
/// equality otherwise.
bool values_equal(const Value& a, const Value& b);

/// Whether `v` is a non-null value whose dynamic type conforms to `type`.
bool conforms(const Value& v, std::string_view type, const TypeTable& types);

}  // namespace npefix
