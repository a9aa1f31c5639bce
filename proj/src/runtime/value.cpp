#include "npefix/runtime/value.hpp"

namespace npefix {

Value default_value(std::string_view type) {
  if (type == "int") return int64_t{0};
  if (type == "bool") return false;
  if (type == "String") return std::string();
  return std::monostate{};
}

std::string dynamic_type(const Value& v) {
  switch (v.index()) {
    case 0: return std::string(kNullType);
    case 1: return "int";
    case 2: return "bool";
    case 3: return "String";
    default: return std::get<Object*>(v)->class_name();
  }
}

std::string format_value(const Value& v) {
  switch (v.index()) {
    case 0: return "null";
    case 1: return std::to_string(std::get<int64_t>(v));
    case 2: return std::get<bool>(v) ? "true" : "false";
    case 3: return std::get<std::string>(v);
    default: return std::get<Object*>(v)->class_name();
  }
}

bool values_equal(const Value& a, const Value& b) { return a == b; }

bool conforms(const Value& v, std::string_view type, const TypeTable& types) {
  if (is_null(v)) return false;
  if (const Object* o = as_object(v)) return types.is_subtype(o->class_name(), type);
  return dynamic_type(v) == type;
}

}  // namespace npefix
