#include "npefix/frontend/types.hpp"

#include <functional>

namespace npefix {

void TypeTable::add(ClassInfo info) {
  order_.push_back(info.name);
  std::string name = info.name;
  classes_.emplace(std::move(name), std::move(info));
}

std::optional<std::string> TypeTable::finalize() {
  ancestors_.clear();
  enum class Mark { None, Active, Done };
  std::map<std::string, Mark, std::less<>> marks;
  std::optional<std::string> cycle;

  std::function<void(const std::string&)> visit = [&](const std::string& name) {
    auto& mark = marks[name];
    if (mark == Mark::Done || cycle) return;
    if (mark == Mark::Active) {
      cycle = name;
      return;
    }
    mark = Mark::Active;
    std::set<std::string, std::less<>> result{name};
    const ClassInfo& info = classes_.at(name);
    std::vector<std::string> direct = info.interfaces;
    if (info.super) direct.insert(direct.begin(), *info.super);
    for (const auto& parent : direct) {
      if (!classes_.count(parent)) continue;  // reported by the checker
      visit(parent);
      if (cycle) return;
      const auto& up = ancestors_.at(parent);
      result.insert(up.begin(), up.end());
    }
    ancestors_[name] = std::move(result);
    marks[name] = Mark::Done;
  };

  for (const auto& name : order_) visit(name);
  return cycle;
}

const ClassInfo* TypeTable::find(std::string_view name) const {
  auto it = classes_.find(name);
  return it == classes_.end() ? nullptr : &it->second;
}

const std::set<std::string, std::less<>>& TypeTable::ancestors(std::string_view cls) const {
  static const std::set<std::string, std::less<>> empty;
  auto it = ancestors_.find(cls);
  return it == ancestors_.end() ? empty : it->second;
}

bool TypeTable::is_subtype(std::string_view sub, std::string_view super) const {
  if (sub == super) return true;
  return ancestors(sub).count(super) > 0;
}

bool TypeTable::is_assignable(std::string_view from, std::string_view to) const {
  if (from == to) return true;
  if (from == kNullType) return is_class_type(to);
  if (is_class_type(from) && is_class_type(to)) return is_subtype(from, to);
  return false;
}

const MethodDecl* TypeTable::find_method(std::string_view cls, std::string_view name,
                                         std::string* owner) const {
  // Superclass chain first so that concrete implementations win over
  // interface declarations.
  std::vector<std::string_view> pending;
  for (const ClassInfo* c = find(cls); c; c = c->super ? find(*c->super) : nullptr) {
    auto it = c->methods.find(name);
    if (it != c->methods.end()) {
      if (owner) *owner = c->name;
      return it->second;
    }
    for (const auto& i : c->interfaces) pending.push_back(i);
  }
  while (!pending.empty()) {
    std::string_view next = pending.front();
    pending.erase(pending.begin());
    const ClassInfo* c = find(next);
    if (!c) continue;
    auto it = c->methods.find(name);
    if (it != c->methods.end()) {
      if (owner) *owner = c->name;
      return it->second;
    }
    for (const auto& i : c->interfaces) pending.push_back(i);
  }
  return nullptr;
}

const FieldInfo* TypeTable::find_field(std::string_view cls, std::string_view name) const {
  for (const ClassInfo* c = find(cls); c; c = c->super ? find(*c->super) : nullptr)
    for (const auto& f : c->fields)
      if (f.name == name) return &f;
  return nullptr;
}

std::vector<FieldInfo> TypeTable::instance_fields(std::string_view cls) const {
  std::vector<const ClassInfo*> chain;
  for (const ClassInfo* c = find(cls); c; c = c->super ? find(*c->super) : nullptr)
    chain.push_back(c);
  std::vector<FieldInfo> out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    for (const auto& f : (*it)->fields)
      if (!f.is_static) out.push_back(f);
  return out;
}

std::vector<FieldInfo> TypeTable::static_fields() const {
  std::vector<FieldInfo> out;
  for (const auto& name : order_)
    for (const auto& f : classes_.at(name).fields)
      if (f.is_static) out.push_back(f);
  return out;
}

std::vector<std::string> TypeTable::concrete_subtypes(std::string_view type) const {
  std::vector<std::string> out;
  const ClassInfo* self = find(type);
  if (!self) return out;
  if (self->instantiable()) out.emplace_back(type);
  for (const auto& name : order_) {
    if (name == type) continue;
    const ClassInfo& c = classes_.at(name);
    if (c.instantiable() && is_subtype(name, type)) out.push_back(name);
  }
  return out;
}

}  // namespace npefix
