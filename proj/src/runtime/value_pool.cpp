#include "npefix/runtime/value_pool.hpp"

namespace npefix {

PoolFrame* ValuePool::find(int64_t id) {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
    if (it->id == id) return &*it;
  return nullptr;
}

void ValuePool::start(int64_t id, Object* self, std::vector<PoolEntry> params) {
  frames_.push_back(PoolFrame{id, self, std::move(params), {}});
}

void ValuePool::end(int64_t id) {
  for (size_t i = frames_.size(); i-- > 0;) {
    if (frames_[i].id == id) {
      frames_.resize(i);
      return;
    }
  }
}

static void upsert(std::vector<PoolEntry>& entries, const std::string& name, const std::string& type,
                   const Value& value) {
  for (auto& e : entries) {
    if (e.name == name) {
      e.value = value;
      return;
    }
  }
  entries.push_back(PoolEntry{name, type, value});
}

void ValuePool::set(int64_t id, const std::string& name, const std::string& type, const Value& value) {
  PoolFrame* f = find(id);
  if (!f) return;
  for (auto& p : f->params) {
    if (p.name == name) {
      p.value = value;
      return;
    }
  }
  upsert(f->locals, name, type, value);
}

void ValuePool::update_top(const std::string& name, const Value& value) {
  if (frames_.empty()) return;
  for (auto* list : {&frames_.back().locals, &frames_.back().params})
    for (auto& e : *list)
      if (e.name == name) {
        e.value = value;
        return;
      }
}

std::vector<PoolEntry> ValuePool::candidates(std::string_view type, const TypeTable& types,
                                             const std::vector<PoolEntry>& statics) const {
  std::vector<PoolEntry> out;
  auto consider = [&](const PoolEntry& e) {
    if (conforms(e.value, type, types)) out.push_back(e);
  };
  if (const PoolFrame* f = top()) {
    for (const auto& e : f->locals) consider(e);
    for (const auto& e : f->params) consider(e);
    if (f->self) {
      const auto& fields = f->self->layout->fields;
      for (size_t i = 0; i < fields.size(); ++i)
        consider(PoolEntry{"this." + fields[i].name, fields[i].type, f->self->fields[i]});
    }
  }
  for (const auto& e : statics) consider(e);
  return out;
}

std::optional<Value> ValuePool::lookup(const std::string& name, const TypeTable& types,
                                       const std::vector<PoolEntry>& statics) const {
  (void)types;
  if (const PoolFrame* f = top()) {
    for (const auto* list : {&f->locals, &f->params})
      for (const auto& e : *list)
        if (e.name == name) return e.value;
    if (f->self && name.starts_with("this.")) {
      if (Value* v = f->self->field(name.substr(5))) return *v;
    }
  }
  for (const auto& e : statics)
    if (e.name == name) return e.value;
  return std::nullopt;
}

}  // namespace npefix
