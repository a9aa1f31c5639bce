#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "npefix/runtime/value.hpp"

namespace npefix {

struct PoolEntry {
  std::string name;  // "a" for locals and parameters, "this.f", "C.f" for fields
  std::string type;  // declared type
  Value value;
};

/// Values registered by one method activation.
struct PoolFrame {
  int64_t id = 0;
  Object* self = nullptr;
  std::vector<PoolEntry> params;
  std::vector<PoolEntry> locals;  // first registration order
};

/// Per-activation registry of accessible values, fed by the startMethod /
/// initVar / modifVar / endMethod hooks.
class ValuePool {
public:
  void start(int64_t id, Object* self, std::vector<PoolEntry> params);
  /// Pops the frame with `id` and everything above it. Unknown ids are ignored.
  void end(int64_t id);
  /// Records the latest value of a local or parameter.
  void set(int64_t id, const std::string& name, const std::string& type, const Value& value);
  /// Updates a local or parameter of the innermost frame, if registered.
  void update_top(const std::string& name, const Value& value);

  const PoolFrame* top() const { return frames_.empty() ? nullptr : &frames_.back(); }
  size_t depth() const { return frames_.size(); }

  /// Non-null values conforming to `type`, visible from the innermost frame:
  /// locals, parameters, fields of `this` (ancestors first), then statics.
  /// `statics` lists every static field with its current value.
  std::vector<PoolEntry> candidates(std::string_view type, const TypeTable& types,
                                    const std::vector<PoolEntry>& statics) const;

  /// Resolves a candidate by name against the current state.
  std::optional<Value> lookup(const std::string& name, const TypeTable& types,
                              const std::vector<PoolEntry>& statics) const;

private:
  PoolFrame* find(int64_t id);
  std::vector<PoolFrame> frames_;
};

}  // namespace npefix
