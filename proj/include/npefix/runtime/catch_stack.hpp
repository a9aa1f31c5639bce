#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "npefix/frontend/types.hpp"

namespace npefix {

/// Runtime model of the open try blocks and the exception types they catch.
class CatchStack {
public:
  struct Frame {
    int64_t id = 0;
    std::vector<std::string> types;
  };

  void add(int64_t id, std::vector<std::string> types) { frames_.push_back({id, std::move(types)}); }

  /// Removes the frame with `id` wherever it sits. Unknown ids are ignored,
  /// which makes the second remove of a try (catch, then finally) a no-op.
  void remove(int64_t id);

  /// True when some open frame catches `exception_type` or a supertype.
  bool will_be_caught(std::string_view exception_type, const TypeTable& types) const;

  const std::vector<Frame>& frames() const { return frames_; }
  bool empty() const { return frames_.empty(); }
  void clear() { frames_.clear(); }

private:
  std::vector<Frame> frames_;
};

}  // namespace npefix
