#include "npefix/runtime/catch_stack.hpp"

namespace npefix {

void CatchStack::remove(int64_t id) {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    if (it->id == id) {
      frames_.erase(std::next(it).base());
      return;
    }
  }
}

bool CatchStack::will_be_caught(std::string_view exception_type, const TypeTable& types) const {
  for (const auto& f : frames_)
    for (const auto& t : f.types)
      if (types.is_subtype(exception_type, t)) return true;
  return false;
}

}  // namespace npefix
