#include "npefix/runtime/strategy.hpp"

namespace npefix {

std::string_view to_string(StrategyId id) {
  static constexpr std::string_view names[] = {"S1a", "S1b", "S2a", "S2b", "S3",
                                               "S4a", "S4b", "S4c", "S4d"};
  return names[static_cast<int>(id)];
}

std::optional<StrategyId> parse_strategy(std::string_view text) {
  for (StrategyId id : kAllStrategies)
    if (to_string(id) == text) return id;
  return std::nullopt;
}

bool takes_pool_entry(StrategyId id) {
  return id == StrategyId::S1a || id == StrategyId::S1b || id == StrategyId::S4b;
}

bool takes_type(StrategyId id) {
  return id == StrategyId::S2a || id == StrategyId::S2b || id == StrategyId::S4c;
}

bool is_method_skip(StrategyId id) {
  return id == StrategyId::S4a || id == StrategyId::S4b || id == StrategyId::S4c || id == StrategyId::S4d;
}

std::string Strategy::to_string() const {
  std::string s(npefix::to_string(id));
  if (!parameter.empty()) s += "(" + parameter + ")";
  return s;
}

std::string_view to_string(Outcome o) {
  static constexpr std::string_view names[] = {"OK", "NoV", "NoI", "RI", "US", "NPE", "Ex"};
  return names[static_cast<int>(o)];
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  for (Outcome o : kAllOutcomes)
    if (to_string(o) == text) return o;
  return std::nullopt;
}

}  // namespace npefix
