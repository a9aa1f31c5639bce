#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace npefix {

enum class StrategyId { S1a, S1b, S2a, S2b, S3, S4a, S4b, S4c, S4d };

inline constexpr std::array<StrategyId, 9> kAllStrategies = {
    StrategyId::S1a, StrategyId::S1b, StrategyId::S2a, StrategyId::S2b, StrategyId::S3,
    StrategyId::S4a, StrategyId::S4b, StrategyId::S4c, StrategyId::S4d};

std::string_view to_string(StrategyId id);
std::optional<StrategyId> parse_strategy(std::string_view text);

/// S1a, S1b and S4b take a pool entry name; S2a, S2b and S4c a type name.
bool takes_pool_entry(StrategyId id);
bool takes_type(StrategyId id);
bool is_method_skip(StrategyId id);

struct Strategy {
  StrategyId id = StrategyId::S1a;
  std::string parameter;  // empty for S3, S4a, S4d

  bool operator==(const Strategy&) const = default;
  auto operator<=>(const Strategy&) const = default;
  std::string to_string() const;
};

/// Outcome of one run under a strategy.
enum class Outcome { OK, NoV, NoI, RI, US, NPE, Ex };

inline constexpr std::array<Outcome, 7> kAllOutcomes = {Outcome::OK,  Outcome::NoV, Outcome::NoI,
                                                         Outcome::RI,  Outcome::US,  Outcome::NPE,
                                                         Outcome::Ex};

std::string_view to_string(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view text);

}  // namespace npefix
