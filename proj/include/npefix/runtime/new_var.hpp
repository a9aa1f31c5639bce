#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "npefix/frontend/types.hpp"

namespace npefix {

/// Recipe for manufacturing one value: a primitive default, or a class with
/// the constructor to call and recipes for its arguments.
struct ConstructionPlan {
  std::string type;
  bool primitive = false;
  const MethodDecl* ctor = nullptr;  // null for the implicit default constructor
  std::vector<ConstructionPlan> args;
};

/// Static search for constructible values, bounded by a depth budget: each
/// nested object argument consumes one unit, primitives are free. Cyclic
/// constructor graphs therefore terminate.
class ConstructionPlanner {
public:
  ConstructionPlanner(const TypeTable& types, int depth_budget);

  /// Plan for exactly `type` (a concrete class or a primitive).
  std::optional<ConstructionPlan> plan(std::string_view type) const;

  /// Concrete subtypes of `required` (itself first) that have a plan.
  std::vector<std::string> constructible_types(std::string_view required) const;

  /// Source text of a plan, e.g. `new C(new D(), 0, "")`.
  static std::string render(const ConstructionPlan& plan);

  int depth_budget() const { return budget_; }

private:
  std::optional<ConstructionPlan> plan(std::string_view type, int budget) const;
  std::optional<ConstructionPlan> plan_any(std::string_view type, int budget) const;

  const TypeTable& types_;
  int budget_;
  mutable std::map<std::pair<std::string, int>, std::optional<ConstructionPlan>> memo_;
};

}  // namespace npefix
