#include "npefix/runtime/new_var.hpp"

#include <algorithm>

#include "npefix/frontend/printer.hpp"

namespace npefix {

ConstructionPlanner::ConstructionPlanner(const TypeTable& types, int depth_budget)
    : types_(types), budget_(depth_budget) {}

std::optional<ConstructionPlan> ConstructionPlanner::plan(std::string_view type) const {
  return plan(type, budget_);
}

std::optional<ConstructionPlan> ConstructionPlanner::plan_any(std::string_view type, int budget) const {
  if (TypeTable::is_primitive(type)) return plan(type, budget);
  for (const auto& sub : types_.concrete_subtypes(type))
    if (auto p = plan(sub, budget)) return p;
  return std::nullopt;
}

std::optional<ConstructionPlan> ConstructionPlanner::plan(std::string_view type, int budget) const {
  if (TypeTable::is_primitive(type)) return ConstructionPlan{std::string(type), true, nullptr, {}};
  auto key = std::make_pair(std::string(type), budget);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  std::optional<ConstructionPlan> result;
  const ClassInfo* info = types_.find(type);
  if (info && info->instantiable() && budget > 0) {
    if (info->constructors.empty()) {
      result = ConstructionPlan{info->name, false, nullptr, {}};
    } else {
      std::vector<const MethodDecl*> ctors = info->constructors;
      std::stable_sort(ctors.begin(), ctors.end(), [](const MethodDecl* a, const MethodDecl* b) {
        return a->params.size() < b->params.size();
      });
      for (const MethodDecl* ctor : ctors) {
        ConstructionPlan p{info->name, false, ctor, {}};
        bool ok = true;
        for (const auto& param : ctor->params) {
          auto arg = plan_any(param.type, budget - 1);
          if (!arg) {
            ok = false;
            break;
          }
          p.args.push_back(std::move(*arg));
        }
        if (ok) {
          result = std::move(p);
          break;
        }
      }
    }
  }
  memo_.emplace(key, result);
  return result;
}

std::vector<std::string> ConstructionPlanner::constructible_types(std::string_view required) const {
  if (TypeTable::is_primitive(required)) return {std::string(required)};
  std::vector<std::string> out;
  for (const auto& sub : types_.concrete_subtypes(required))
    if (plan(sub, budget_)) out.push_back(sub);
  return out;
}

std::string ConstructionPlanner::render(const ConstructionPlan& plan) {
  if (plan.primitive) {
    if (plan.type == "int") return "0";
    if (plan.type == "bool") return "false";
    return "\"\"";
  }
  std::string s = "new " + plan.type + "(";
  for (size_t i = 0; i < plan.args.size(); ++i) {
    if (i) s += ", ";
    s += render(plan.args[i]);
  }
  return s + ")";
}

}  // namespace npefix
