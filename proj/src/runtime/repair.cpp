#include "npefix/runtime/repair.hpp"

#include <stdexcept>

#include "json.hpp"

namespace npefix {

using nlohmann::json;

std::string LogRecord::to_json_line() const {
  json j;
  j["event"] = event;
  j["crash_point"] = crash_point;
  j["strategy"] = strategy ? json(std::string(to_string(strategy->id))) : json(nullptr);
  j["parameter"] = strategy && !strategy->parameter.empty() ? json(strategy->parameter) : json(nullptr);
  j["rng_draw"] = rng_draw ? json(*rng_draw) : json(nullptr);
  j["timestamp"] = timestamp;
  if (outcome) j["outcome"] = std::string(to_string(*outcome));
  return j.dump();
}

RepairController RepairController::fixed(StrategyId id) {
  RepairController c(RepairMode::Fixed);
  c.fixed_ = id;
  return c;
}

RepairController RepairController::explore(uint64_t seed) {
  RepairController c(RepairMode::Explore);
  c.seed_ = seed;
  c.rng_.seed(seed);
  return c;
}

void RepairController::record(std::string event, const std::string& key, std::optional<Strategy> s,
                              std::optional<uint64_t> draw, std::optional<Outcome> outcome) {
  log_.push_back(LogRecord{std::move(event), key, std::move(s), draw, clock_++, outcome});
}

void RepairController::begin_run() {
  run_decisions_.clear();
  run_order_.clear();
  first_inapplicable_.reset();
  exhausted_in_run_ = false;
  draws_in_run_ = 0;
  run_log_begin_ = log_.size();
}

std::vector<Strategy> RepairController::expand_candidates(const RepairContext& ctx) {
  std::vector<Strategy> out;
  auto pool = [&](StrategyId id, const std::vector<PoolEntry>& entries) {
    for (const auto& e : entries) out.push_back({id, e.name});
  };
  auto typed = [&](StrategyId id, const std::vector<std::string>& types) {
    for (const auto& t : types) out.push_back({id, t});
  };
  pool(StrategyId::S1a, ctx.pool_required);
  pool(StrategyId::S1b, ctx.pool_required);
  typed(StrategyId::S2a, ctx.types_required);
  typed(StrategyId::S2b, ctx.types_required);
  if (ctx.guarded) out.push_back({StrategyId::S3, ""});
  if (ctx.method_skip_available) {
    bool is_void = ctx.return_type == "void";
    if (!is_void && !TypeTable::is_primitive(ctx.return_type)) out.push_back({StrategyId::S4a, ""});
    if (!is_void) {
      pool(StrategyId::S4b, ctx.pool_return);
      typed(StrategyId::S4c, ctx.types_return);
    }
    if (is_void) out.push_back({StrategyId::S4d, ""});
  }
  return out;
}

std::variant<Strategy, Outcome> RepairController::first_candidate(StrategyId id, const RepairContext& ctx) {
  bool is_void = ctx.return_type == "void";
  switch (id) {
    case StrategyId::S1a:
    case StrategyId::S1b:
      if (ctx.pool_required.empty()) return Outcome::NoV;
      return Strategy{id, ctx.pool_required.front().name};
    case StrategyId::S2a:
    case StrategyId::S2b:
      if (ctx.types_required.empty()) return Outcome::NoI;
      return Strategy{id, ctx.types_required.front()};
    case StrategyId::S3:
      if (!ctx.guarded) return Outcome::US;
      return Strategy{id, ""};
    case StrategyId::S4a:
      if (is_void || TypeTable::is_primitive(ctx.return_type)) return Outcome::RI;
      if (!ctx.method_skip_available) return Outcome::US;
      return Strategy{id, ""};
    case StrategyId::S4b:
      if (is_void) return Outcome::RI;
      if (ctx.pool_return.empty()) return Outcome::NoV;
      if (!ctx.method_skip_available) return Outcome::US;
      return Strategy{id, ctx.pool_return.front().name};
    case StrategyId::S4c:
      if (is_void) return Outcome::RI;
      if (ctx.types_return.empty()) return Outcome::NoI;
      if (!ctx.method_skip_available) return Outcome::US;
      return Strategy{id, ctx.types_return.front()};
    case StrategyId::S4d:
      if (!is_void) return Outcome::RI;
      if (!ctx.method_skip_available) return Outcome::US;
      return Strategy{id, ""};
  }
  return Outcome::Ex;
}

Decision RepairController::decide(const RepairContext& ctx) {
  if (auto it = run_decisions_.find(ctx.crash_point); it != run_decisions_.end()) return it->second;

  const std::string& key = ctx.crash_point;
  CrashPointState& state = states_[key];
  state.key = key;
  record("crash", key);

  Decision d;
  if (state.deployed) {
    d.strategy = state.deployed;
    d.deployed = true;
    record("try", key, d.strategy);
  } else if (mode_ == RepairMode::Fixed) {
    auto c = first_candidate(*fixed_, ctx);
    if (auto* s = std::get_if<Strategy>(&c)) {
      d.strategy = *s;
      state.tried.insert(*s);
      record("try", key, d.strategy);
    } else {
      d.inapplicable = std::get<Outcome>(c);
      record("try", key, Strategy{*fixed_, ""}, std::nullopt, d.inapplicable);
    }
  } else if (mode_ == RepairMode::Explore) {
    std::vector<Strategy> all = expand_candidates(ctx);
    if (state.candidates == 0) state.candidates = all.size();
    std::vector<Strategy> untried;
    for (auto& s : all)
      if (!state.tried.count(s)) untried.push_back(std::move(s));
    if (untried.empty()) {
      d.exhausted = true;
      exhausted_in_run_ = true;
      record("exhausted", key);
    } else {
      uint64_t draw = rng_();
      ++draws_in_run_;
      d.strategy = untried[draw % untried.size()];
      state.tried.insert(*d.strategy);
      record("try", key, d.strategy, draw);
    }
  }

  if (run_decisions_.empty() && d.inapplicable) first_inapplicable_ = d.inapplicable;
  run_decisions_.emplace(key, d);
  run_order_.push_back(key);
  return d;
}

std::vector<std::pair<std::string, Strategy>> RepairController::end_run(bool success) {
  std::vector<std::pair<std::string, Strategy>> deployed;
  if (!success) return deployed;
  for (const auto& key : run_order_) {
    const Decision& d = run_decisions_.at(key);
    if (!d.strategy || d.deployed) continue;
    record("success", key, d.strategy, std::nullopt, Outcome::OK);
    deploy(key, *d.strategy);
    deployed.emplace_back(key, *d.strategy);
  }
  return deployed;
}

void RepairController::deploy(const std::string& crash_point, const Strategy& s) {
  CrashPointState& state = states_[crash_point];
  state.key = crash_point;
  if (state.deployed) return;
  state.deployed = s;
  record("deploy", crash_point, s);
}

std::string RepairController::deployments_json() const {
  json j = json::object();
  for (const auto& [key, state] : states_) {
    if (!state.deployed) continue;
    j[key] = {{"strategy", std::string(to_string(state.deployed->id))},
              {"parameter", state.deployed->parameter.empty() ? json(nullptr) : json(state.deployed->parameter)}};
  }
  return j.dump(2);
}

void RepairController::load_deployments(const std::string& json_text) {
  json j = json::parse(json_text);
  if (!j.is_object()) throw std::runtime_error("deployment table must be a JSON object");
  for (auto& [key, v] : j.items()) {
    auto id = parse_strategy(v.at("strategy").get<std::string>());
    if (!id) throw std::runtime_error("unknown strategy in deployment table: " + v.at("strategy").dump());
    Strategy s{*id, v.contains("parameter") && v["parameter"].is_string() ? v["parameter"].get<std::string>() : ""};
    CrashPointState& state = states_[key];
    state.key = key;
    state.deployed = s;
  }
}

}  // namespace npefix
