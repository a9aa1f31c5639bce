// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

#include "../support/random_programs.hpp"
#include "npefix/frontend/parser.hpp"
#include "npefix/harness/harness.hpp"

using namespace npefix;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = NPEFIX_CORPUS_DIR;

// Pinned tolerances and sizes.
constexpr double kPreservationBudgetS = 30;
constexpr int kMinNormalCases = 20;
constexpr int kOracleSeeds = 1000;
constexpr double kOracleBudgetS = 60;
constexpr int kMinCrashCases = 15;
constexpr double kMatrixBudgetS = 60;
constexpr int kSessions = 100;
constexpr double kExplorationBudgetS = 60;
constexpr int kOverheadReps = 10;
constexpr double kSelfOverheadPct = 5.0;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Corpus& crash_corpus() {
  static const Corpus c = load_corpus(kCorpus / "crash" / "manifest.json");
  return c;
}

const Corpus& normal_corpus() {
  static const Corpus c = load_corpus(kCorpus / "normal" / "manifest.json");
  return c;
}

// Collects failures; the first few are quoted in the detail line.
struct Failures {
  int count = 0;
  std::string first;
  void add(const std::string& what) {
    if (count++ < 3) first += (first.empty() ? "" : "; ") + what;
  }
};

// -- criteria -----------------------------------------------------------------

Verdict preservation() {
  auto t0 = std::chrono::steady_clock::now();
  Failures f;
  int n = 0;
  for (const auto& c : normal_corpus().cases) {
    auto original = load_case(normal_corpus(), c);
    auto instrumented = transform_all(*original);
    RunOptions opt;
    opt.entry = c.entry;
    auto a = run(*original, opt);
    auto ctl = RepairController::idle();
    auto b = run(*instrumented, opt, ctl);
    ++n;
    if (a.stdout_text != b.stdout_text || a.status != b.status || a.exception_type != b.exception_type)
      f.add(c.name);
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v;
  v.pass = f.count == 0 && n >= kMinNormalCases && s < kPreservationBudgetS;
  v.detail = std::to_string(n - f.count) + "/" + std::to_string(n) + " byte-identical";
  if (f.count) v.detail += "; differing: " + f.first;
  return v;
}

Verdict catch_stack_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  size_t queries = 0, agreements = 0;
  Failures f;
  for (int seed = 1; seed <= kOracleSeeds; ++seed) {
    auto p = transform_all(*load_program({SourceUnit{"R.mj", testing::RandomTryProgram(seed).generate()}}));
    testing::UnwindOracle oracle;
    RunOptions opt;
    opt.observer = &oracle;
    auto ctl = RepairController::idle();
    auto r = run(*p, opt, ctl);
    if (r.status == ExitStatus::Aborted) f.add("seed " + std::to_string(seed) + " aborted");
    queries += oracle.queries();
    agreements += oracle.agreements();
    if (oracle.queries() != oracle.agreements()) f.add("seed " + std::to_string(seed));
  }
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v;
  v.pass = f.count == 0 && queries > 0 && agreements == queries && s < kOracleBudgetS;
  v.detail = std::to_string(agreements) + "/" + std::to_string(queries) + " throw sites agree over " +
             std::to_string(kOracleSeeds) + " programs";
  if (f.count) v.detail += "; " + f.first;
  return v;
}

Verdict matrix_golden() {
  auto t0 = std::chrono::steady_clock::now();
  OutcomeMatrix golden = OutcomeMatrix::from_json(read_file(kCorpus / "crash" / "golden_matrix.json"));
  OutcomeMatrix m = run_matrix(crash_corpus());
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::set<Outcome> seen;
  int differing = 0;
  for (size_t i = 0; i < m.rows.size(); ++i) {
    for (const auto& [id, o] : m.rows[i].cells) seen.insert(o);
    if (i >= golden.rows.size() || !(m.rows[i] == golden.rows[i])) ++differing;
  }
  Verdict v;
  v.pass = m == golden && seen.size() == kAllOutcomes.size() && static_cast<int>(m.rows.size()) >= kMinCrashCases &&
           s < kMatrixBudgetS;
  v.detail = std::to_string(m.rows.size()) + " cases x 9, " + std::to_string(differing) + " rows differ from golden, " +
             std::to_string(seen.size()) + "/7 codes present, union " + std::to_string(m.union_count);
  return v;
}

Verdict injection_semantics() {
  const char* program = R"(class T {
    void foo() { print("foo"); }
}
class Main {
    static void main() {
        T b = new T();
        T a = null;
        a.foo();
        print(a == null);
    }
}
)";
  auto instrumented = transform_all(*load_program({SourceUnit{"Probe.mj", program}}));
  int ok = 0;
  std::string detail;
  for (auto [id, still_null] : {std::pair{StrategyId::S1a, true}, std::pair{StrategyId::S2a, true},
                                std::pair{StrategyId::S1b, false}, std::pair{StrategyId::S2b, false}}) {
    auto ctl = RepairController::fixed(id);
    auto r = run(*instrumented, {}, ctl);
    bool pass = r.normal() && r.stdout_text == std::string("foo\n") + (still_null ? "true\n" : "false\n");
    ok += pass;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(to_string(id)) +
              (still_null ? " leaves a null" : " rebinds a") + (pass ? "" : " [wrong]");
  }
  return Verdict{ok == 4, std::to_string(ok) + "/4 probes: " + detail};
}

Verdict exploration() {
  auto t0 = std::chrono::steady_clock::now();
  OutcomeMatrix golden = OutcomeMatrix::from_json(read_file(kCorpus / "crash" / "golden_matrix.json"));
  const auto& cases = crash_corpus().cases;
  Failures a, b, c, d;
  int deployed = 0, exhausted = 0;
  for (int i = 0; i < kSessions; ++i) {
    const CorpusCase& cc = cases[static_cast<size_t>(i) % cases.size()];
    const auto& row = golden.rows[static_cast<size_t>(i) % cases.size()];
    uint64_t seed = 1000 + static_cast<uint64_t>(i);
    std::string tag = cc.name + "@" + std::to_string(seed);
    CrashTask task{cc.name, load_case(crash_corpus(), cc), cc.entry};
    SessionResult s = run_exploration_session(task, seed);

    // (a) no (crash point, strategy, parameter) is tried twice
    std::set<std::tuple<std::string, StrategyId, std::string>> tried;
    for (const auto& rec : s.log) {
      if (rec.event != "try" || !rec.rng_draw) continue;
      if (!tried.emplace(rec.crash_point, rec.strategy->id, rec.strategy->parameter).second) a.add(tag);
    }

    // (b) cases a fixed strategy repairs end in deployment within |candidates| runs
    bool viable = row.success_count > 0;
    if (viable && !(s.deployed && s.invocations <= s.candidates))
      b.add(tag + " (" + std::to_string(s.invocations) + " runs, " + std::to_string(s.candidates) + " candidates" +
            (s.deployed ? "" : ", not deployed") + ")");

    // (c) a deployed strategy is reapplied without drawing
    if (s.deployed) {
      ++deployed;
      auto instrumented = transform_all(*task.original);
      auto ctl = RepairController::explore(seed + 7);
      ctl.load_deployments(s.deployments);
      RunOptions opt;
      opt.entry = task.entry;
      auto r = run(*instrumented, opt, ctl);
      if (ctl.draws_in_run() != 0 || !r.normal()) c.add(tag);
    }

    // (d) exhaustion crashes exactly like the uninstrumented program
    if (!s.deployed) {
      ++exhausted;
      RunOptions opt;
      opt.entry = task.entry;
      auto plain = run(*task.original, opt);
      if (!s.exhausted || s.last.status != plain.status || s.last.exception_type != plain.exception_type ||
          s.last.exception_message != plain.exception_message || s.last.stdout_text != plain.stdout_text)
        d.add(tag);
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v;
  v.pass = a.count + b.count + c.count + d.count == 0 && secs < kExplorationBudgetS;
  v.detail = std::to_string(kSessions) + " sessions, " + std::to_string(deployed) + " deployed, " +
             std::to_string(exhausted) + " exhausted; violations a=" + std::to_string(a.count) +
             " b=" + std::to_string(b.count) + " c=" + std::to_string(c.count) + " d=" + std::to_string(d.count);
  for (const auto* f : {&a, &b, &c, &d})
    if (f->count) v.detail += "; " + f->first;
  return v;
}

Verdict seeding() {
  fs::path demo = kCorpus / "seeding" / "demo";
  auto project = load_seeding_project(demo);
  auto r = run_seeding_campaign(demo);
  bool inventory = project.inventory && r.seed.count == *project.inventory;
  size_t failing = r.failing_npe + r.failing_assertion + r.failing_other;
  char rate[32];
  std::snprintf(rate, sizeof rate, "%.1f%%", r.union_rate());
  Verdict v;
  v.pass = inventory && r.failing_other == 0 && failing > 0;
  v.detail = "removed " + std::to_string(r.seed.count) + " checks (inventory " +
             (project.inventory ? std::to_string(*project.inventory) : "missing") + "), " + std::to_string(failing) +
             " failing tests: " + std::to_string(r.failing_npe) + " NPE, " + std::to_string(r.failing_assertion) +
             " assertion, " + std::to_string(r.failing_other) + " other; union repair rate " + rate + " (" +
             std::to_string(r.matrix.union_count) + "/" + std::to_string(r.failing_npe) + ")";
  return v;
}

Verdict overhead() {
  auto report = measure_overhead(normal_corpus(), kOverheadReps);
  Verdict v;
  const OverheadRow* self = nullptr;
  double lo = 1e9, hi = -1e9;
  bool reps_ok = !report.rows.empty();
  for (const auto& r : report.rows) {
    reps_ok = reps_ok && r.reps == kOverheadReps;
    if (r.name.ends_with("(self)")) self = &r;
    else {
      lo = std::min(lo, r.overhead_pct);
      hi = std::max(hi, r.overhead_pct);
    }
  }
  std::string text = report.to_text();
  bool format_ok = text.find("Original(ms)") != std::string::npos && text.find("%\n") != std::string::npos;
  v.pass = self && reps_ok && format_ok && std::fabs(self->overhead_pct) < kSelfOverheadPct;
  char buf[160];
  if (self)
    std::snprintf(buf, sizeof buf, "self-comparison %.2f%% over %d reps; instrumented cases %.0f%%..%.0f%%",
                  self->overhead_pct, kOverheadReps, lo, hi);
  else
    std::snprintf(buf, sizeof buf, "no self-comparison case");
  v.detail = buf;
  return v;
}

Verdict patches() {
  const std::vector<StrategyId> representative = {StrategyId::S1b, StrategyId::S3, StrategyId::S4d};
  Failures f;
  std::map<StrategyId, int> applied;
  int emitted = 0;
  for (StrategyId id : representative) {
    for (const auto& cc : crash_corpus().cases) {
      auto original = load_case(crash_corpus(), cc);
      auto ctl = RepairController::fixed(id);
      RunOptions opt;
      opt.entry = cc.entry;
      auto r = run(*transform_all(*original), opt, ctl);
      if (r.outcome != Outcome::OK) continue;
      std::vector<std::pair<std::string, Strategy>> decisions;
      for (const auto& rec : r.log)
        if (rec.event == "try" && rec.strategy) decisions.emplace_back(rec.crash_point, *rec.strategy);
      // A single source patch corresponds to a run with one repaired crash point.
      if (decisions.size() != 1) continue;
      auto p = suggest_patch(*original, decisions[0].first, decisions[0].second);
      std::string tag = cc.name + "/" + std::string(to_string(id));
      if (!p) {
        f.add(tag + " no patch");
        continue;
      }
      ++emitted;
      try {
        parse_statements(p->path, p->snippet);
        auto patched = apply_patch(*original, *p);
        auto after = run(*patched, opt);
        if (after.normal()) ++applied[id];
        else f.add(tag + " still fails: " + after.describe_exit());
      } catch (const std::exception& e) {
        f.add(tag + ": " + e.what());
      }
    }
  }
  Verdict v;
  v.pass = f.count == 0;
  for (StrategyId id : representative) v.pass = v.pass && applied[id] > 0;
  v.detail = std::to_string(emitted) + " patches re-parsed and applied;";
  for (StrategyId id : representative)
    v.detail += " " + std::string(to_string(id)) + " fixes " + std::to_string(applied[id]);
  if (f.count) v.detail += "; failures: " + f.first;
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"semantic-preservation", preservation},
      {"catch-stack-oracle", catch_stack_oracle},
      {"strategy-matrix-golden", matrix_golden},
      {"injection-semantics", injection_semantics},
      {"exploration-properties", exploration},
      {"seeding-campaign", seeding},
      {"overhead-report", overhead},
      {"patch-suggestions", patches},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = Verdict{false, std::string("error: ") + e.what()};
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.0f ms): %s\n", v.pass ? "PASS" : "FAIL", name, ms, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
