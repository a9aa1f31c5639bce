#include "npefix/harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "npefix/frontend/parser.hpp"

namespace npefix {

using nlohmann::json;
namespace fs = std::filesystem;

bool CorpusCase::has_tag(std::string_view tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorpusError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

RunOptions run_options(const Entry& entry, const HarnessOptions& options) {
  RunOptions opt;
  opt.entry = entry;
  opt.max_steps = options.max_steps;
  opt.depth_budget = options.depth_budget;
  return opt;
}

std::string pad(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, ms >= 100 ? "%.0f" : "%.2f", ms);
  return buf;
}

}  // namespace

// -- corpus -------------------------------------------------------------------

Corpus load_corpus(const fs::path& manifest) {
  json j;
  try {
    j = json::parse(read_file(manifest));
  } catch (const json::exception& e) {
    throw CorpusError(manifest.string() + ": " + e.what());
  }
  Corpus corpus;
  corpus.root = manifest.parent_path();
  corpus.name = j.value("name", manifest.stem().string());
  for (const auto& c : j.at("cases")) {
    CorpusCase cc;
    cc.name = c.at("name").get<std::string>();
    cc.files = c.at("files").get<std::vector<std::string>>();
    cc.entry.cls = c.value("entry", "");
    cc.entry.method = c.value("method", "main");
    const auto& expect = c.at("expect");
    if (expect.contains("crash")) cc.expected_exception = expect["crash"].get<std::string>();
    else cc.expected_output = expect.at("output").get<std::string>();
    cc.tags = c.value("tags", std::vector<std::string>{});
    corpus.cases.push_back(std::move(cc));
  }
  return corpus;
}

CheckedProgramPtr load_case(const Corpus& corpus, const CorpusCase& c) {
  std::vector<SourceUnit> sources;
  for (const auto& f : c.files) sources.push_back(SourceUnit{f, read_file(corpus.root / f)});
  return load_program(sources);
}

void validate_case(const Corpus& corpus, const CorpusCase& c, const RunOptions& options) {
  auto p = load_case(corpus, c);
  RunOptions opt = options;
  opt.entry = c.entry;
  auto r = run(*p, opt);
  if (c.crashes()) {
    if (!r.uncaught(*c.expected_exception))
      throw CorpusError("case '" + c.name + "' should crash with " + *c.expected_exception + " but exited " +
                        r.describe_exit());
  } else if (!r.normal() || r.stdout_text != *c.expected_output) {
    throw CorpusError("case '" + c.name + "' does not match its expected output (exit " + r.describe_exit() + ")");
  }
}

// -- outcome matrix -------------------------------------------------------------

std::string OutcomeMatrix::to_json() const {
  json j;
  j["corpus"] = corpus;
  j["strategies"] = json::array();
  for (auto s : strategies) j["strategies"].push_back(std::string(to_string(s)));
  j["cases"] = json::array();
  for (const auto& row : rows) {
    json cells = json::object();
    for (auto s : strategies) cells[std::string(to_string(s))] = std::string(to_string(row.cells.at(s)));
    j["cases"].push_back({{"name", row.name}, {"cells", cells}, {"success_count", row.success_count}});
  }
  j["totals"] = json::object();
  for (auto s : strategies) j["totals"][std::string(to_string(s))] = totals.at(s);
  j["union"] = union_count;
  return j.dump(2) + "\n";
}

OutcomeMatrix OutcomeMatrix::from_json(const std::string& text) {
  json j = json::parse(text);
  OutcomeMatrix m;
  m.corpus = j.at("corpus").get<std::string>();
  for (const auto& s : j.at("strategies")) m.strategies.push_back(parse_strategy(s.get<std::string>()).value());
  for (const auto& c : j.at("cases")) {
    MatrixRow row;
    row.name = c.at("name").get<std::string>();
    for (auto& [k, v] : c.at("cells").items())
      row.cells[parse_strategy(k).value()] = parse_outcome(v.get<std::string>()).value();
    row.success_count = c.at("success_count").get<int>();
    m.rows.push_back(std::move(row));
  }
  for (auto& [k, v] : j.at("totals").items()) m.totals[parse_strategy(k).value()] = v.get<int>();
  m.union_count = j.at("union").get<int>();
  return m;
}

std::string OutcomeMatrix::to_text() const {
  size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.name.size() + 2);
  std::ostringstream out;
  out << pad("Case", width);
  for (auto s : strategies) out << pad(std::string(to_string(s)), 5);
  out << "#OK\n";
  int ok_sum = 0;
  for (const auto& r : rows) {
    out << pad(r.name, width);
    for (auto s : strategies) out << pad(std::string(to_string(r.cells.at(s))), 5);
    out << r.success_count << "\n";
    ok_sum += r.success_count;
  }
  out << pad("Total", width);
  for (auto s : strategies) out << pad(std::to_string(totals.at(s)), 5);
  out << ok_sum << "\n";
  out << "Union: " << union_count << "/" << rows.size() << "\n";
  return out.str();
}

OutcomeMatrix run_matrix(const std::string& corpus_name, const std::vector<CrashTask>& tasks,
                         const HarnessOptions& options) {
  OutcomeMatrix m;
  m.corpus = corpus_name;
  m.strategies = options.strategies;
  for (auto s : m.strategies) m.totals[s] = 0;

  std::vector<CheckedProgramPtr> instrumented(tasks.size());
  parallel_for(tasks.size(), options.jobs, [&](size_t i) {
    auto r = run(*tasks[i].original, run_options(tasks[i].entry, options));
    if (!r.uncaught(kNullPointerException))
      throw CorpusError("case '" + tasks[i].name + "' does not crash with a NullPointerException (exit " +
                        r.describe_exit() + ")");
    instrumented[i] = transform_all(*tasks[i].original);
  });

  size_t ns = m.strategies.size();
  std::vector<Outcome> cells(tasks.size() * ns);
  parallel_for(cells.size(), options.jobs, [&](size_t k) {
    size_t i = k / ns;
    auto ctl = RepairController::fixed(m.strategies[k % ns]);
    auto r = run(*instrumented[i], run_options(tasks[i].entry, options), ctl);
    cells[k] = r.outcome.value_or(Outcome::Ex);
  });

  for (size_t i = 0; i < tasks.size(); ++i) {
    MatrixRow row;
    row.name = tasks[i].name;
    for (size_t s = 0; s < ns; ++s) {
      Outcome o = cells[i * ns + s];
      row.cells[m.strategies[s]] = o;
      if (o == Outcome::OK) {
        ++row.success_count;
        ++m.totals[m.strategies[s]];
      }
    }
    if (row.success_count > 0) ++m.union_count;
    m.rows.push_back(std::move(row));
  }
  return m;
}

OutcomeMatrix run_matrix(const Corpus& corpus, const HarnessOptions& options) {
  std::vector<CrashTask> tasks;
  for (const auto& c : corpus.cases) {
    if (!c.crashes()) continue;
    if (*c.expected_exception != kNullPointerException)
      throw CorpusError("case '" + c.name + "' is not a null dereference crash");
    tasks.push_back(CrashTask{c.name, load_case(corpus, c), c.entry});
  }
  return run_matrix(corpus.name, tasks, options);
}

// -- seeding campaign -------------------------------------------------------------

SeedingProject load_seeding_project(const fs::path& root) {
  SeedingProject p;
  p.root = root;
  auto collect = [&](const std::string& sub, std::vector<std::string>& out) {
    fs::path dir = root / sub;
    if (!fs::is_directory(dir)) return;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".mj") out.push_back(sub + "/" + e.path().filename().string());
    std::sort(out.begin(), out.end());
  };
  collect("app", p.app_files);
  collect("tests", p.test_files);
  if (p.app_files.empty()) throw CorpusError(root.string() + ": no app/*.mj files");
  if (fs::exists(root / "inventory.json"))
    p.inventory = json::parse(read_file(root / "inventory.json")).at("null_checks").get<size_t>();
  return p;
}

namespace {

std::vector<Entry> test_entries(const CheckedProgram& p, const std::vector<std::string>& test_files) {
  std::vector<Entry> out;
  for (const auto& unit : p.program.units) {
    if (std::find(test_files.begin(), test_files.end(), unit.path) == test_files.end()) continue;
    for (const auto& cls : unit.classes)
      for (const auto& m : cls.methods)
        if (!m.is_static && m.params.empty() && m.name.starts_with("test") && m.return_type == "void")
          out.push_back(Entry{cls.name, m.name});
  }
  return out;
}

std::vector<TestOutcome> run_tests(const CheckedProgram& p, const std::vector<Entry>& entries,
                                   const HarnessOptions& options) {
  std::vector<TestOutcome> out(entries.size());
  parallel_for(entries.size(), options.jobs, [&](size_t i) {
    auto r = run(p, run_options(entries[i], options));
    out[i] = TestOutcome{entries[i].cls + "." + entries[i].method, r.status, r.exception_type};
  });
  return out;
}

}  // namespace

double CampaignResult::union_rate() const {
  return failing_npe == 0 ? 0.0 : 100.0 * matrix.union_count / static_cast<double>(failing_npe);
}

std::string CampaignResult::to_json() const {
  json j;
  j["removed_checks"] = seed.count;
  j["checks"] = json::array();
  for (const auto& rc : seed.removed_checks)
    j["checks"].push_back({{"path", rc.path},
                           {"line", rc.span.line},
                           {"subject", rc.subject},
                           {"op", rc.op},
                           {"negated", rc.negated},
                           {"guarded", rc.guarded}});
  j["tests"] = seeded.size();
  j["failing_npe"] = failing_npe;
  j["failing_assertion"] = failing_assertion;
  j["failing_other"] = failing_other;
  j["union_rate_pct"] = union_rate();
  j["matrix"] = json::parse(matrix.to_json());
  return j.dump(2) + "\n";
}

std::string CampaignResult::to_text() const {
  std::ostringstream out;
  out << "Removed null checks: " << seed.count << "\n";
  out << "Tests: " << seeded.size() << "  failing with NullPointerException: " << failing_npe
      << "  with AssertionError: " << failing_assertion << "  other: " << failing_other << "\n\n";
  out << matrix.to_text();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f%%", union_rate());
  out << "Union repair rate: " << matrix.union_count << "/" << failing_npe << " = " << buf << "\n";
  return out.str();
}

CampaignResult run_seeding_campaign(const fs::path& project_dir, const HarnessOptions& options) {
  SeedingProject project = load_seeding_project(project_dir);
  std::vector<SourceUnit> sources;
  for (const auto* group : {&project.app_files, &project.test_files})
    for (const auto& f : *group) sources.push_back(SourceUnit{f, read_file(project.root / f)});
  auto original = load_program(sources);
  std::vector<Entry> entries = test_entries(*original, project.test_files);

  CampaignResult result;
  result.baseline = run_tests(*original, entries, options);

  auto seeded = seed_remove_null_checks(original->program, [](const CompilationUnit& u) {
    return u.path.starts_with("app/");
  });
  result.seed = std::move(seeded.report);
  result.seeded_program = seeded.program;
  CheckedProgramPtr seeded_checked = check_program(std::move(seeded.program));
  result.seeded = run_tests(*seeded_checked, entries, options);

  std::vector<CrashTask> tasks;
  for (size_t i = 0; i < entries.size(); ++i) {
    const TestOutcome& t = result.seeded[i];
    if (t.status == ExitStatus::Normal) continue;
    if (t.status == ExitStatus::Uncaught && t.exception_type == kNullPointerException) {
      ++result.failing_npe;
      tasks.push_back(CrashTask{t.test, seeded_checked, entries[i]});
    } else if (t.status == ExitStatus::Uncaught && t.exception_type == kAssertionError) {
      ++result.failing_assertion;
    } else {
      ++result.failing_other;
    }
  }
  result.matrix = run_matrix(project_dir.filename().string(), tasks, options);
  return result;
}

// -- overhead -----------------------------------------------------------------

std::string OverheadReport::to_json() const {
  json j;
  j["cases"] = json::array();
  for (const auto& r : rows)
    j["cases"].push_back({{"name", r.name},
                          {"original_ms", r.original_ms},
                          {"transformed_ms", r.transformed_ms},
                          {"overhead_pct", r.overhead_pct},
                          {"reps", r.reps}});
  return j.dump(2) + "\n";
}

std::string OverheadReport::to_text() const {
  size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.name.size() + 2);
  std::ostringstream out;
  out << pad("Case", width) << pad("Original(ms)", 15) << pad("Transformed(ms)", 18) << "Overhead\n";
  for (const auto& r : rows)
    out << pad(r.name, width) << pad(format_ms(r.original_ms), 15) << pad(format_ms(r.transformed_ms), 18)
        << static_cast<long>(r.overhead_pct) << "%\n";
  return out.str();
}

OverheadReport measure_overhead(const Corpus& corpus, int reps, const HarnessOptions& options) {
  using clock = std::chrono::steady_clock;
  OverheadReport report;
  for (const auto& c : corpus.cases) {
    if (c.crashes()) continue;
    bool self = c.has_tag("self-comparison");
    auto original = load_case(corpus, c);
    CheckedProgramPtr other = self ? original : transform_all(*original);
    RunOptions opt = run_options(c.entry, options);

    auto time_once = [&](const CheckedProgram& p) {
      auto ctl = p.instrumented ? RepairController::idle() : RepairController::off();
      auto t0 = clock::now();
      auto r = run(p, opt, ctl);
      auto t1 = clock::now();
      if (!r.normal()) throw CorpusError("case '" + c.name + "' failed while timing: " + r.describe_exit());
      return std::chrono::duration<double, std::milli>(t1 - t0).count();
    };
    time_once(*original);
    time_once(*other);
    double sum_o = 0, sum_t = 0;
    for (int i = 0; i < reps; ++i) {
      sum_o += time_once(*original);
      sum_t += time_once(*other);
    }
    OverheadRow row;
    row.name = self ? c.name + " (self)" : c.name;
    row.reps = reps;
    row.original_ms = sum_o / reps;
    row.transformed_ms = sum_t / reps;
    row.overhead_pct = row.original_ms > 0 ? 100.0 * (row.transformed_ms - row.original_ms) / row.original_ms : 0.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

// -- exploration session ------------------------------------------------------------

std::string SessionResult::log_jsonl() const {
  std::string out;
  for (const auto& r : log) out += r.to_json_line() + "\n";
  for (const auto& p : patches) out += p.to_json() + "\n";
  return out;
}

SessionResult run_exploration_session(const CrashTask& task, uint64_t seed, const HarnessOptions& options,
                                      size_t max_invocations, const std::string& deployments_json) {
  SessionResult s;
  s.name = task.name;
  s.seed = seed;
  auto instrumented = transform_all(*task.original);
  auto ctl = RepairController::explore(seed);
  if (!deployments_json.empty()) ctl.load_deployments(deployments_json);
  RunOptions opt = run_options(task.entry, options);

  while (s.invocations < max_invocations) {
    s.last = run(*instrumented, opt, ctl);
    ++s.invocations;
    if (s.last.normal()) {
      s.deployed = true;
      for (const auto& [key, strategy] : s.last.deployed)
        if (auto p = suggest_patch(*task.original, key, strategy, options.depth_budget)) s.patches.push_back(*p);
      break;
    }
    // nothing left to explore: either a crash point ran out of candidates,
    // or the failure is not a repairable null dereference at all
    if (ctl.exhausted_in_run() || !ctl.any_decision_in_run()) {
      s.exhausted = true;
      break;
    }
  }
  s.log = ctl.log();
  for (const auto& rec : s.log) {
    if (rec.event != "crash") continue;
    s.candidates = ctl.states().at(rec.crash_point).candidates;
    break;
  }
  s.deployments = ctl.deployments_json();
  return s;
}

}  // namespace npefix
