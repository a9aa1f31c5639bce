// npefix: command-line front end for instrumentation, seeding, repair runs,
// outcome matrices, overhead measurement and exploration sessions.
//
// Exit codes: 0 success, 1 the target program crashed, 2 usage error,
// 3 corpus, input or transform error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "npefix/frontend/errors.hpp"
#include "npefix/frontend/parser.hpp"
#include "npefix/frontend/printer.hpp"
#include "npefix/harness/harness.hpp"

namespace {

using namespace npefix;
namespace fs = std::filesystem;

constexpr uint64_t kDefaultSeed = 20150;

enum Exit { kOk = 0, kCrash = 1, kUsage = 2, kInputError = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string report;
  std::string format;
  int depth = 3;
  int jobs = 1;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

// Writes `json_text`/`text` according to --report and --format: a report file
// defaults to JSON, standard output to text.
void emit(const Common& c, const std::string& json_text, const std::string& text) {
  std::string fmt = c.format.empty() ? (c.report.empty() ? "text" : "json") : c.format;
  write_output(c.report, fmt == "json" ? json_text : text);
  if (!c.report.empty() && fmt == "json") std::cout << text;
}

CheckedProgramPtr load_files(const std::vector<std::string>& files) {
  std::vector<SourceUnit> sources;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw InputError("cannot read " + f);
    std::ostringstream ss;
    ss << in.rdbuf();
    sources.push_back(SourceUnit{f, ss.str()});
  }
  return load_program(sources);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

HarnessOptions harness_options(const Common& c, const std::vector<std::string>& strategies = {}) {
  HarnessOptions o;
  o.depth_budget = c.depth;
  o.jobs = c.jobs;
  if (!strategies.empty()) {
    o.strategies.clear();
    for (const auto& s : strategies) o.strategies.push_back(*parse_strategy(s));
  }
  return o;
}

void add_common(CLI::App* cmd, Common& c, bool jobs) {
  cmd->add_option("--report", c.report, "Write the report to FILE");
  cmd->add_option("--format", c.format, "Report format (default: json for --report, text on stdout)")
      ->check(CLI::IsMember({"json", "text"}));
  cmd->add_option("--depth", c.depth, "Recursion budget for manufactured objects")->capture_default_str()
      ->check(CLI::PositiveNumber);
  if (jobs) cmd->add_option("--jobs", c.jobs, "Cases run in parallel")->capture_default_str()->check(CLI::PositiveNumber);
}

const auto kStrategyCheck = CLI::IsMember({"S1a", "S1b", "S2a", "S2b", "S3", "S4a", "S4b", "S4c", "S4d"});

std::string result_json(const ExecutionResult& r, const std::vector<PatchSuggestion>& patches) {
  nlohmann::json j;
  j["exit"] = r.describe_exit();
  j["stdout"] = r.stdout_text;
  j["outcome"] = r.outcome ? nlohmann::json(std::string(to_string(*r.outcome))) : nlohmann::json(nullptr);
  j["log"] = nlohmann::json::array();
  for (const auto& rec : r.log) j["log"].push_back(nlohmann::json::parse(rec.to_json_line()));
  j["patches"] = nlohmann::json::array();
  for (const auto& p : patches) j["patches"].push_back(nlohmann::json::parse(p.to_json()));
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runtime repair of null dereferences in MiniJ programs"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // transform
  auto* transform = app.add_subcommand("transform", "Instrument a program");
  std::vector<std::string> t_files;
  std::string t_out;
  TransformConfig t_config;
  bool no_catch = false, no_deref = false, no_pool = false, no_line = false, no_method = false;
  transform->add_option("files", t_files, "MiniJ source files")->required()->check(CLI::ExistingFile);
  transform->add_option("-o,--output", t_out, "Output file (default: stdout)");
  transform->add_flag("--no-catch-stack", no_catch, "Skip the catch-stack pass");
  transform->add_flag("--no-deref-checks", no_deref, "Skip the dereference-check pass");
  transform->add_flag("--no-value-pool", no_pool, "Skip the value-pool pass");
  transform->add_flag("--no-line-skip", no_line, "Skip the line-skipping pass");
  transform->add_flag("--no-method-skip", no_method, "Skip the method-skipping pass");

  // seed
  auto* seed_cmd = app.add_subcommand("seed", "Remove null checks from a project and run its tests");
  std::string s_dir, s_out;
  Common s_common;
  seed_cmd->add_option("project", s_dir, "Project directory with app/ and tests/")->required()
      ->check(CLI::ExistingDirectory);
  seed_cmd->add_option("-o,--output", s_out, "Write the seeded application files to this directory");
  add_common(seed_cmd, s_common, true);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a program, optionally repairing null dereferences");
  std::vector<std::string> r_files;
  std::string r_entry, r_method = "main", r_strategy, r_deployments;
  bool r_explore = false, r_trace = false;
  uint64_t r_seed = kDefaultSeed;
  uint64_t r_steps = 20'000'000;
  Common r_common;
  run_cmd->add_option("files", r_files, "MiniJ source files")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--entry", r_entry, "Entry class (default: the class declaring main)");
  run_cmd->add_option("--method", r_method, "Entry method")->capture_default_str();
  auto* r_strategy_opt = run_cmd->add_option("--strategy", r_strategy, "Repair with one fixed strategy")
                             ->check(kStrategyCheck);
  auto* r_explore_opt = run_cmd->add_flag("--explore", r_explore, "Repair by exploring untried strategies");
  r_strategy_opt->excludes(r_explore_opt);
  run_cmd->add_option("--seed", r_seed, "Exploration seed")->capture_default_str();
  run_cmd->add_option("--deployments", r_deployments, "Deployment table, loaded if present and updated");
  run_cmd->add_flag("--trace", r_trace, "Repair log on the error stream");
  run_cmd->add_option("--max-steps", r_steps, "Abort after this many steps")->capture_default_str();
  add_common(run_cmd, r_common, false);

  // matrix
  auto* matrix_cmd = app.add_subcommand("matrix", "Outcome matrix of a crashing corpus under fixed strategies");
  std::string m_manifest;
  std::vector<std::string> m_strategies;
  Common m_common;
  matrix_cmd->add_option("manifest", m_manifest, "Corpus manifest")->required()->check(CLI::ExistingFile);
  matrix_cmd->add_option("--strategy", m_strategies, "Restrict to these strategies")->check(kStrategyCheck);
  add_common(matrix_cmd, m_common, true);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Overhead of instrumentation on a normal corpus");
  std::string b_manifest;
  int b_reps = 10;
  Common b_common;
  bench_cmd->add_option("manifest", b_manifest, "Corpus manifest")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--reps", b_reps, "Repetitions per side")->capture_default_str()->check(CLI::PositiveNumber);
  add_common(bench_cmd, b_common, false);

  // explore
  auto* explore_cmd = app.add_subcommand("explore", "Re-run a failing program until a strategy is deployed");
  std::vector<std::string> e_files;
  std::string e_entry, e_method = "main", e_deployments;
  uint64_t e_seed = kDefaultSeed;
  size_t e_max = 200;
  Common e_common;
  explore_cmd->add_option("files", e_files, "MiniJ source files")->required()->check(CLI::ExistingFile);
  explore_cmd->add_option("--entry", e_entry, "Entry class (default: the class declaring main)");
  explore_cmd->add_option("--method", e_method, "Entry method")->capture_default_str();
  explore_cmd->add_option("--seed", e_seed, "Exploration seed")->capture_default_str();
  explore_cmd->add_option("--deployments", e_deployments, "Deployment table, loaded if present and updated");
  explore_cmd->add_option("--max-runs", e_max, "Give up after this many runs")->capture_default_str();
  add_common(explore_cmd, e_common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*transform) {
      t_config.enable_catch_stack = !no_catch;
      t_config.enable_deref_checks = !no_deref;
      t_config.enable_value_pool = !no_pool;
      t_config.enable_line_skip = !no_line;
      t_config.enable_method_skip = !no_method;
      auto p = load_files(t_files);
      write_output(t_out, print_program(transform_all(*p, t_config)->program));
      return kOk;
    }

    if (*seed_cmd) {
      auto result = run_seeding_campaign(s_dir, harness_options(s_common));
      if (!s_out.empty()) {
        for (const auto& unit : result.seeded_program.units) {
          if (!unit.path.starts_with("app/")) continue;
          fs::path dst = fs::path(s_out) / unit.path;
          fs::create_directories(dst.parent_path());
          write_output(dst.string(), print_unit(unit));
        }
      }
      emit(s_common, result.to_json(), result.to_text());
      return kOk;
    }

    if (*run_cmd) {
      auto original = load_files(r_files);
      RunOptions opt;
      opt.entry = Entry{r_entry, r_method};
      opt.depth_budget = r_common.depth;
      opt.max_steps = r_steps;
      bool repairing = !r_strategy.empty() || r_explore;
      if (r_explore) std::cerr << "seed: " << r_seed << "\n";
      auto ctl = !r_strategy.empty() ? RepairController::fixed(*parse_strategy(r_strategy))
                 : r_explore        ? RepairController::explore(r_seed)
                                    : RepairController::off();
      if (!r_deployments.empty() && fs::exists(r_deployments)) ctl.load_deployments(read_text(r_deployments));
      CheckedProgramPtr target = repairing ? transform_all(*original) : original;
      auto r = run(*target, opt, ctl);

      std::cout << r.stdout_text << std::flush;
      std::vector<PatchSuggestion> patches;
      for (const auto& [key, strategy] : r.deployed)
        if (auto p = suggest_patch(*original, key, strategy, r_common.depth)) patches.push_back(*p);
      if (r_trace) {
        for (const auto& rec : r.log) std::cerr << rec.to_json_line() << "\n";
        for (const auto& p : patches) std::cerr << p.to_json() << "\n";
      }
      if (r.outcome) std::cerr << "outcome: " << to_string(*r.outcome) << "\n";
      if (!r_deployments.empty() && repairing) write_output(r_deployments, ctl.deployments_json() + "\n");
      if (!r_common.report.empty()) write_output(r_common.report, result_json(r, patches));
      if (!r.normal()) {
        std::cerr << r.describe_exit() << "\n";
        return kCrash;
      }
      return kOk;
    }

    if (*matrix_cmd) {
      auto m = run_matrix(load_corpus(m_manifest), harness_options(m_common, m_strategies));
      emit(m_common, m.to_json(), m.to_text());
      return kOk;
    }

    if (*bench_cmd) {
      auto report = measure_overhead(load_corpus(b_manifest), b_reps, harness_options(b_common));
      emit(b_common, report.to_json(), report.to_text());
      return kOk;
    }

    if (*explore_cmd) {
      std::cerr << "seed: " << e_seed << "\n";
      CrashTask task{e_files.front(), load_files(e_files), Entry{e_entry, e_method}};
      std::string deployments = !e_deployments.empty() && fs::exists(e_deployments) ? read_text(e_deployments) : "";
      auto s = run_exploration_session(task, e_seed, harness_options(e_common), e_max, deployments);
      if (!e_deployments.empty()) write_output(e_deployments, s.deployments + "\n");
      std::ostringstream summary;
      summary << "runs: " << s.invocations << "\n"
              << "result: " << (s.deployed ? "deployed" : s.exhausted ? "exhausted" : "gave up") << "\n";
      for (const auto& p : s.patches)
        summary << "patch for " << p.crash_point << " (" << p.strategy.to_string() << ") in " << p.method << ":\n"
                << p.snippet;
      if (!e_common.report.empty()) write_output(e_common.report, s.log_jsonl());
      std::cout << summary.str();
      if (!s.deployed) {
        std::cerr << s.last.describe_exit() << "\n";
        return kCrash;
      }
      return kOk;
    }
  } catch (const FrontendError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const TransformError& e) {
    std::cerr << "transform error: " << e.what() << "\n";
    return kInputError;
  } catch (const CorpusError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "malformed JSON: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}
