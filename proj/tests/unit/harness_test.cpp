#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "npefix/frontend/derefs.hpp"
#include "npefix/frontend/parser.hpp"
#include "npefix/frontend/printer.hpp"
#include "npefix/harness/harness.hpp"

using namespace npefix;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = NPEFIX_CORPUS_DIR;

const Corpus& crash_corpus() {
  static const Corpus c = load_corpus(kCorpus / "crash" / "manifest.json");
  return c;
}

const Corpus& normal_corpus() {
  static const Corpus c = load_corpus(kCorpus / "normal" / "manifest.json");
  return c;
}

const OutcomeMatrix& crash_matrix() {
  static const OutcomeMatrix m = run_matrix(crash_corpus());
  return m;
}

const CorpusCase& find_case(const Corpus& corpus, const std::string& name) {
  for (const auto& c : corpus.cases)
    if (c.name == name) return c;
  FAIL("no case " << name);
  throw std::logic_error("unreachable");
}

std::vector<fs::path> corpus_sources() {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(kCorpus))
    if (e.is_regular_file() && e.path().extension() == ".mj") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  void write(const std::string& rel, const std::string& text) const {
    fs::create_directories((path / rel).parent_path());
    std::ofstream(path / rel, std::ios::binary) << text;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// corpus integrity

TEST_CASE("corpus: every case behaves as its manifest says") {
  for (const auto* corpus : {&crash_corpus(), &normal_corpus()})
    for (const auto& c : corpus->cases) {
      CAPTURE(c.name);
      CHECK_NOTHROW(validate_case(*corpus, c));
    }
  CHECK(crash_corpus().cases.size() >= 15);
  CHECK(normal_corpus().cases.size() >= 20);
}

TEST_CASE("corpus: print/parse round trip is structurally exact") {
  auto files = corpus_sources();
  REQUIRE(files.size() >= 38);
  for (const auto& f : files) {
    CAPTURE(f.string());
    CompilationUnit once = parse_unit(SourceUnit{f.string(), slurp(f)});
    CompilationUnit twice = parse_unit(SourceUnit{f.string(), print_unit(once)});
    CHECK(once == twice);
  }
}

TEST_CASE("corpus: instrumented programs re-parse and type-check") {
  for (const auto* corpus : {&crash_corpus(), &normal_corpus()})
    for (const auto& c : corpus->cases) {
      CAPTURE(c.name);
      auto t = transform_all(*load_case(*corpus, c));
      std::vector<SourceUnit> printed;
      for (const auto& u : t->program.units) printed.push_back(SourceUnit{u.path, print_unit(u)});
      CHECK_NOTHROW(load_program(printed, CheckOptions{true}));
    }
}

TEST_CASE("corpus: crash-point keys are injective") {
  for (const auto* corpus : {&crash_corpus(), &normal_corpus()})
    for (const auto& c : corpus->cases) {
      auto p = load_case(*corpus, c);
      auto sites = enumerate_dereferences(p->program);
      std::set<std::string> keys;
      for (const auto& s : sites) keys.insert(s.key);
      CHECK_MESSAGE(keys.size() == sites.size(), c.name);
    }
}

TEST_CASE("corpus: a crash case that does not crash is rejected by run_matrix") {
  Corpus bad = normal_corpus();
  bad.cases.resize(1);
  bad.cases[0].expected_output.reset();
  bad.cases[0].expected_exception = "NullPointerException";
  CHECK_THROWS_AS(run_matrix(bad), CorpusError);
}

TEST_CASE("corpus: malformed manifest is a corpus error") {
  TempDir dir("npefix_bad_manifest");
  dir.write("manifest.json", "{\"cases\": [");
  CHECK_THROWS_AS(load_corpus(dir.path / "manifest.json"), CorpusError);
}

// ---------------------------------------------------------------------------
// outcome matrix

TEST_CASE("matrix: empty corpus gives an empty matrix") {
  Corpus empty;
  empty.name = "empty";
  auto m = run_matrix(empty);
  CHECK(m.rows.empty());
  CHECK(m.union_count == 0);
  CHECK(m.strategies.size() == 9);
  for (const auto& [id, n] : m.totals) CHECK(n == 0);
}

TEST_CASE("matrix: deterministic, also in parallel") {
  HarnessOptions par;
  par.jobs = 4;
  CHECK(run_matrix(crash_corpus()) == crash_matrix());
  CHECK(run_matrix(crash_corpus(), par) == crash_matrix());
}

TEST_CASE("matrix: totals, success counts and union agree with the cells") {
  const auto& m = crash_matrix();
  REQUIRE(m.rows.size() == crash_corpus().cases.size());
  int max_total = 0;
  for (StrategyId id : m.strategies) {
    int ok = 0;
    for (const auto& r : m.rows) ok += r.cells.at(id) == Outcome::OK;
    CHECK(m.totals.at(id) == ok);
    max_total = std::max(max_total, ok);
  }
  int union_count = 0;
  for (const auto& r : m.rows) {
    CHECK(r.cells.size() == 9);
    int ok = 0;
    for (const auto& [id, o] : r.cells) ok += o == Outcome::OK;
    CHECK(r.success_count == ok);
    union_count += ok > 0;
  }
  CHECK(m.union_count == union_count);
  CHECK(m.union_count >= max_total);
}

TEST_CASE("matrix: the text Total row is the column sums") {
  const auto& m = crash_matrix();
  std::istringstream in(m.to_text());
  std::string line, total;
  while (std::getline(in, line))
    if (line.starts_with("Total")) total = line;
  REQUIRE_FALSE(total.empty());
  std::istringstream cols(total.substr(5));
  int sum_all = 0;
  for (StrategyId id : m.strategies) {
    int v = -1;
    cols >> v;
    CHECK(v == m.totals.at(id));
    sum_all += v;
  }
  int ok_column = -1;
  cols >> ok_column;
  CHECK(ok_column == sum_all);
  CHECK(m.to_text().find("Union: " + std::to_string(m.union_count) + "/" + std::to_string(m.rows.size())) !=
        std::string::npos);
}

TEST_CASE("matrix: JSON round trip and schema keys") {
  const auto& m = crash_matrix();
  CHECK(OutcomeMatrix::from_json(m.to_json()) == m);
  auto j = nlohmann::json::parse(m.to_json());
  for (const char* key : {"corpus", "strategies", "cases", "totals", "union"}) CHECK(j.contains(key));
  CHECK(j["cases"][0].contains("cells"));
  CHECK(j["cases"][0].contains("success_count"));
}

TEST_CASE("matrix: void-method cases never get RI under S4d") {
  const auto& m = crash_matrix();
  for (size_t i = 0; i < m.rows.size(); ++i) {
    const auto& c = crash_corpus().cases[i];
    if (!c.has_tag("void-method")) continue;
    CAPTURE(c.name);
    Outcome o = m.rows[i].cells.at(StrategyId::S4d);
    CHECK((o == Outcome::OK || o == Outcome::NPE || o == Outcome::Ex));
  }
}

TEST_CASE("matrix: unskippable cases get US under S3") {
  const auto& m = crash_matrix();
  for (size_t i = 0; i < m.rows.size(); ++i)
    if (crash_corpus().cases[i].has_tag("unskippable")) CHECK(m.rows[i].cells.at(StrategyId::S3) == Outcome::US);
}

TEST_CASE("matrix: restricting strategies keeps only those columns") {
  HarnessOptions opt;
  opt.strategies = {StrategyId::S3, StrategyId::S4d};
  auto m = run_matrix(crash_corpus(), opt);
  CHECK(m.strategies == opt.strategies);
  for (size_t i = 0; i < m.rows.size(); ++i) {
    CHECK(m.rows[i].cells.size() == 2);
    CHECK(m.rows[i].cells.at(StrategyId::S3) == crash_matrix().rows[i].cells.at(StrategyId::S3));
  }
}

// ---------------------------------------------------------------------------
// seeding

TEST_CASE("seeding: removed checks match the hand inventory") {
  auto project = load_seeding_project(kCorpus / "seeding" / "demo");
  REQUIRE(project.inventory);
  auto r = run_seeding_campaign(kCorpus / "seeding" / "demo");
  CHECK(r.seed.count == *project.inventory);
  CHECK(r.seed.removed_checks.size() == r.seed.count);
  for (const auto& rc : r.seed.removed_checks) CHECK(rc.path.starts_with("app/"));
}

TEST_CASE("seeding: baseline passes and failures are NPEs or assertion errors") {
  auto r = run_seeding_campaign(kCorpus / "seeding" / "demo");
  REQUIRE(r.baseline.size() == r.seeded.size());
  for (const auto& t : r.baseline) CHECK_MESSAGE(t.status == ExitStatus::Normal, t.test);
  CHECK(r.failing_npe > 0);
  CHECK(r.failing_other == 0);
  CHECK(r.matrix.rows.size() == r.failing_npe);
  CHECK(r.union_rate() == doctest::Approx(100.0 * r.matrix.union_count / r.failing_npe));
  CHECK(r.to_text().find("Union repair rate") != std::string::npos);
}

TEST_CASE("seeding: a project without null checks has no seeded failures") {
  TempDir dir("npefix_seed_plain");
  dir.write("app/calc.mj", "class Calc {\n    int twice(int x) { return x * 2; }\n}\n");
  dir.write("tests/calc_test.mj",
            "class CalcTest {\n    void testTwice() { assertEquals(8, new Calc().twice(4)); }\n}\n");
  auto r = run_seeding_campaign(dir.path);
  CHECK(r.seed.count == 0);
  CHECK(r.seeded.size() == 1);
  CHECK(r.failing_npe + r.failing_assertion + r.failing_other == 0);
  CHECK(r.matrix.rows.empty());
}

TEST_CASE("seeding: test files are never seeded") {
  TempDir dir("npefix_seed_tests");
  dir.write("app/a.mj", "class A {\n    int v;\n}\n");
  dir.write("tests/a_test.mj",
            "class ATest {\n    void testGuard() {\n        A a = null;\n        if (a != null) {\n"
            "            print(a.v);\n        }\n    }\n}\n");
  auto r = run_seeding_campaign(dir.path);
  CHECK(r.seed.count == 0);
  CHECK(r.failing_npe == 0);
}

// ---------------------------------------------------------------------------
// overhead

TEST_CASE("overhead: text rendering follows the original -> transformed = percent layout") {
  OverheadReport rep;
  rep.rows.push_back(OverheadRow{"spojo", 336, 381, 100.0 * (381 - 336) / 336.0, 10});
  std::string text = rep.to_text();
  CHECK(text.find("spojo") != std::string::npos);
  CHECK(text.find("336") != std::string::npos);
  CHECK(text.find("381") != std::string::npos);
  CHECK(text.find("13%") != std::string::npos);
  auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["cases"][0]["reps"] == 10);
  CHECK(j["cases"][0]["original_ms"] == 336.0);
}

TEST_CASE("overhead: every normal case is measured, crash cases are skipped") {
  Corpus mixed = normal_corpus();
  mixed.cases.resize(3);
  mixed.cases.push_back(crash_corpus().cases[0]);
  mixed.cases.back().files = {"../crash/" + mixed.cases.back().files[0]};
  auto rep = measure_overhead(mixed, 2);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& r : rep.rows) {
    CHECK(r.reps == 2);
    CHECK(r.original_ms > 0);
    CHECK(r.transformed_ms > 0);
  }
}

// ---------------------------------------------------------------------------
// exploration sessions

namespace {

CrashTask task_of(const std::string& name) {
  const auto& c = find_case(crash_corpus(), name);
  return CrashTask{c.name, load_case(crash_corpus(), c), c.entry};
}

}  // namespace

TEST_CASE("exploration: same seed, same log") {
  auto task = task_of("c05_garage");
  auto a = run_exploration_session(task, 42);
  auto b = run_exploration_session(task, 42);
  CHECK(a.log_jsonl() == b.log_jsonl());
  CHECK(a.invocations == b.invocations);
}

TEST_CASE("exploration: a repairable case deploys and suggests a patch") {
  auto s = run_exploration_session(task_of("c06_void_notify"), 3);
  CHECK(s.deployed);
  CHECK(s.invocations <= s.candidates);
  CHECK(s.last.normal());
  REQUIRE_FALSE(s.patches.empty());
  CHECK_NOTHROW(parse_statements(s.patches[0].path, s.patches[0].snippet));
  CHECK(nlohmann::json::parse(s.deployments).size() >= 1);
}

TEST_CASE("exploration: the unrepairable case exhausts and crashes like the original") {
  auto task = task_of("c12_no_viable");
  auto s = run_exploration_session(task, 11);
  CHECK_FALSE(s.deployed);
  CHECK(s.exhausted);
  auto plain = run(*task.original, RunOptions{task.entry});
  CHECK(s.last.status == plain.status);
  CHECK(s.last.exception_type == plain.exception_type);
  CHECK(s.last.exception_message == plain.exception_message);
  CHECK(s.last.stdout_text == plain.stdout_text);
}

TEST_CASE("exploration: a loaded deployment table skips exploration") {
  auto task = task_of("c01_reuse_parameter");
  auto first = run_exploration_session(task, 5);
  REQUIRE(first.deployed);
  auto second = run_exploration_session(task, 99, {}, 200, first.deployments);
  CHECK(second.deployed);
  CHECK(second.invocations == 1);
  for (const auto& rec : second.log) CHECK_FALSE(rec.rng_draw.has_value());
}
