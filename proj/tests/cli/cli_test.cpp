#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "npefix/frontend/checker.hpp"
#include "npefix/frontend/parser.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = NPEFIX_CORPUS_DIR;
const std::string kCli = NPEFIX_CLI;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "npefix_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

CliResult cli(const std::string& args) {
  fs::path out = scratch("stdout.txt"), err = scratch("stderr.txt");
  std::string cmd = kCli + " " + args + " >" + out.string() + " 2>" + err.string();
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string crash(const std::string& name) { return (kCorpus / "crash" / (name + ".mj")).string(); }

}  // namespace

TEST_CASE("cli: --help exits 0 and documents every flag") {
  CHECK(cli("--help").code == 0);
  const std::vector<std::pair<std::string, std::vector<std::string>>> expected = {
      {"transform", {"--output", "--no-catch-stack", "--no-deref-checks", "--no-value-pool", "--no-line-skip",
                     "--no-method-skip"}},
      {"seed", {"--report", "--format", "--jobs", "--depth", "--output"}},
      {"run", {"--entry", "--method", "--strategy", "--explore", "--seed", "--depth", "--deployments", "--trace",
               "--report", "--format", "--max-steps"}},
      {"matrix", {"--strategy", "--jobs", "--depth", "--report", "--format"}},
      {"bench", {"--reps", "--report", "--format", "--depth"}},
      {"explore", {"--entry", "--method", "--seed", "--depth", "--deployments", "--report", "--max-runs"}},
  };
  for (const auto& [sub, flags] : expected) {
    CAPTURE(sub);
    auto r = cli(sub + " --help");
    CHECK(r.code == 0);
    for (const auto& f : flags) CHECK_MESSAGE(r.out.find(f) != std::string::npos, f);
  }
}

TEST_CASE("cli: usage errors exit 2 before any work") {
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("run " + crash("c01_reuse_parameter") + " --bogus").code == 2);
  CHECK(cli("run " + crash("c01_reuse_parameter") + " --strategy S9").code == 2);
  auto r = cli("run " + crash("c01_reuse_parameter") + " --strategy S3 --explore");
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(cli("bench " + (kCorpus / "normal" / "manifest.json").string() + " --reps 0").code == 2);
}

TEST_CASE("cli: transform writes an instrumented program") {
  fs::path out = scratch("out.mj");
  fs::remove(out);
  auto r = cli("transform " + crash("c01_reuse_parameter") + " -o " + out.string());
  CHECK(r.code == 0);
  std::string text = slurp(out);
  CHECK(text.find("__npefix_checkForNull") != std::string::npos);
  CHECK(text.find("__npefix_catchAdd") == std::string::npos);  // no try blocks in the input
  CHECK_NOTHROW(npefix::load_program({npefix::SourceUnit{"out.mj", text}}, npefix::CheckOptions{true}));

  SUBCASE("flags switch passes off") {
    auto plain = cli("transform " + crash("c01_reuse_parameter") +
                     " --no-catch-stack --no-deref-checks --no-value-pool --no-line-skip --no-method-skip");
    CHECK(plain.code == 0);
    CHECK(plain.out.find("__npefix_") == std::string::npos);
  }
  SUBCASE("instrumenting twice is rejected") {
    CHECK(cli("transform " + out.string()).code == 3);
  }
}

TEST_CASE("cli: frontend errors exit 3") {
  fs::path bad = scratch("bad.mj");
  std::ofstream(bad) << "class A { void m() { \n";
  auto r = cli("run " + bad.string());
  CHECK(r.code == 3);
  CHECK(r.err.find("bad.mj") != std::string::npos);
}

TEST_CASE("cli: run exit codes follow the target") {
  auto plain = cli("run " + crash("c01_reuse_parameter"));
  CHECK(plain.code == 1);
  CHECK(plain.err.find("NullPointerException") != std::string::npos);

  auto repaired = cli("run " + crash("c01_reuse_parameter") + " --strategy S2a");
  CHECK(repaired.code == 0);
  CHECK(repaired.out == "render\ndraw \ndone\n");

  fs::path report = scratch("us.json");
  auto us = cli("run " + crash("c11_if_condition") + " --strategy S3 --trace --report " + report.string());
  CHECK(us.code == 1);
  auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["outcome"] == "US");
  CHECK(us.err.find("\"event\":\"try\"") != std::string::npos);

  CHECK(cli("run " + (kCorpus / "normal" / "n01_fibonacci.mj").string()).code == 0);
}

TEST_CASE("cli: run --explore with a deployment table") {
  fs::path table = scratch("deployments.json");
  fs::remove(table);
  auto first = cli("run " + crash("c06_void_notify") + " --explore --seed 4 --deployments " + table.string());
  CHECK(first.err.find("seed: 4") != std::string::npos);
  REQUIRE(first.code == 0);  // the pick under seed 4 repairs this case
  auto j = nlohmann::json::parse(slurp(table));
  CHECK(j.size() == 1);
  auto again = cli("run " + crash("c06_void_notify") + " --explore --seed 77 --trace --deployments " + table.string());
  CHECK(again.code == 0);
  std::istringstream lines(again.err);
  int records = 0;
  for (std::string line; std::getline(lines, line);) {
    if (!line.starts_with("{\"crash_point\"")) continue;
    ++records;
    CHECK(nlohmann::json::parse(line)["rng_draw"].is_null());
  }
  CHECK(records >= 2);
  auto dflt = cli("run " + crash("c06_void_notify") + " --explore");
  CHECK(dflt.err.find("seed: ") != std::string::npos);
}

TEST_CASE("cli: identical invocations give identical reports") {
  fs::path a = scratch("a.json"), b = scratch("b.json");
  std::string manifest = (kCorpus / "crash" / "manifest.json").string();
  CHECK(cli("matrix " + manifest + " --report " + a.string()).code == 0);
  CHECK(cli("matrix " + manifest + " --jobs 3 --report " + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));

  CHECK(cli("explore " + crash("c05_garage") + " --seed 9 --report " + a.string()).code == 0);
  CHECK(cli("explore " + crash("c05_garage") + " --seed 9 --report " + b.string()).code == 0);
  CHECK_FALSE(slurp(a).empty());
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("cli: matrix, bench and seed reports") {
  auto m = cli("matrix " + (kCorpus / "crash" / "manifest.json").string() + " --strategy S3 --strategy S4d");
  CHECK(m.code == 0);
  CHECK(m.out.find("Total") != std::string::npos);
  CHECK(m.out.find("S1a") == std::string::npos);

  fs::path bench = scratch("bench.json");
  auto b = cli("bench " + (kCorpus / "normal" / "manifest.json").string() + " --reps 1 --report " + bench.string());
  CHECK(b.code == 0);
  auto j = nlohmann::json::parse(slurp(bench));
  CHECK(j["cases"].size() == 22);
  CHECK(j["cases"][0]["reps"] == 1);

  auto s = cli("seed " + (kCorpus / "seeding" / "demo").string() + " --format json");
  CHECK(s.code == 0);
  CHECK(nlohmann::json::parse(s.out)["removed_checks"] == 15);

  auto missing = cli("matrix " + scratch("nope.json").string());
  CHECK(missing.code == 2);
  fs::path broken = scratch("broken.json");
  std::ofstream(broken) << "{\"cases\": 3}";
  CHECK(cli("matrix " + broken.string()).code == 3);
}

TEST_CASE("cli: explore reports exhaustion with exit 1") {
  auto r = cli("explore " + crash("c12_no_viable") + " --seed 1");
  CHECK(r.code == 1);
  CHECK(r.out.find("exhausted") != std::string::npos);
}
