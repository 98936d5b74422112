#include <gtest/gtest.h>
#include <sys/wait.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace defeasidl;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + std::string(DEFEASIDL_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Run cli_stderr(const std::string& args) {
  std::string cmd = std::string(DEFEASIDL_CLI) + " " + args + " 2>&1 >/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return data_path(name); }

bool has_line(const std::string& out, const std::string& line) {
  std::istringstream in(out);
  for (std::string l; std::getline(in, l);)
    if (l == line) return true;
  return false;
}

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("defeasidl-test-" + std::to_string(::getpid()) + "-" +
                                          std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  fs::path path_;
  static inline int counter_ = 0;
};

}  // namespace

TEST(Cli, ValidateExitCodes) {
  EXPECT_EQ(cli("validate " + data("tweety.dfl")).code, 0);
  auto cycle = cli("validate " + data("superiority_cycle.dfl"));
  EXPECT_EQ(cycle.code, 1);
  EXPECT_NE(cycle.out.find("cycle"), std::string::npos);
  auto missing = cli_stderr("validate /nonexistent/theory.dfl");
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.out.find("cannot read"), std::string::npos);
}

TEST(Cli, ParseErrorsAreDomainFailures) {
  TempDir dir;
  std::ofstream(dir.file("bad.dfl")) << "r: p => .\n";
  auto r = cli("validate " + dir.file("bad.dfl"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("1:9: expected predicate name"), std::string::npos) << r.out;
}

TEST(Cli, BadFlagsExitTwo) {
  EXPECT_EQ(cli("solve " + data("tweety.dfl") + " --backend nonsense").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("solve " + data("tweety.dfl") + " --backend oracle --three-valued").code, 2);
}

TEST(Cli, AnalyzeTweety) {
  auto r = cli("analyze " + data("tweety.dfl"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has_line(r.out, "hierarchical: yes"));
  EXPECT_TRUE(has_line(r.out, "team stratified: yes"));
  EXPECT_TRUE(has_line(r.out, "theory size: 36"));
}

TEST(Cli, AnalyzeTeamCycle) {
  auto r = cli("analyze " + data("team_cycle.dfl"));
  EXPECT_TRUE(has_line(r.out, "team stratified: no"));
  EXPECT_TRUE(has_line(r.out, "individual stratified: yes"));
  EXPECT_TRUE(has_line(r.out, "team call-consistent: yes"));
  EXPECT_TRUE(has_line(r.out, "team signing: yes"));
}

TEST(Cli, AnalyzeEmptyTheory) {
  TempDir dir;
  std::ofstream(dir.file("empty.dfl")) << "% nothing\n";
  auto r = cli("analyze " + dir.file("empty.dfl"));
  EXPECT_EQ(r.code, 0);
  for (const char* l : {"hierarchical: yes", "locally hierarchical: yes", "range-restricted: yes",
                        "team stratified: yes", "individual stratified: yes", "team call-consistent: yes",
                        "team signing: yes", "theory size: 0", "team size: 0", "individual size: 0"})
    EXPECT_TRUE(has_line(r.out, l)) << l << "\n" << r.out;
}

TEST(Cli, CompileWritesEmittedText) {
  TempDir dir;
  std::string out = dir.file("tweety.dl");
  ASSERT_EQ(cli("compile " + data("tweety.dfl") + " --mode team -o " + out).code, 0);
  std::string text = slurp(out);
  auto c = compile_team(data_theory("tweety.dfl"));
  EXPECT_EQ(text, emit_datalog_text(c));
  EXPECT_TRUE(same_clauses(parse_datalog(text), c.program));
  EXPECT_EQ(cli("compile " + data("tweety.dfl")).out, text);
}

TEST(Cli, CompileIndividualWithoutSuperiority) {
  auto r = cli("compile " + data("reachability.dfl") + " --mode individual");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("defeats__"), std::string::npos);
}

TEST(Cli, CompileInvalidWritesNothing) {
  TempDir dir;
  std::string out = dir.file("cycle.dl");
  EXPECT_EQ(cli("compile " + data("superiority_cycle.dfl") + " -o " + out).code, 1);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, SolveTweety) {
  auto r = cli("solve " + data("tweety.dfl") + " --logic dpar --backend wf");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has_line(r.out, "+dpar neg fly(tweety)"));
  EXPECT_FALSE(has_line(r.out, "+dpar fly(freddie)"));
  EXPECT_TRUE(has_line(r.out, "+Delta bird(tweety)"));
  EXPECT_FALSE(has_line(r.out, "+lambda fly(freddie)"));
  auto lambda = cli("solve " + data("tweety.dfl") + " --show-lambda");
  EXPECT_TRUE(has_line(lambda.out, "+lambda fly(freddie)"));
  auto three = cli("solve " + data("tweety.dfl") + " --three-valued");
  EXPECT_TRUE(has_line(three.out, "-dpar fly(freddie)"));
}

TEST(Cli, SolvePlatypusIndividual) {
  for (const char* b : {"wf", "stratified", "hybrid", "oracle"}) {
    auto r = cli("solve " + data("platypus.dfl") + " --logic dpar_star --backend " + b);
    EXPECT_EQ(r.code, 0) << b;
    EXPECT_FALSE(has_line(r.out, "+dpar* mammal(platypus)")) << b;
    EXPECT_FALSE(has_line(r.out, "+dpar* neg mammal(platypus)")) << b;
  }
  EXPECT_TRUE(has_line(cli("solve " + data("platypus.dfl")).out, "+dpar mammal(platypus)"));
}

TEST(Cli, SolveOracleMatchesWellFounded) {
  for (const char* name : {"tweety.dfl", "platypus.dfl", "attack_chain.dfl", "reachability.dfl"})
    for (const char* logic : {"dpar", "dpar_star"}) {
      std::string base = "solve " + data(name) + " --show-lambda --logic " + logic;
      EXPECT_EQ(cli(base + " --backend oracle").out, cli(base + " --backend wf").out) << name;
    }
}

TEST(Cli, SolveStratifiedHint) {
  auto r = cli_stderr("solve " + data("team_cycle.dfl") + " --backend stratified");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("--backend wf"), std::string::npos);
}

TEST(Cli, EvalSemantics) {
  TempDir dir;
  std::ofstream(dir.file("neg.dl")) << "p :- not p.\n";
  std::ofstream(dir.file("pos.dl")) << "p :- p.\n";
  EXPECT_EQ(cli("eval " + dir.file("neg.dl") + " --semantics wf").out, "unknown p\n");
  EXPECT_EQ(cli("eval " + dir.file("pos.dl") + " --semantics wf").out, "false p\n");
  EXPECT_EQ(cli("eval " + dir.file("pos.dl") + " --semantics fitting").out, "unknown p\n");
  EXPECT_EQ(cli("eval " + dir.file("neg.dl") + " --semantics stratified").code, 1);
}

TEST(Cli, EvalCompiledTweety) {
  TempDir dir;
  std::string out = dir.file("tweety.dl");
  ASSERT_EQ(cli("compile " + data("tweety.dfl") + " -o " + out).code, 0);
  auto r = cli("eval " + out);
  EXPECT_TRUE(has_line(r.out, "true defeasibly__not__fly(tweety)"));
  EXPECT_TRUE(has_line(r.out, "false defeasibly__fly(freddie)"));
}

TEST(Cli, EvalRejectsUnsafe) {
  TempDir dir;
  std::ofstream(dir.file("unsafe.dl")) << "p(X) :- not q(X).\nq(a).\n";
  EXPECT_EQ(cli("eval " + dir.file("unsafe.dl")).code, 1);
}

TEST(Cli, CheckCorpus) {
  auto r = cli("check " + data("tweety.dfl") + " " + data("self_loop.dfl") + " " + data("team_cycle.dfl"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has_line(r.out, "agree " + data("tweety.dfl")));
  EXPECT_TRUE(has_line(r.out, "agree " + data("self_loop.dfl")));
  EXPECT_EQ(cli("check " + data("superiority_cycle.dfl")).code, 1);
  EXPECT_EQ(cli("check").code, 2);
}

TEST(Cli, CheckRandomIsDeterministicAcrossJobs) {
  auto one = cli("check --random 100 --random-variable 30 --seed 9 --jobs 1 --no-timings --format json-lines");
  auto four = cli("check --random 100 --random-variable 30 --seed 9 --jobs 4 --no-timings --format json-lines");
  EXPECT_EQ(one.code, 0);
  auto records = [](const std::string& out) { return out.substr(out.find('\n') + 1); };
  EXPECT_EQ(records(one.out), records(four.out));
  EXPECT_NE(records(one.out).find("\"disagreements\":0"), std::string::npos);
}

TEST(Cli, SeedFromEnvironment) {
  auto flag = cli("check --random 20 --seed 77");
  auto env = cli("check --random 20", "DEFEASIDL_SEED=77");
  EXPECT_EQ(flag.out, env.out);
  EXPECT_NE(flag.out.find("seed 77"), std::string::npos);
  auto both = cli("check --random 20 --seed 5", "DEFEASIDL_SEED=77");
  EXPECT_NE(both.out.find("seed 5"), std::string::npos);
  EXPECT_EQ(cli("check --random 5", "DEFEASIDL_SEED=abc").code, 2);
}

TEST(Cli, JsonLines) {
  auto r = cli("--format json-lines solve " + data("tweety.dfl"));
  EXPECT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::vector<nlohmann::json> records;
  for (std::string l; std::getline(in, l);) records.push_back(nlohmann::json::parse(l));
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0]["type"], "run");
  EXPECT_EQ(records[0]["inputs"][0]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(records[1]["type"], "conclusions");
  auto defeasible = records[1]["defeasible"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(defeasible.begin(), defeasible.end(), "neg fly(tweety)"), defeasible.end());
  EXPECT_EQ(records[2]["type"], "timings");
}

TEST(Cli, NoTimingsIsByteIdentical) {
  std::string args = "--format json-lines --no-timings analyze " + data("attack_chain.dfl");
  auto a = cli(args);
  auto b = cli(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.find("\"type\":\"timings\""), std::string::npos);
}
