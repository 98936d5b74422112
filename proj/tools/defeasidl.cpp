#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "defeasidl/defeasidl.hpp"

using namespace defeasidl;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kDomain = 1, kEnvironment = 2 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BadFlags : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return s.str();
}

std::string sha256(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

class Report {
public:
  bool json_lines = false;
  bool timings = true;

  void start(const std::vector<std::string>& argv) {
    started_ = std::chrono::steady_clock::now();
    command_ = argv;
  }

  void input(const std::string& path, const std::string& contents) {
    inputs_.push_back({{"path", path}, {"sha256", sha256(contents)}});
  }

  void line(const std::string& text) {
    if (!json_lines) std::cout << text << '\n';
  }

  void error(const std::string& text) { std::cerr << "defeasidl: " << text << '\n'; }

  void record(json j) {
    if (!json_lines) return;
    flush_header();
    std::cout << j.dump() << '\n';
  }

  void phase(const std::string& name, double seconds) { phases_.push_back({name, seconds}); }

  void finish() {
    double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    if (json_lines) {
      flush_header();
      if (timings) {
        json t = {{"type", "timings"}};
        for (const auto& [n, s] : phases_) t[n + "_seconds"] = s;
        t["total_seconds"] = total;
        std::cout << t.dump() << '\n';
      }
    }
  }

private:
  void flush_header() {
    if (header_done_) return;
    header_done_ = true;
    std::cout << json{{"type", "run"}, {"command", command_}, {"inputs", inputs_}}.dump() << '\n';
  }

  std::chrono::steady_clock::time_point started_;
  std::vector<std::string> command_;
  json inputs_ = json::array();
  std::vector<std::pair<std::string, double>> phases_;
  bool header_done_ = false;
};

class Stopwatch {
public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

json diagnostics(const std::vector<Diagnostic>& ds) {
  json out = json::array();
  for (const auto& d : ds) out.push_back({{"code", d.code}, {"location", d.location}, {"message", d.message}});
  return out;
}

/// Parses a theory file; reports parse errors and returns nothing on failure.
std::optional<Theory> load_theory(Report& report, const std::string& path) {
  std::string text = read_file(path);
  report.input(path, text);
  auto parsed = parse_theory(text);
  if (parsed.ok()) return parsed.theory();
  json errs = json::array();
  for (const auto& e : parsed.errors()) {
    report.line(path + ":" + e.message());
    errs.push_back({{"line", e.location.line}, {"column", e.location.column}, {"expected", e.expected},
                    {"found", e.found}});
  }
  report.record({{"type", "parse-errors"}, {"path", path}, {"errors", errs}});
  return std::nullopt;
}

/// Validates and prints the report; true iff the theory has no errors.
bool report_validation(Report& report, const Theory& theory, bool quiet_when_ok) {
  auto v = validate_theory(theory);
  for (const auto& e : v.errors) report.line("error [" + e.code + "] " + e.location + ": " + e.message);
  for (const auto& w : v.warnings)
    report.line("warning [" + w.code + "] " + w.location + ": " + w.message);
  if (!quiet_when_ok || !v.ok())
    report.record({{"type", "validation"},
                   {"ok", v.ok()},
                   {"errors", diagnostics(v.errors)},
                   {"warnings", diagnostics(v.warnings)}});
  return v.ok();
}

int cmd_validate(Report& report, const std::string& path) {
  auto theory = load_theory(report, path);
  if (!theory) return kDomain;
  bool ok = report_validation(report, *theory, false);
  report.line(ok ? "valid" : "invalid");
  return ok ? kOk : kDomain;
}

int cmd_analyze(Report& report, const std::string& path) {
  auto theory = load_theory(report, path);
  if (!theory) return kDomain;
  if (!report_validation(report, *theory, true)) return kDomain;

  Stopwatch sw;
  json out = {{"type", "analysis"}};
  auto emit = [&](const std::string& key, const json& value, const std::string& text) {
    out[key] = value;
    report.line(key + ": " + text);
  };

  auto levels = is_hierarchical(*theory);
  emit("hierarchical", levels.has_value(), yes_no(levels.has_value()));
  if (levels) {
    std::string text;
    json j = json::object();
    for (const auto& [p, l] : *levels) {
      text += (text.empty() ? "" : " ") + p + "=" + std::to_string(l);
      j[p] = l;
    }
    emit("levels", j, text);
  }
  try {
    bool lh = is_locally_hierarchical(*theory);
    emit("locally hierarchical", lh, yes_no(lh));
  } catch (const EmptyUniverse&) {
    emit("locally hierarchical", nullptr, "n/a (empty Herbrand universe)");
  }
  bool rr = is_range_restricted(*theory);
  emit("range-restricted", rr, yes_no(rr));

  std::size_t size = theory_size(*theory);
  emit("theory size", size, std::to_string(size));
  for (auto mode : {DefeatMode::Team, DefeatMode::Individual}) {
    std::string m = mode == DefeatMode::Team ? "team" : "individual";
    auto c = compile(*theory, mode);
    auto graph = dependency_graph(c.program);
    bool strat = stratify(graph).has_value();
    bool cc = is_call_consistent(graph);
    bool safe = is_safe(c.program);
    bool floor_strat = is_stratified(c.program.restricted_to(c.floor));
    std::set<std::string> above;
    std::map<std::string, int> prefer;
    for (const auto& p : graph.nodes)
      if (!c.in_floor(p)) {
        above.insert(p);
        if (c.meaning(p)->tag == Tag::Defeasibly && !c.meaning(p)->is_body()) prefer[p] = +1;
      }
    bool signing = compute_signing(graph, above, prefer).has_value();
    std::size_t csize = compiled_size(c);
    emit(m + " stratified", strat, yes_no(strat));
    emit(m + " call-consistent", cc, yes_no(cc));
    emit(m + " safe", safe, yes_no(safe));
    emit(m + " floor stratified", floor_strat, yes_no(floor_strat));
    emit(m + " signing", signing, yes_no(signing));
    emit(m + " clauses", c.program.size(), std::to_string(c.program.size()));
    emit(m + " size", csize, std::to_string(csize));
    if (size > 0) {
      double ratio = static_cast<double>(csize) / static_cast<double>(size);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", ratio);
      emit(m + " size ratio", ratio, buf);
    } else {
      emit(m + " size ratio", nullptr, "-");
    }
  }
  report.phase("analyze", sw.lap());
  report.record(out);
  return kOk;
}

int cmd_compile(Report& report, const std::string& path, const std::string& mode,
                const std::string& out_path) {
  auto theory = load_theory(report, path);
  if (!theory) return kDomain;
  if (!report_validation(report, *theory, true)) return kDomain;
  Stopwatch sw;
  auto compiled = compile(*theory, mode == "team" ? DefeatMode::Team : DefeatMode::Individual);
  std::string text = emit_datalog_text(compiled);
  report.phase("compile", sw.lap());
  if (out_path.empty()) {
    if (report.json_lines)
      report.record({{"type", "program"}, {"mode", mode}, {"clauses", compiled.program.size()},
                     {"text", text}});
    else
      std::cout << text;
    return kOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + out_path);
  report.record({{"type", "program"}, {"mode", mode}, {"clauses", compiled.program.size()},
                 {"output", out_path}, {"sha256", sha256(text)}});
  return kOk;
}

std::vector<std::string> literal_strings(const LiteralSet& s) {
  std::vector<std::string> out;
  for (const auto& l : s) out.push_back(to_string(l));
  return out;
}

int cmd_solve(Report& report, const std::string& path, const std::string& logic,
              const std::string& backend_flag, bool three_valued, bool show_lambda) {
  Backend backend = backend_flag == "wf"           ? Backend::WellFounded
                    : backend_flag == "stratified" ? Backend::Stratified
                    : backend_flag == "hybrid"     ? Backend::Hybrid
                                                   : Backend::Oracle;
  if (three_valued && backend == Backend::Oracle)
    throw BadFlags("--three-valued needs a backend that evaluates the compiled program");
  auto theory = load_theory(report, path);
  if (!theory) return kDomain;
  if (!report_validation(report, *theory, true)) return kDomain;

  DefeatMode mode = logic == "dpar" ? DefeatMode::Team : DefeatMode::Individual;
  std::string tag = logic == "dpar" ? "dpar" : "dpar*";
  Stopwatch sw;
  Solution s;
  try {
    s = solve(*theory, mode, backend);
  } catch (const NotStratified& e) {
    report.error(std::string(e.what()) + "; use --backend wf or --backend hybrid");
    return kDomain;
  }
  report.phase("solve", sw.lap());

  for (const auto& l : s.delta) report.line("+Delta " + to_string(l));
  if (show_lambda)
    for (const auto& l : s.lambda) report.line("+lambda " + to_string(l));
  for (const auto& l : s.defeasible) report.line("+" + tag + " " + to_string(l));
  if (three_valued) {
    for (const auto& l : s.defeasible_false) report.line("-" + tag + " " + to_string(l));
    for (const auto& l : s.defeasible_unknown) report.line("?" + tag + " " + to_string(l));
  }

  json j = {{"type", "conclusions"}, {"logic", logic}, {"backend", backend_flag},
            {"delta", literal_strings(s.delta)}};
  if (show_lambda) j["lambda"] = literal_strings(s.lambda);
  j["defeasible"] = literal_strings(s.defeasible);
  if (three_valued) {
    j["defeasible_false"] = literal_strings(s.defeasible_false);
    j["defeasible_unknown"] = literal_strings(s.defeasible_unknown);
  }
  report.record(j);
  return kOk;
}

int cmd_eval(Report& report, const std::string& path, const std::string& semantics) {
  std::string text = read_file(path);
  report.input(path, text);
  Program program;
  try {
    program = parse_datalog(text);
  } catch (const DatalogSyntaxError& e) {
    report.line(path + ":" + e.error().message());
    report.record({{"type", "parse-errors"},
                   {"path", path},
                   {"errors", json::array({{{"line", e.error().location.line},
                                            {"column", e.error().location.column},
                                            {"expected", e.error().expected},
                                            {"found", e.error().found}}})}});
    if (!report.json_lines) report.error("syntax error in " + path);
    return kDomain;
  }

  Stopwatch sw;
  Interpretation model;
  if (semantics == "wf")
    model = eval_wellfounded(program);
  else if (semantics == "fitting")
    model = eval_fitting(program);
  else
    model = eval_stratified(program);
  report.phase("eval", sw.lap());

  // ground atoms written in the program are listed even when no clause
  // instance mentions them after grounding
  auto note = [&](const Atom& a) {
    if (a.is_ground() && model.truth(a) == Truth::False) model.false_set.insert(a);
  };
  for (const auto& c : program.clauses()) {
    note(c.head);
    for (const auto& a : c.positive) note(a);
    for (const auto& a : c.negative) note(a);
  }

  std::vector<std::pair<Atom, Truth>> rows;
  for (const auto& a : model.true_set) rows.push_back({a, Truth::True});
  for (const auto& a : model.false_set) rows.push_back({a, Truth::False});
  for (const auto& a : model.unknown_set) rows.push_back({a, Truth::Unknown});
  std::sort(rows.begin(), rows.end());
  json atoms = json::array();
  for (const auto& [a, t] : rows) {
    report.line(std::string(to_string(t)) + " " + to_string(a));
    atoms.push_back({{"atom", to_string(a)}, {"value", to_string(t)}});
  }
  report.record({{"type", "model"}, {"semantics", semantics}, {"atoms", atoms}});
  return kOk;
}

struct CheckJob {
  std::string name;
  std::optional<Theory> theory;
  std::string problem;
  TheoryCheck result;
};

void run_jobs(std::vector<CheckJob>& jobs, unsigned threads) {
  auto work = [&](std::size_t i) {
    auto& j = jobs[i];
    if (!j.theory) return;
    try {
      j.result = check_theory(*j.theory);
    } catch (const std::exception& e) {
      j.result.failures.push_back(std::string("exception: ") + e.what());
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) work(i);
    });
  for (auto& t : pool) t.join();
}

std::uint64_t job_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 step, so neighbouring indices get unrelated streams
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct CheckFlags {
  std::vector<std::string> paths;
  std::size_t random_ground = 0;
  std::size_t random_variable = 0;
  std::uint64_t seed = 1;
  bool seed_given = false;
  unsigned jobs = 1;
  TheoryShape shape;
};

int cmd_check(Report& report, CheckFlags flags) {
  if (!flags.seed_given)
    if (const char* env = std::getenv("DEFEASIDL_SEED")) {
      try {
        flags.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw BadFlags(std::string("DEFEASIDL_SEED is not a number: ") + env);
      }
    }
  if (flags.paths.empty() && flags.random_ground == 0 && flags.random_variable == 0)
    throw BadFlags("check needs theory files, --random or --random-variable");

  std::vector<CheckJob> jobs;
  for (const auto& p : flags.paths) {
    CheckJob j;
    j.name = p;
    j.theory = load_theory(report, p);
    if (!j.theory) {
      j.problem = "parse errors";
    } else if (auto v = validate_theory(*j.theory); !v.ok()) {
      j.problem = "invalid theory: " + v.errors.front().message;
      j.theory.reset();
    }
    jobs.push_back(std::move(j));
  }
  for (std::size_t i = 0; i < flags.random_ground; ++i) {
    Rng rng(job_seed(flags.seed, i));
    jobs.push_back({"random ground #" + std::to_string(i), random_ground_theory(rng, flags.shape), {}, {}});
  }
  for (std::size_t i = 0; i < flags.random_variable; ++i) {
    Rng rng(job_seed(flags.seed ^ 0x5bd1e995ULL, i));
    jobs.push_back(
        {"random variable #" + std::to_string(i), random_variable_theory(rng, flags.shape), {}, {}});
  }

  Stopwatch sw;
  run_jobs(jobs, flags.jobs);
  report.phase("check", sw.lap());

  std::size_t failed = 0;
  for (const auto& j : jobs) {
    bool ok = j.problem.empty() && j.result.ok();
    if (!ok) ++failed;
    json rec = {{"type", "check"}, {"name", j.name}, {"agree", ok}};
    if (!j.problem.empty()) rec["problem"] = j.problem;
    if (!j.result.failures.empty()) rec["failures"] = j.result.failures;
    if (j.result.minimized) rec["minimized"] = format_theory(*j.result.minimized);
    report.record(rec);

    bool is_file = j.name.rfind("random ", 0) != 0;
    if (ok) {
      if (is_file) report.line("agree " + j.name);
      continue;
    }
    report.line("DISAGREE " + j.name + (j.problem.empty() ? "" : ": " + j.problem));
    for (const auto& f : j.result.failures) report.line("  " + f);
    if (j.result.minimized) {
      report.line("  minimized theory:");
      std::istringstream lines(format_theory(*j.result.minimized));
      for (std::string l; std::getline(lines, l);) report.line("    " + l);
    }
  }
  report.line("checked " + std::to_string(jobs.size()) + " theories (seed " + std::to_string(flags.seed) +
               "): " + std::to_string(jobs.size() - failed) + " agree, " + std::to_string(failed) +
               " disagree");
  report.record({{"type", "summary"}, {"seed", flags.seed}, {"theories", jobs.size()},
                 {"disagreements", failed}});
  return failed == 0 ? kOk : kDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile defeasible theories to Datalog with negation and evaluate them"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "text";
  bool no_timings = false;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json-lines"}));
  app.add_flag("--no-timings", no_timings, "Leave timings out of the report");

  std::string path, mode = "team", out_path, logic = "dpar", backend = "wf", semantics = "wf";
  bool three_valued = false, show_lambda = false;
  CheckFlags check;

  auto* validate = app.add_subcommand("validate", "Check a theory for errors and warnings");
  validate->add_option("theory", path, "Theory file (.dfl)")->required();

  auto* analyze = app.add_subcommand("analyze", "Structural properties of a theory and its programs");
  analyze->add_option("theory", path, "Theory file (.dfl)")->required();

  auto* compile_cmd = app.add_subcommand("compile", "Write the Datalog program of a theory");
  compile_cmd->add_option("theory", path, "Theory file (.dfl)")->required();
  compile_cmd->add_option("--mode", mode, "Defeat mode")->check(CLI::IsMember({"team", "individual"}));
  compile_cmd->add_option("-o,--output", out_path, "Output file (.dl); standard output if absent");

  auto* solve_cmd = app.add_subcommand("solve", "Conclusions of a theory");
  solve_cmd->add_option("theory", path, "Theory file (.dfl)")->required();
  solve_cmd->add_option("--logic", logic, "dpar (team defeat) or dpar_star (individual defeat)")
      ->check(CLI::IsMember({"dpar", "dpar_star"}));
  solve_cmd->add_option("--backend", backend, "Evaluation backend")
      ->check(CLI::IsMember({"wf", "stratified", "hybrid", "oracle"}));
  solve_cmd->add_flag("--three-valued", three_valued, "Also list false (-) and unknown (?) conclusions");
  solve_cmd->add_flag("--show-lambda", show_lambda, "Also list +lambda conclusions");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a Datalog program");
  eval_cmd->add_option("program", path, "Program file (.dl)")->required();
  eval_cmd->add_option("--semantics", semantics, "Semantics")
      ->check(CLI::IsMember({"wf", "fitting", "stratified"}));

  auto* check_cmd = app.add_subcommand("check", "Compare the compiled pipeline against the oracle");
  check_cmd->add_option("theories", check.paths, "Theory files (.dfl)");
  check_cmd->add_option("--random", check.random_ground, "Number of random propositional theories");
  check_cmd->add_option("--random-variable", check.random_variable,
                        "Number of random theories with variables");
  check_cmd->add_option("--seed", check.seed, "Random seed (default: DEFEASIDL_SEED, else 1)")
      ->each([&](const std::string&) { check.seed_given = true; });
  check_cmd->add_option("--jobs", check.jobs, "Worker threads");
  check_cmd->add_option("--max-atoms", check.shape.max_atoms, "Atoms per random theory");
  check_cmd->add_option("--max-rules", check.shape.max_rules, "Rules per random theory");
  check_cmd->add_option("--max-superiority", check.shape.max_superiority,
                        "Superiority pairs per random theory");
  check_cmd->add_option("--max-constants", check.shape.max_constants,
                        "Constants per random theory with variables");
  check_cmd->add_option("--defeater-percent", check.shape.defeater_percent, "Share of defeaters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kEnvironment;
  }

  Report report;
  report.json_lines = format == "json-lines";
  report.timings = !no_timings;
  report.start(std::vector<std::string>(argv, argv + argc));

  int code = kOk;
  try {
    if (*validate) code = cmd_validate(report, path);
    else if (*analyze) code = cmd_analyze(report, path);
    else if (*compile_cmd) code = cmd_compile(report, path, mode, out_path);
    else if (*solve_cmd) code = cmd_solve(report, path, logic, backend, three_valued, show_lambda);
    else if (*eval_cmd) code = cmd_eval(report, path, semantics);
    else if (*check_cmd) code = cmd_check(report, check);
  } catch (const IoError& e) {
    report.error(e.what());
    return kEnvironment;
  } catch (const BadFlags& e) {
    report.error(e.what());
    return kEnvironment;
  } catch (const Error& e) {
    report.error(e.what());
    report.record({{"type", "error"}, {"message", e.what()}});
    code = kDomain;
  }
  report.finish();
  return code;
}
