#include <gtest/gtest.h>

#include "support.hpp"

using namespace defeasidl;
using namespace testing_support;

namespace {

/// Every instance of every clause over the program's constants.
struct NaiveGround {
  std::vector<Atom> base;
  std::vector<Clause> clauses;
};

NaiveGround naive_ground(const Program& p) {
  std::set<std::string> consts;
  auto note = [&](const Atom& a) {
    for (const auto& t : a.args)
      if (!t.is_variable()) consts.insert(t.name);
  };
  for (const auto& c : p.clauses()) {
    note(c.head);
    for (const auto& a : c.positive) note(a);
    for (const auto& a : c.negative) note(a);
  }
  std::vector<std::string> universe(consts.begin(), consts.end());

  NaiveGround out;
  std::set<Atom> base;
  for (const auto& [pred, arity] : p.arities()) {
    std::vector<std::size_t> idx(arity, 0);
    if (arity > 0 && universe.empty()) continue;
    for (;;) {
      Atom a{pred, {}};
      for (auto i : idx) a.args.push_back(Term::constant(universe[i]));
      base.insert(a);
      std::size_t k = arity;
      while (k > 0 && ++idx[k - 1] == universe.size()) idx[--k] = 0;
      if (k == 0) break;
    }
  }
  out.base.assign(base.begin(), base.end());

  for (const auto& c : p.clauses()) {
    std::set<std::string> vars;
    auto collect = [&](const Atom& a) {
      for (const auto& t : a.args)
        if (t.is_variable()) vars.insert(t.name);
    };
    collect(c.head);
    for (const auto& a : c.positive) collect(a);
    for (const auto& a : c.negative) collect(a);
    std::vector<std::string> vs(vars.begin(), vars.end());
    if (!vs.empty() && universe.empty()) continue;
    std::vector<std::size_t> idx(vs.size(), 0);
    for (;;) {
      std::map<std::string, std::string> sub;
      for (std::size_t i = 0; i < vs.size(); ++i) sub[vs[i]] = universe[idx[i]];
      auto inst = [&](Atom a) {
        for (auto& t : a.args)
          if (t.is_variable()) t = Term::constant(sub.at(t.name));
        return a;
      };
      Clause g{inst(c.head), {}, {}};
      for (const auto& a : c.positive) g.positive.push_back(inst(a));
      for (const auto& a : c.negative) g.negative.push_back(inst(a));
      out.clauses.push_back(std::move(g));
      std::size_t k = vs.size();
      while (k > 0 && ++idx[k - 1] == universe.size()) idx[--k] = 0;
      if (k == 0) break;
    }
  }
  return out;
}

using Valuation = std::map<Atom, Truth>;

Truth body_truth(const Clause& c, const Valuation& v) {
  Truth out = Truth::True;
  for (const auto& a : c.positive) out = std::min(out, v.at(a));
  for (const auto& a : c.negative) {
    Truth t = v.at(a);
    out = std::min(out, t == Truth::True ? Truth::False : t == Truth::False ? Truth::True : Truth::Unknown);
  }
  return out;
}

/// Kripke-Kleene iteration of the three-valued immediate consequence operator.
Valuation fitting_by_iteration(const NaiveGround& g) {
  Valuation v;
  for (const auto& a : g.base) v[a] = Truth::Unknown;
  for (;;) {
    Valuation next;
    for (const auto& a : g.base) next[a] = Truth::False;
    for (const auto& c : g.clauses) next[c.head] = std::max(next[c.head], body_truth(c, v));
    if (next == v) return v;
    v = std::move(next);
  }
}

/// Iterates T_P together with the greatest unfounded set.
Valuation wellfounded_by_unfounded_sets(const NaiveGround& g) {
  Valuation v;
  for (const auto& a : g.base) v[a] = Truth::Unknown;
  for (;;) {
    Valuation next = v;
    for (const auto& c : g.clauses)
      if (body_truth(c, v) == Truth::True) next[c.head] = Truth::True;
    // greatest unfounded set: drop atoms that have a clause whose body is
    // not false and has no positive atom left in the set
    std::set<Atom> unfounded(g.base.begin(), g.base.end());
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& c : g.clauses) {
        if (!unfounded.count(c.head) || body_truth(c, v) == Truth::False) continue;
        bool grounded = std::none_of(c.positive.begin(), c.positive.end(),
                                     [&](const Atom& a) { return unfounded.count(a) > 0; });
        if (grounded) {
          unfounded.erase(c.head);
          changed = true;
        }
      }
    }
    for (const auto& a : unfounded) next[a] = Truth::False;
    if (next == v) return v;
    v = std::move(next);
  }
}

void expect_same(const NaiveGround& g, const Valuation& oracle, const Interpretation& got, const Program& p,
                 const char* what) {
  for (const auto& a : g.base)
    ASSERT_EQ(got.truth(a), oracle.at(a)) << what << " differs on " << to_string(a) << "\n" << print_datalog(p);
}

}  // namespace

TEST(Eval, SelfNegation) {
  auto m = eval_wellfounded(parse_datalog("p :- not p."));
  EXPECT_EQ(m.truth(atom("p")), Truth::Unknown);
  EXPECT_THROW(eval_stratified(parse_datalog("p :- not p.")), NotStratified);
}

TEST(Eval, PositiveLoop) {
  Program p = parse_datalog("p :- p.");
  EXPECT_EQ(eval_wellfounded(p).truth(atom("p")), Truth::False);
  EXPECT_EQ(eval_fitting(p).truth(atom("p")), Truth::Unknown);
  EXPECT_EQ(eval_stratified(p).truth(atom("p")), Truth::False);
}

TEST(Eval, EvenLoopIsUndefined) {
  auto m = eval_wellfounded(parse_datalog("p :- not q. q :- not p."));
  EXPECT_EQ(m.truth(atom("p")), Truth::Unknown);
  EXPECT_EQ(m.truth(atom("q")), Truth::Unknown);
}

TEST(Eval, WinMove) {
  Program p = parse_datalog(R"(
    move(a, b). move(b, a). move(b, c). move(c, d).
    win(X) :- move(X, Y), not win(Y).
  )");
  auto m = eval_wellfounded(p);
  EXPECT_EQ(m.truth(atom("win(c)")), Truth::True);
  EXPECT_EQ(m.truth(atom("win(d)")), Truth::False);
  // a and b can only move to each other or to a winning position
  EXPECT_EQ(m.truth(atom("win(b)")), Truth::Unknown);
  EXPECT_EQ(m.truth(atom("win(a)")), Truth::Unknown);
}

TEST(Eval, StratifiedReachability) {
  Program p = parse_datalog(R"(
    e(a, b). e(b, c). n(a). n(b). n(c). n(d).
    r(X, Y) :- e(X, Y).
    r(X, Y) :- r(X, Z), e(Z, Y).
    u(X) :- n(X), not r(a, X).
  )");
  auto m = eval_stratified(p);
  EXPECT_TRUE(m.is_total());
  EXPECT_EQ(m.with("u", Truth::True), (std::set<Atom>{atom("u(a)"), atom("u(d)")}));
  EXPECT_EQ(m, eval_wellfounded(p));
}

TEST(Eval, UnsafeProgramIsRejected) {
  EXPECT_THROW(eval_wellfounded(parse_datalog("p(X) :- not q(X). q(a).")), UnsafeProgram);
  EXPECT_THROW(eval_wellfounded(parse_datalog("p(X, Y) :- q(X). q(a).")), UnsafeProgram);
}

TEST(Eval, WellFoundedMatchesUnfoundedSets) {
  Rng rng(61);
  for (int i = 0; i < 400; ++i) {
    Program p = random_program(rng);
    auto g = naive_ground(p);
    expect_same(g, wellfounded_by_unfounded_sets(g), eval_wellfounded(p), p, "wf");
  }
}

TEST(Eval, FittingMatchesIteration) {
  Rng rng(62);
  for (int i = 0; i < 400; ++i) {
    Program p = random_program(rng);
    auto g = naive_ground(p);
    expect_same(g, fitting_by_iteration(g), eval_fitting(p), p, "fitting");
  }
}

TEST(Eval, StratifiedMatchesWellFounded) {
  Rng rng(63);
  int stratified = 0;
  for (int i = 0; i < 400; ++i) {
    Program p = random_program(rng);
    if (!is_stratified(p)) continue;
    ++stratified;
    auto s = eval_stratified(p);
    EXPECT_TRUE(s.is_total());
    EXPECT_EQ(s.true_set, eval_wellfounded(p).true_set) << print_datalog(p);
    auto g = naive_ground(p);
    expect_same(g, wellfounded_by_unfounded_sets(g), s, p, "stratified");
  }
  EXPECT_GT(stratified, 50);
}

TEST(Eval, FittingIsBelowWellFounded) {
  Rng rng(64);
  for (int i = 0; i < 400; ++i) {
    Program p = random_program(rng);
    EXPECT_TRUE(information_leq(eval_fitting(p), eval_wellfounded(p))) << print_datalog(p);
  }
}

TEST(Eval, ModelsAreModels) {
  Rng rng(65);
  for (int i = 0; i < 300; ++i) {
    Program p = random_program(rng);
    auto gp = ground_program(p);
    EXPECT_TRUE(is_model(gp, eval_wellfounded(gp))) << print_datalog(p);
    EXPECT_TRUE(is_model(gp, eval_fitting(gp))) << print_datalog(p);
  }
}

TEST(Eval, AlternatingTraceIsMonotone) {
  Rng rng(66);
  for (int i = 0; i < 200; ++i) {
    Program p = random_program(rng);
    std::vector<AlternatingStep> trace;
    EvalOptions opts;
    opts.trace = &trace;
    eval_wellfounded(p, opts);
    ASSERT_FALSE(trace.empty());
    for (std::size_t k = 1; k < trace.size(); ++k)
      for (std::size_t a = 0; a < trace[k].lower.size(); ++a) {
        EXPECT_LE(trace[k - 1].lower[a], trace[k].lower[a]);
        EXPECT_GE(trace[k - 1].upper[a], trace[k].upper[a]);
        EXPECT_LE(trace[k].lower[a], trace[k].upper[a]);
      }
  }
}

TEST(Eval, IterationCap) {
  EvalOptions opts;
  opts.max_iterations = 1;
  EXPECT_THROW(eval_wellfounded(parse_datalog("a :- not b. b :- not c. c :- not d. d."), opts), IterationLimit);
}

TEST(Eval, DerivableGroundingIsSmaller) {
  Program p = parse_datalog("e(a, b). e(b, c). r(X, Y) :- e(X, Y). r(X, Y) :- r(X, Z), e(Z, Y).");
  auto derivable = ground_program(p, GroundingMode::Derivable);
  auto exhaustive = ground_program(p, GroundingMode::Exhaustive);
  EXPECT_LE(derivable.size(), exhaustive.size());
  EXPECT_EQ(eval_wellfounded(derivable).true_set, eval_wellfounded(exhaustive).true_set);
  EXPECT_TRUE(eval_wellfounded(exhaustive).unknown_set.empty());
}

TEST(Hybrid, TweetyMatchesWellFounded) {
  auto c = compile_team(data_theory("tweety.dfl"));
  auto wf = eval_wellfounded(c.program);
  auto hy = eval_hybrid(c);
  EXPECT_EQ(hy.with("defeasibly__not__fly", Truth::True), wf.with("defeasibly__not__fly", Truth::True));
  EXPECT_EQ(wf.truth(atom("defeasibly__not__fly(tweety)")), Truth::True);
}

TEST(Hybrid, NonStratifiedTeamProgram) {
  auto c = compile_team(data_theory("team_cycle.dfl"));
  ASSERT_FALSE(is_stratified(c.program));
  EXPECT_THROW(eval_stratified(c.program), NotStratified);
  auto wf = eval_wellfounded(c.program);
  auto hy = eval_hybrid(c);
  EXPECT_EQ(hy.truth(atom("defeasibly__not__q")), Truth::True);
  EXPECT_EQ(wf.truth(atom("defeasibly__not__q")), Truth::True);
  EXPECT_NE(hy.truth(atom("defeasibly__q")), Truth::True);
  EXPECT_TRUE(information_leq(hy, wf));
}

TEST(Hybrid, RejectsHandWrittenPrograms) {
  CompilationOutput c;
  c.program = parse_datalog("p :- not q.");
  EXPECT_THROW(eval_hybrid(c), Error);
}

TEST(Hybrid, FloorIsTotalAndAgrees) {
  Rng rng(67);
  for (int i = 0; i < 200; ++i) {
    Theory t = random_ground_theory(rng);
    for (auto mode : {DefeatMode::Team, DefeatMode::Individual}) {
      auto c = compile(t, mode);
      auto wf = eval_wellfounded(c.program);
      auto hy = eval_hybrid(c);
      for (const auto& a : hy.unknown_set) EXPECT_FALSE(c.in_floor(a.predicate)) << to_string(a);
      for (const auto& a : wf.unknown_set) EXPECT_FALSE(c.in_floor(a.predicate)) << to_string(a);
      EXPECT_TRUE(information_leq(hy, wf)) << format_theory(t);
    }
  }
}
