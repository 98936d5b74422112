#include <gtest/gtest.h>

#include "support.hpp"

using namespace defeasidl;
using namespace testing_support;

namespace {

/// Stratification by relaxation: raise levels until every positive edge
/// goes level-down-or-equal and every negative edge strictly down, or give
/// up once a level exceeds the number of predicates.
bool stratified_by_relaxation(const Program& p) {
  auto g = dependency_graph(p);
  std::map<std::string, std::size_t> level;
  for (const auto& n : g.nodes) level[n] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& e : g.edges) {
      std::size_t need = level[e.to] + (e.sign < 0 ? 1 : 0);
      if (level[e.from] < need) {
        level[e.from] = need;
        if (need > g.nodes.size()) return false;
        changed = true;
      }
    }
  }
  return true;
}

/// Call-consistency by explicit search over (predicate, parity) states.
bool call_consistent_by_search(const Program& p) {
  auto g = dependency_graph(p);
  for (const auto& start : g.nodes) {
    std::set<std::pair<std::string, int>> seen{{start, 1}};
    std::vector<std::pair<std::string, int>> todo{{start, 1}};
    while (!todo.empty()) {
      auto [n, parity] = todo.back();
      todo.pop_back();
      for (const auto& e : g.edges) {
        if (e.from != n) continue;
        std::pair<std::string, int> next{e.to, parity * e.sign};
        if (next.first == start && next.second == -1) return false;
        if (seen.insert(next).second) todo.push_back(next);
      }
    }
  }
  return true;
}

}  // namespace

TEST(DependencyGraph, Edges) {
  auto g = dependency_graph(parse_datalog("p(X) :- q(X), not r(X). r(a). q(X) :- p(X)."));
  EXPECT_EQ(g.nodes, (std::set<std::string>{"p", "q", "r"}));
  EXPECT_TRUE(g.has_edge("p", "q", +1));
  EXPECT_TRUE(g.has_edge("p", "r", -1));
  EXPECT_TRUE(g.has_edge("q", "p", +1));
  EXPECT_EQ(g.edges.size(), 3u);
}

TEST(Stratification, HandExamples) {
  EXPECT_TRUE(is_stratified(parse_datalog("p :- not q. q :- r.")));
  EXPECT_FALSE(is_stratified(parse_datalog("p :- not p.")));
  EXPECT_FALSE(is_stratified(parse_datalog("p :- not q. q :- p.")));
  EXPECT_TRUE(is_stratified(parse_datalog("p :- p.")));
  auto levels = stratify(parse_datalog("p :- not q. q :- r. s :- p, not q."));
  ASSERT_TRUE(levels);
  EXPECT_LT(levels->at("q"), levels->at("p"));
  EXPECT_EQ(levels->at("q"), levels->at("r"));
}

TEST(Stratification, LevelsAreValid) {
  Rng rng(51);
  for (int i = 0; i < 500; ++i) {
    Program p = random_program(rng);
    auto levels = stratify(p);
    EXPECT_EQ(levels.has_value(), stratified_by_relaxation(p)) << print_datalog(p);
    if (!levels) continue;
    for (const auto& e : dependency_graph(p).edges) {
      if (e.sign > 0) EXPECT_GE(levels->at(e.from), levels->at(e.to));
      else EXPECT_GT(levels->at(e.from), levels->at(e.to));
    }
  }
}

TEST(CallConsistency, HandExamples) {
  EXPECT_FALSE(is_call_consistent(parse_datalog("p :- not p.")));
  EXPECT_TRUE(is_call_consistent(parse_datalog("p :- not q. q :- not p.")));
  EXPECT_FALSE(is_call_consistent(parse_datalog("p :- not q. q :- not r. r :- not p.")));
  EXPECT_FALSE(is_call_consistent(parse_datalog("p :- not q. q :- p.")));
}

TEST(CallConsistency, AgreesWithSearch) {
  Rng rng(52);
  for (int i = 0; i < 500; ++i) {
    Program p = random_program(rng);
    EXPECT_EQ(is_call_consistent(p), call_consistent_by_search(p)) << print_datalog(p);
    if (is_stratified(p)) { EXPECT_TRUE(is_call_consistent(p)); }
  }
}

TEST(Signing, EvenCycle) {
  auto g = dependency_graph(parse_datalog("p :- not q. q :- not p. r :- p."));
  auto s = compute_signing(g, g.nodes, {{"q", +1}});
  ASSERT_TRUE(s);
  EXPECT_EQ((*s)("q"), +1);
  EXPECT_EQ((*s)("p"), -1);
  EXPECT_EQ((*s)("r"), -1);
  EXPECT_TRUE(is_signing(g, *s));
  EXPECT_TRUE(is_signing(g, s->inverted()));
}

TEST(Signing, OddCycleHasNone) {
  auto g = dependency_graph(parse_datalog("p :- not q. q :- not r. r :- not p."));
  EXPECT_FALSE(compute_signing(g, g.nodes, {}).has_value());
}

TEST(Signing, FoundExactlyWhenCallConsistentOnWholeGraph) {
  Rng rng(53);
  for (int i = 0; i < 300; ++i) {
    Program p = random_program(rng);
    auto g = dependency_graph(p);
    auto s = compute_signing(g, g.nodes, {});
    if (s) { EXPECT_TRUE(is_signing(g, *s)) << print_datalog(p); }
    if (s) { EXPECT_TRUE(is_call_consistent(g)); }
  }
}

TEST(Safety, Clauses) {
  auto p = parse_datalog("p(X) :- q(X). r(X) :- q(Y). s(X) :- q(X), not t(X, Y). u(a) :- not v(a).");
  EXPECT_TRUE(is_safe(p.clauses()[0]));
  EXPECT_FALSE(is_range_restricted(p.clauses()[1]));
  EXPECT_TRUE(is_range_restricted(p.clauses()[2]));
  EXPECT_FALSE(is_negation_safe(p.clauses()[2]));
  EXPECT_TRUE(is_safe(p.clauses()[3]));
  EXPECT_FALSE(is_safe(p));
}

TEST(Structure, TeamCycleIsNotStratifiedButCallConsistent) {
  Theory t = data_theory("team_cycle.dfl");
  auto team = compile_team(t);
  auto indiv = compile_individual(t);
  EXPECT_FALSE(is_stratified(team.program));
  EXPECT_TRUE(is_call_consistent(team.program));
  EXPECT_TRUE(is_stratified(indiv.program));
}

TEST(Structure, CorpusSatisfiesStructuralProperties) {
  for (const char* name : {"tweety.dfl", "platypus.dfl", "team_cycle.dfl", "attack_chain.dfl", "self_loop.dfl",
                           "reachability.dfl", "not_range_restricted.dfl"}) {
    auto v = structural(data_theory(name));
    EXPECT_TRUE(v.empty()) << name << ": " << (v.empty() ? "" : v.front());
  }
}

TEST(Structure, SafetyFollowsRangeRestriction) {
  EXPECT_TRUE(is_safe(compile_team(data_theory("tweety.dfl")).program));
  EXPECT_FALSE(is_safe(compile_team(data_theory("not_range_restricted.dfl")).program));
  EXPECT_FALSE(is_safe(compile_individual(data_theory("not_range_restricted.dfl")).program));
}

TEST(Structure, RandomTheories) {
  Rng rng(54);
  for (int i = 0; i < 300; ++i) {
    TheoryShape shape;
    shape.range_restricted = i % 3 != 0;
    Theory t = i % 2 ? random_ground_theory(rng, shape) : random_variable_theory(rng, shape);
    auto v = structural(t);
    EXPECT_TRUE(v.empty()) << format_theory(t) << v.front();
  }
}
