#pragma once

#include <functional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "compiler.hpp"
#include "eval.hpp"
#include "oracle.hpp"
#include "pipeline.hpp"
#include "theory.hpp"

namespace defeasidl {

namespace detail {

inline std::string show(const LiteralSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& l : s) {
    if (!first) out += ", ";
    out += to_string(l);
    first = false;
  }
  return out + "}";
}

inline void compare(std::vector<std::string>& out, const std::string& what, const LiteralSet& expected,
                    const LiteralSet& got) {
  if (expected != got)
    out.push_back(what + ": expected " + show(expected) + ", got " + show(got));
}

inline bool has_prefix(const std::string& s, std::string_view prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace detail

/// Disagreements between the oracle and every evaluation of both compiled
/// programs: well-founded, hybrid, and stratified where the program is
/// stratified. Empty means full agreement.
inline std::vector<std::string> differential(const Theory& theory) {
  std::vector<std::string> out;
  ConclusionSet oracle = conclusions(theory);
  Theory source = compilable(theory);

  for (auto mode : {DefeatMode::Team, DefeatMode::Individual}) {
    std::string m = mode == DefeatMode::Team ? "team" : "individual";
    const LiteralSet& expected = mode == DefeatMode::Team ? oracle.dpar : oracle.dpar_star;
    auto compiled = compile(source, mode);

    auto wf = eval_wellfounded(compiled.program);
    auto d = decode(compiled, wf);
    detail::compare(out, m + " wf definitely", oracle.delta, d.definitely);
    detail::compare(out, m + " wf lambda", oracle.lambda, d.lambda);
    detail::compare(out, m + " wf defeasibly", expected, d.defeasibly);

    auto hybrid = decode(compiled, eval_hybrid(compiled));
    detail::compare(out, m + " hybrid definitely", oracle.delta, hybrid.definitely);
    detail::compare(out, m + " hybrid lambda", oracle.lambda, hybrid.lambda);
    detail::compare(out, m + " hybrid defeasibly", d.defeasibly, hybrid.defeasibly);

    if (is_stratified(compiled.program)) {
      auto st = decode(compiled, eval_stratified(compiled.program));
      detail::compare(out, m + " stratified definitely", oracle.delta, st.definitely);
      detail::compare(out, m + " stratified lambda", oracle.lambda, st.lambda);
      detail::compare(out, m + " stratified defeasibly", expected, st.defeasibly);
    }

    for (const auto& a : wf.unknown_set) {
      const auto* meaning = compiled.meaning(a.predicate);
      if (meaning && compiled.in_floor(a.predicate)) {
        out.push_back(m + " wf leaves floor atom " + to_string(a) + " undefined");
        break;
      }
    }
  }
  return out;
}

/// Violations of the structural properties of the compiled programs.
inline std::vector<std::string> structural(const Theory& theory) {
  std::vector<std::string> out;
  auto team = compile_team(theory);
  auto indiv = compile_individual(theory);

  if (!is_stratified(indiv.program)) out.push_back("individual program is not stratified");
  if (!is_call_consistent(team.program)) out.push_back("team program is not call-consistent");
  if (is_hierarchical(theory) && !is_stratified(team.program))
    out.push_back("team program of a hierarchical theory is not stratified");
  for (const auto* c : {&team, &indiv}) {
    std::string m = c == &team ? "team" : "individual";
    if (is_safe(c->program) != is_range_restricted(theory))
      out.push_back(m + " program safety differs from theory range-restriction");
    if (!is_stratified(c->program.restricted_to(c->floor)))
      out.push_back(m + " floor is not stratified");

    auto graph = dependency_graph(c->program);
    for (const auto& e : graph.edges)
      if (c->in_floor(e.from) && !c->in_floor(e.to)) {
        out.push_back(m + " floor is not downward-closed: " + e.from + " depends on " + e.to);
        break;
      }

    std::set<std::string> above;
    std::map<std::string, int> prefer;
    for (const auto& p : graph.nodes)
      if (!c->in_floor(p)) {
        above.insert(p);
        if (detail::has_prefix(p, "defeasibly")) prefer[p] = +1;
      }
    auto signing = compute_signing(graph, above, prefer);
    if (!signing) {
      out.push_back(m + " program has no signing above the floor");
      continue;
    }
    for (const auto& p : above) {
      const auto* meaning = c->meaning(p);
      if (!meaning || meaning->is_body()) continue;
      if (meaning->tag == Tag::Defeasibly && (*signing)(p) != +1)
        out.push_back(m + " signing does not map " + p + " to +1");
      if (meaning->tag == Tag::Overruled && (*signing)(p) != -1)
        out.push_back(m + " signing does not map " + p + " to -1");
    }
  }
  return out;
}

/// Violations of delta <= dpar* <= dpar <= lambda.
inline std::vector<std::string> subset_chain(const ConclusionSet& c) {
  std::vector<std::string> out;
  auto check = [&](const LiteralSet& small, const LiteralSet& big, const char* what) {
    for (const auto& l : small)
      if (!big.count(l)) {
        out.push_back(std::string(what) + ": " + to_string(l));
        return;
      }
  };
  check(c.delta, c.dpar_star, "delta not within dpar*");
  check(c.dpar_star, c.dpar, "dpar* not within dpar");
  check(c.dpar, c.lambda, "dpar not within lambda");
  return out;
}

/// Greedily drops facts, rules and superiority pairs while `fails` still
/// holds, returning a locally minimal failing theory.
inline Theory minimize(Theory theory, const std::function<bool(const Theory&)>& fails) {
  auto attempt = [&](const Theory& candidate) {
    if (!validate_theory(candidate).ok()) return false;
    try {
      return fails(candidate);
    } catch (const Error&) {
      return false;
    }
  };
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto it = theory.facts.begin(); it != theory.facts.end(); ++it) {
      Theory c = theory;
      c.facts.erase(*it);
      if (attempt(c)) {
        theory = std::move(c);
        progress = true;
        break;
      }
    }
    if (progress) continue;
    for (std::size_t i = 0; i < theory.rules.size(); ++i) {
      Theory c = theory;
      std::string label = c.rules[i].label;
      c.rules.erase(c.rules.begin() + static_cast<std::ptrdiff_t>(i));
      std::erase_if(c.superiority, [&](const Superiority& s) { return s.first == label || s.second == label; });
      if (attempt(c)) {
        theory = std::move(c);
        progress = true;
        break;
      }
    }
    if (progress) continue;
    for (const auto& s : theory.superiority) {
      Theory c = theory;
      c.superiority.erase(s);
      if (attempt(c)) {
        theory = std::move(c);
        progress = true;
        break;
      }
    }
    if (progress) continue;
    for (std::size_t i = 0; i < theory.rules.size() && !progress; ++i)
      for (std::size_t k = 0; k < theory.rules[i].body.size(); ++k) {
        Theory c = theory;
        c.rules[i].body.erase(c.rules[i].body.begin() + static_cast<std::ptrdiff_t>(k));
        if (attempt(c)) {
          theory = std::move(c);
          progress = true;
          break;
        }
      }
  }
  return theory;
}

struct TheoryCheck {
  std::vector<std::string> failures;
  /// Smallest theory found that still fails, when there are failures.
  std::optional<Theory> minimized;

  bool ok() const { return failures.empty(); }
};

/// Differential, structural and subset-chain checks of one validated theory.
inline TheoryCheck check_theory(const Theory& theory) {
  auto run = [](const Theory& t) {
    auto f = differential(t);
    for (auto& s : structural(t)) f.push_back(std::move(s));
    for (auto& s : subset_chain(conclusions(t))) f.push_back(std::move(s));
    return f;
  };
  TheoryCheck out;
  out.failures = run(theory);
  if (!out.failures.empty())
    out.minimized = minimize(theory, [&](const Theory& t) { return !run(t).empty(); });
  return out;
}

}  // namespace defeasidl
