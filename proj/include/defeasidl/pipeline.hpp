#pragma once

#include <string>
#include <string_view>

#include "compiler.hpp"
#include "eval.hpp"
#include "oracle.hpp"
#include "theory.hpp"

namespace defeasidl {

enum class Backend { WellFounded, Stratified, Hybrid, Oracle };

inline std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::WellFounded: return "wf";
    case Backend::Stratified: return "stratified";
    case Backend::Hybrid: return "hybrid";
    case Backend::Oracle: return "oracle";
  }
  return "?";
}

/// Conclusions for one defeat mode. The false/unknown sets are only
/// filled by backends that evaluate a compiled program.
struct Solution {
  LiteralSet delta;
  LiteralSet lambda;
  LiteralSet defeasible;
  LiteralSet defeasible_false;
  LiteralSet defeasible_unknown;
  bool three_valued = false;
};

/// Literals of the atoms of one tag, per truth value.
struct DecodedModel {
  LiteralSet definitely, lambda, defeasibly;
  LiteralSet defeasibly_false, defeasibly_unknown;
};

inline DecodedModel decode(const CompilationOutput& compiled, const Interpretation& model) {
  DecodedModel out;
  auto literal_of = [&](const Atom& a, Tag want) -> std::optional<Literal> {
    const MangledPredicate* m = compiled.meaning(a.predicate);
    if (!m || m->is_body() || m->tag != want) return std::nullopt;
    return Literal{{m->predicate, a.args}, m->polarity};
  };
  for (const auto& a : model.true_set) {
    if (auto l = literal_of(a, Tag::Definitely)) out.definitely.insert(*l);
    if (auto l = literal_of(a, Tag::Lambda)) out.lambda.insert(*l);
    if (auto l = literal_of(a, Tag::Defeasibly)) out.defeasibly.insert(*l);
  }
  for (const auto& a : model.false_set)
    if (auto l = literal_of(a, Tag::Defeasibly)) out.defeasibly_false.insert(*l);
  for (const auto& a : model.unknown_set)
    if (auto l = literal_of(a, Tag::Defeasibly)) out.defeasibly_unknown.insert(*l);
  return out;
}

/// The theory the compiled pipeline works on: the theory itself when it is
/// range-restricted (its compilation is then safe), otherwise its grounding.
inline Theory compilable(const Theory& theory) {
  if (is_range_restricted(theory)) return theory;
  return ground_theory(theory).theory;
}

inline Interpretation evaluate(const CompilationOutput& compiled, Backend backend) {
  switch (backend) {
    case Backend::WellFounded: return eval_wellfounded(compiled.program);
    case Backend::Stratified: return eval_stratified(compiled.program);
    case Backend::Hybrid: return eval_hybrid(compiled);
    case Backend::Oracle: break;
  }
  throw Error("the oracle backend does not evaluate programs");
}

/// Throws ValidationFailed, EmptyUniverse, NotStratified (stratified backend).
inline Solution solve(const Theory& theory, DefeatMode mode, Backend backend) {
  auto report = validate_theory(theory);
  if (!report.ok()) throw ValidationFailed(std::move(report));
  if (!is_ground(theory) && herbrand_universe(theory).empty()) throw EmptyUniverse();

  Solution s;
  if (backend == Backend::Oracle) {
    auto c = conclusions(theory);
    s.delta = std::move(c.delta);
    s.lambda = std::move(c.lambda);
    s.defeasible = mode == DefeatMode::Team ? std::move(c.dpar) : std::move(c.dpar_star);
    return s;
  }
  auto compiled = compile(compilable(theory), mode);
  auto d = decode(compiled, evaluate(compiled, backend));
  s.delta = std::move(d.definitely);
  s.lambda = std::move(d.lambda);
  s.defeasible = std::move(d.defeasibly);
  s.defeasible_false = std::move(d.defeasibly_false);
  s.defeasible_unknown = std::move(d.defeasibly_unknown);
  s.three_valued = true;
  return s;
}

}  // namespace defeasidl
