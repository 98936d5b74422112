#pragma once

#include <map>
#include <set>
#include <vector>

#include "theory.hpp"

namespace defeasidl {

using LiteralSet = std::set<Literal>;

/// Positive conclusions of a theory under each tag.
struct ConclusionSet {
  LiteralSet delta;      // +Delta, definite
  LiteralSet lambda;     // +lambda, potentially defeasible
  LiteralSet dpar;       // +d||, team defeat
  LiteralSet dpar_star;  // +d||*, individual defeat

  bool operator==(const ConclusionSet&) const = default;
};

namespace detail {

/// Rules of a ground theory indexed by head, plus the superiority relation.
class RuleIndex {
public:
  explicit RuleIndex(const Theory& g) : theory_(g) {
    for (const auto& r : g.rules) by_head_[r.head].push_back(&r);
  }

  const std::vector<const Rule*>& for_head(const Literal& q) const {
    static const std::vector<const Rule*> none;
    auto it = by_head_.find(q);
    return it == by_head_.end() ? none : it->second;
  }

  bool superior(const Rule& t, const Rule& s) const { return theory_.superior(t.label, s.label); }

  const Theory& theory() const { return theory_; }

private:
  const Theory& theory_;
  std::map<Literal, std::vector<const Rule*>> by_head_;
};

inline bool body_within(const Rule& r, const LiteralSet& s) {
  for (const auto& a : r.body)
    if (!s.count(a)) return false;
  return true;
}

enum class Defeat { Team, Individual };

inline LiteralSet defeasible_closure(const Theory& g, const LiteralSet& delta,
                                     const LiteralSet& lambda, Defeat mode) {
  RuleIndex index(g);
  LiteralSet s = delta;

  // Every attacker s of q must be inapplicable under lambda, or beaten by a
  // supporting rule t whose body is already proved (team) or by r itself
  // (individual).
  auto survives = [&](const Rule& r, const Literal& q) {
    for (const Rule* att : index.for_head(complement(q))) {
      bool inapplicable = false;
      for (const auto& a : att->body)
        if (!lambda.count(a)) {
          inapplicable = true;
          break;
        }
      if (inapplicable) continue;
      if (mode == Defeat::Individual) {
        if (!index.superior(r, *att)) return false;
        continue;
      }
      bool beaten = false;
      for (const Rule* t : index.for_head(q))
        if (t->strict_or_defeasible() && body_within(*t, s) && index.superior(*t, *att)) {
          beaten = true;
          break;
        }
      if (!beaten) return false;
    }
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.rules) {
      if (!r.strict_or_defeasible() || s.count(r.head)) continue;
      if (!body_within(r, s) || delta.count(complement(r.head))) continue;
      if (survives(r, r.head)) {
        s.insert(r.head);
        changed = true;
      }
    }
  }
  return s;
}

}  // namespace detail

/// Least set containing the facts and closed under strict rules.
inline LiteralSet delta_closure(const GroundTheory& g) {
  LiteralSet s = g.theory.facts;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.theory.rules)
      if (r.strict() && !s.count(r.head) && detail::body_within(r, s)) {
        s.insert(r.head);
        changed = true;
      }
  }
  return s;
}

/// Least set containing delta and closed under strict or defeasible rules
/// whose head's complement is not definite.
inline LiteralSet lambda_closure(const GroundTheory& g, const LiteralSet& delta) {
  LiteralSet s = delta;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.theory.rules)
      if (r.strict_or_defeasible() && !s.count(r.head) && detail::body_within(r, s) &&
          !delta.count(complement(r.head))) {
        s.insert(r.head);
        changed = true;
      }
  }
  return s;
}

/// Defeasible closure with team defeat.
inline LiteralSet dpar_closure(const GroundTheory& g, const LiteralSet& delta,
                               const LiteralSet& lambda) {
  return detail::defeasible_closure(g.theory, delta, lambda, detail::Defeat::Team);
}

/// Defeasible closure with individual defeat: the applied rule must itself
/// be superior to every applicable attacker.
inline LiteralSet dpar_star_closure(const GroundTheory& g, const LiteralSet& delta,
                                    const LiteralSet& lambda) {
  return detail::defeasible_closure(g.theory, delta, lambda, detail::Defeat::Individual);
}

inline ConclusionSet conclusions(const GroundTheory& g) {
  ConclusionSet c;
  c.delta = delta_closure(g);
  c.lambda = lambda_closure(g, c.delta);
  c.dpar = dpar_closure(g, c.delta, c.lambda);
  c.dpar_star = dpar_star_closure(g, c.delta, c.lambda);
  return c;
}

inline ConclusionSet conclusions(const Theory& theory) { return conclusions(ground_theory(theory)); }

}  // namespace defeasidl
