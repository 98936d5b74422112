#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "datalog.hpp"
#include "theory.hpp"

namespace defeasidl {

/// Seeded source of small random choices. Uses only the raw engine output
/// so sequences are identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(unsigned percent) { return below(100) < percent; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

private:
  std::mt19937_64 engine_;
};

struct TheoryShape {
  std::size_t max_atoms = 8;
  std::size_t max_rules = 12;
  std::size_t max_superiority = 6;
  std::size_t max_facts = 4;
  std::size_t max_body = 3;
  unsigned strict_percent = 20;
  unsigned defeater_percent = 20;
  /// Share of superiority pairs drawn among rules with complementary heads.
  unsigned complementary_percent = 85;

  // only used for theories with variables
  std::size_t max_constants = 3;
  std::size_t max_arity = 2;
  bool range_restricted = true;
};

namespace detail {

inline RuleKind random_kind(Rng& rng, const TheoryShape& shape) {
  std::size_t roll = rng.below(100);
  if (roll < shape.strict_percent) return RuleKind::Strict;
  if (roll < shape.strict_percent + shape.defeater_percent) return RuleKind::Defeater;
  return RuleKind::Defeasible;
}

inline Polarity random_polarity(Rng& rng) {
  return rng.chance(35) ? Polarity::Negative : Polarity::Positive;
}

/// Superiority pairs consistent with a random total order of the rules,
/// hence acyclic.
inline void add_superiority(Rng& rng, const TheoryShape& shape, Theory& t) {
  if (t.rules.size() < 2) return;
  std::vector<std::size_t> rank(t.rules.size());
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  for (std::size_t i = rank.size(); i > 1; --i) std::swap(rank[i - 1], rank[rng.below(i)]);

  std::vector<std::pair<std::size_t, std::size_t>> complementary;
  for (std::size_t i = 0; i < t.rules.size(); ++i)
    for (std::size_t j = 0; j < t.rules.size(); ++j)
      if (t.rules[i].head.predicate() == t.rules[j].head.predicate() &&
          t.rules[i].head.polarity != t.rules[j].head.polarity && rank[i] > rank[j])
        complementary.push_back({i, j});

  std::size_t count = rng.below(shape.max_superiority + 1);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t i, j;
    if (!complementary.empty() && rng.chance(shape.complementary_percent)) {
      std::tie(i, j) = rng.pick(complementary);
    } else {
      i = rng.below(t.rules.size());
      j = rng.below(t.rules.size());
      if (i == j) continue;
      if (rank[i] < rank[j]) std::swap(i, j);
    }
    t.superiority.insert({t.rules[i].label, t.rules[j].label});
  }
}

}  // namespace detail

/// Propositional theory over atoms p0, p1, ... and rules r0, r1, ...
inline Theory random_ground_theory(Rng& rng, const TheoryShape& shape = {}) {
  Theory t;
  std::size_t atoms = rng.between(1, shape.max_atoms);
  auto lit = [&] {
    return Literal{{"p" + std::to_string(rng.below(atoms)), {}}, detail::random_polarity(rng)};
  };
  std::size_t facts = rng.below(shape.max_facts + 1);
  for (std::size_t i = 0; i < facts; ++i) t.facts.insert(lit());
  std::size_t rules = rng.below(shape.max_rules + 1);
  for (std::size_t i = 0; i < rules; ++i) {
    Rule r{"r" + std::to_string(i), {}, lit(), detail::random_kind(rng, shape)};
    std::size_t body = rng.below(shape.max_body + 1);
    for (std::size_t k = 0; k < body; ++k) r.body.push_back(lit());
    t.rules.push_back(std::move(r));
  }
  detail::add_superiority(rng, shape, t);
  return t;
}

/// Theory over predicates of arity up to max_arity, constants c0, c1, ...
/// and variables X, Y, Z. Rules are range-restricted unless the shape says
/// otherwise, in which case some head variables may be unbound.
inline Theory random_variable_theory(Rng& rng, const TheoryShape& shape = {}) {
  Theory t;
  std::size_t npred = rng.between(1, std::max<std::size_t>(1, shape.max_atoms / 2));
  std::vector<std::size_t> arity(npred);
  for (auto& a : arity) a = rng.below(shape.max_arity + 1);
  std::size_t nconst = rng.between(1, shape.max_constants);
  std::vector<std::string> constants;
  for (std::size_t i = 0; i < nconst; ++i) constants.push_back("c" + std::to_string(i));
  const std::vector<std::string> variables{"X", "Y", "Z"};

  auto ground_lit = [&] {
    std::size_t p = rng.below(npred);
    Literal l{{"q" + std::to_string(p), {}}, detail::random_polarity(rng)};
    for (std::size_t i = 0; i < arity[p]; ++i) l.atom.args.push_back(Term::constant(rng.pick(constants)));
    return l;
  };

  std::size_t facts = rng.below(shape.max_facts + 1);
  for (std::size_t i = 0; i < facts; ++i) t.facts.insert(ground_lit());

  std::size_t rules = rng.below(shape.max_rules + 1);
  for (std::size_t i = 0; i < rules; ++i) {
    Rule r{"r" + std::to_string(i), {}, {}, detail::random_kind(rng, shape)};
    std::vector<std::string> bound;
    std::size_t body = rng.below(shape.max_body + 1);
    for (std::size_t k = 0; k < body; ++k) {
      std::size_t p = rng.below(npred);
      Literal l{{"q" + std::to_string(p), {}}, detail::random_polarity(rng)};
      for (std::size_t a = 0; a < arity[p]; ++a) {
        if (rng.chance(70)) {
          const auto& v = rng.pick(variables);
          l.atom.args.push_back(Term::variable(v));
          bound.push_back(v);
        } else {
          l.atom.args.push_back(Term::constant(rng.pick(constants)));
        }
      }
      r.body.push_back(std::move(l));
    }
    std::size_t p = rng.below(npred);
    r.head = Literal{{"q" + std::to_string(p), {}}, detail::random_polarity(rng)};
    for (std::size_t a = 0; a < arity[p]; ++a) {
      if (!bound.empty() && rng.chance(75))
        r.head.atom.args.push_back(Term::variable(rng.pick(bound)));
      else if (!shape.range_restricted && rng.chance(50))
        r.head.atom.args.push_back(Term::variable(rng.pick(variables)));
      else
        r.head.atom.args.push_back(Term::constant(rng.pick(constants)));
    }
    t.rules.push_back(std::move(r));
  }
  // keep the theory groundable
  if (!is_ground(t) && herbrand_universe(t).empty()) {
    std::size_t p = 0;
    while (arity[p] == 0) ++p;
    Literal l{{"q" + std::to_string(p), {}}, Polarity::Positive};
    for (std::size_t i = 0; i < arity[p]; ++i) l.atom.args.push_back(Term::constant(constants.front()));
    t.facts.insert(std::move(l));
  }
  detail::add_superiority(rng, shape, t);
  return t;
}

struct ProgramShape {
  std::size_t max_predicates = 10;
  std::size_t max_clauses = 20;
  std::size_t max_arity = 2;
  std::size_t max_constants = 3;
  std::size_t max_positive = 2;
  std::size_t max_negative = 2;
};

/// Safe Datalog program over predicates p0, p1, ... and constants a, b, c.
inline Program random_program(Rng& rng, const ProgramShape& shape = {}) {
  std::size_t npred = rng.between(1, shape.max_predicates);
  std::vector<std::size_t> arity(npred);
  for (auto& a : arity) a = rng.below(shape.max_arity + 1);
  std::vector<std::string> constants;
  std::size_t nconst = rng.between(1, shape.max_constants);
  for (std::size_t i = 0; i < nconst; ++i) constants.push_back(std::string(1, static_cast<char>('a' + i)));
  const std::vector<std::string> variables{"X", "Y", "Z"};

  Program prog;
  std::size_t nclauses = rng.between(1, shape.max_clauses);
  for (std::size_t i = 0; i < nclauses; ++i) {
    Clause c;
    std::vector<std::string> bound;
    std::size_t npos = rng.below(shape.max_positive + 1);
    for (std::size_t k = 0; k < npos; ++k) {
      std::size_t p = rng.below(npred);
      Atom a{"p" + std::to_string(p), {}};
      for (std::size_t j = 0; j < arity[p]; ++j) {
        if (rng.chance(70)) {
          const auto& v = rng.pick(variables);
          a.args.push_back(Term::variable(v));
          bound.push_back(v);
        } else {
          a.args.push_back(Term::constant(rng.pick(constants)));
        }
      }
      c.positive.push_back(std::move(a));
    }
    auto closed_atom = [&](std::size_t p) {
      Atom a{"p" + std::to_string(p), {}};
      for (std::size_t j = 0; j < arity[p]; ++j) {
        if (!bound.empty() && rng.chance(70))
          a.args.push_back(Term::variable(rng.pick(bound)));
        else
          a.args.push_back(Term::constant(rng.pick(constants)));
      }
      return a;
    };
    std::size_t nneg = rng.below(shape.max_negative + 1);
    for (std::size_t k = 0; k < nneg; ++k) c.negative.push_back(closed_atom(rng.below(npred)));
    c.head = closed_atom(rng.below(npred));
    prog.add(std::move(c));
  }
  return prog;
}

}  // namespace defeasidl
