#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "compiler.hpp"
#include "datalog.hpp"

namespace defeasidl {

class UnsafeProgram : public Error {
public:
  explicit UnsafeProgram(const Clause& c)
      : Error("clause is not safe (every variable must occur in a positive body literal): " +
              to_string(c)) {}
};

class NotStratified : public Error {
public:
  NotStratified() : Error("program is not stratified: some recursive component contains negation") {}
};

class IterationLimit : public Error {
public:
  explicit IterationLimit(std::size_t cap)
      : Error("evaluation exceeded the iteration cap of " + std::to_string(cap)) {}
};

enum class Truth { False, Unknown, True };

inline std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::False: return "false";
    case Truth::Unknown: return "unknown";
    case Truth::True: return "true";
  }
  return "?";
}

/// Three-valued interpretation. Atoms outside all three sets have no ground
/// clause at all and read as false.
struct Interpretation {
  std::set<Atom> true_set;
  std::set<Atom> false_set;
  std::set<Atom> unknown_set;

  Truth truth(const Atom& a) const {
    if (true_set.count(a)) return Truth::True;
    if (unknown_set.count(a)) return Truth::Unknown;
    return Truth::False;
  }

  bool is_total() const { return unknown_set.empty(); }

  /// Atoms of one predicate with the given truth value.
  std::set<Atom> with(const std::string& pred, Truth t) const {
    const auto& src = t == Truth::True ? true_set : t == Truth::False ? false_set : unknown_set;
    std::set<Atom> out;
    for (const auto& a : src)
      if (a.predicate == pred) out.insert(a);
    return out;
  }

  bool operator==(const Interpretation&) const = default;
};

/// I is below J in the information order: everything true in I is true in J,
/// everything false in I is false in J.
inline bool information_leq(const Interpretation& i, const Interpretation& j) {
  for (const auto& a : i.true_set)
    if (j.truth(a) != Truth::True) return false;
  for (const auto& a : j.true_set)
    if (i.truth(a) == Truth::False) return false;
  for (const auto& a : j.unknown_set)
    if (i.truth(a) == Truth::False) return false;
  return true;
}

struct GroundClause {
  std::size_t head = 0;
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;

  auto operator<=>(const GroundClause&) const = default;
};

/// Propositional program over interned ground atoms.
class GroundProgram {
public:
  std::size_t intern(const Atom& a) {
    auto [it, fresh] = index_.emplace(a, atoms_.size());
    if (fresh) atoms_.push_back(a);
    return it->second;
  }

  std::optional<std::size_t> find(const Atom& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  void add(GroundClause c) { clauses_.push_back(std::move(c)); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(std::size_t id) const { return atoms_[id]; }
  const std::vector<GroundClause>& clauses() const { return clauses_; }
  std::size_t size() const { return clauses_.size(); }

  Program as_program() const {
    Program p;
    for (const auto& c : clauses_) {
      Clause d{atoms_[c.head], {}, {}};
      for (auto x : c.positive) d.positive.push_back(atoms_[x]);
      for (auto x : c.negative) d.negative.push_back(atoms_[x]);
      p.add(std::move(d));
    }
    return p;
  }

private:
  std::vector<Atom> atoms_;
  std::map<Atom, std::size_t> index_;
  std::vector<GroundClause> clauses_;
};

enum class GroundingMode {
  /// Only clause instances whose positive body can be derived, ignoring
  /// negation. Exact for the well-founded and stratified semantics; needs a
  /// safe program.
  Derivable,
  /// Every instance over the program's constants, then repeatedly drop
  /// instances with a positive body atom that has no clause left. Exact for
  /// Fitting's semantics.
  Exhaustive,
};

/// Predicates whose atoms are given rather than defined by clauses.
struct FixedAtoms {
  std::set<std::string> predicates;
  Interpretation values;
};

namespace detail {

inline bool match(const Atom& pattern, const Atom& ground, Substitution& sub,
                  std::vector<std::string>& bound) {
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& t = pattern.args[i];
    const std::string& c = ground.args[i].name;
    if (!t.is_variable()) {
      if (t.name != c) return false;
      continue;
    }
    auto it = sub.find(t.name);
    if (it == sub.end()) {
      sub.emplace(t.name, c);
      bound.push_back(t.name);
    } else if (it->second != c) {
      return false;
    }
  }
  return true;
}

inline Atom ground_atom(const Atom& a, const Substitution& sub) {
  Atom g{a.predicate, {}};
  g.args.reserve(a.args.size());
  for (const auto& t : a.args) g.args.push_back(t.is_variable() ? Term::constant(sub.at(t.name)) : t);
  return g;
}

class Grounder {
public:
  Grounder(const Program& program, const FixedAtoms* fixed) : program_(program), fixed_(fixed) {
    for (const auto& c : program.clauses())
      if (!is_fixed(c.head.predicate)) clauses_.push_back(&c);
    for (const auto& c : clauses_) vars_.push_back(clause_variables(*c));
    seen_.resize(clauses_.size());
  }

  GroundProgram derivable() {
    for (const auto* c : clauses_)
      if (!is_safe(*c)) throw UnsafeProgram(*c);

    std::vector<Atom> delta;
    auto learn = [&](const Atom& a, std::vector<Atom>& into) {
      if (known_.insert(a).second) {
        by_pred_[a.predicate].push_back(a);
        into.push_back(a);
      }
    };
    if (fixed_) {
      for (const auto& a : fixed_->values.true_set)
        if (is_fixed(a.predicate)) learn(a, delta);
      for (const auto& a : fixed_->values.unknown_set)
        if (is_fixed(a.predicate)) learn(a, delta);
    }

    for (std::size_t k = 0; k < clauses_.size(); ++k)
      if (clauses_[k]->positive.empty()) {
        Substitution sub;
        if (auto h = emit(k, sub)) learn(*h, delta);
      }

    while (!delta.empty()) {
      std::map<std::string, std::vector<const Atom*>> fresh;
      for (const auto& a : delta) fresh[a.predicate].push_back(&a);
      std::vector<Atom> next;
      for (std::size_t k = 0; k < clauses_.size(); ++k) {
        const Clause& c = *clauses_[k];
        for (std::size_t pivot = 0; pivot < c.positive.size(); ++pivot) {
          auto it = fresh.find(c.positive[pivot].predicate);
          if (it == fresh.end()) continue;
          for (const Atom* g : it->second) {
            Substitution sub;
            std::vector<std::string> bound;
            if (!match(c.positive[pivot], *g, sub, bound)) continue;
            join(k, pivot, 0, sub, [&](const Substitution& s) {
              if (auto h = emit(k, s)) learn(*h, next);
            });
          }
        }
      }
      delta = std::move(next);
    }
    return std::move(out_);
  }

  GroundProgram exhaustive() {
    std::set<std::string> universe;
    auto note = [&](const Atom& a) {
      for (const auto& t : a.args)
        if (!t.is_variable()) universe.insert(t.name);
    };
    for (const auto& c : program_.clauses()) {
      note(c.head);
      for (const auto& a : c.positive) note(a);
      for (const auto& a : c.negative) note(a);
    }
    if (fixed_) {
      for (const auto& a : fixed_->values.true_set) note(a);
      for (const auto& a : fixed_->values.unknown_set) note(a);
    }
    std::vector<std::string> consts(universe.begin(), universe.end());

    std::vector<std::pair<std::size_t, Substitution>> instances;
    for (std::size_t k = 0; k < clauses_.size(); ++k) {
      const auto& vars = vars_[k];
      if (!vars.empty() && consts.empty()) continue;
      std::vector<std::size_t> pos(vars.size(), 0);
      for (;;) {
        Substitution sub;
        for (std::size_t i = 0; i < vars.size(); ++i) sub[vars[i]] = consts[pos[i]];
        instances.push_back({k, std::move(sub)});
        std::size_t i = 0;
        while (i < pos.size() && ++pos[i] == consts.size()) pos[i++] = 0;
        if (i == pos.size()) break;
      }
    }

    // greatest set of atoms each having an instance whose positive body
    // stays inside the set
    std::vector<bool> alive(instances.size(), true);
    std::map<Atom, std::size_t> support;
    for (const auto& [k, sub] : instances) ++support[ground_atom(clauses_[k]->head, sub)];
    auto supported = [&](const Atom& a) {
      if (is_fixed(a.predicate)) return fixed_->values.truth(a) != Truth::False;
      auto it = support.find(a);
      return it != support.end() && it->second > 0;
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < instances.size(); ++i) {
        if (!alive[i]) continue;
        const auto& [k, sub] = instances[i];
        for (const auto& a : clauses_[k]->positive)
          if (!supported(ground_atom(a, sub))) {
            alive[i] = false;
            --support[ground_atom(clauses_[k]->head, sub)];
            changed = true;
            break;
          }
      }
    }
    for (std::size_t i = 0; i < instances.size(); ++i)
      if (alive[i]) emit(instances[i].first, instances[i].second);
    return std::move(out_);
  }

private:
  bool is_fixed(const std::string& pred) const { return fixed_ && fixed_->predicates.count(pred); }

  static std::vector<std::string> clause_variables(const Clause& c) {
    std::set<std::string> v;
    collect_variables(c.head, v);
    for (const auto& a : c.positive) collect_variables(a, v);
    for (const auto& a : c.negative) collect_variables(a, v);
    return {v.begin(), v.end()};
  }

  template <class F>
  void join(std::size_t k, std::size_t pivot, std::size_t i, Substitution& sub, F&& found) {
    const Clause& c = *clauses_[k];
    if (i == c.positive.size()) {
      found(sub);
      return;
    }
    if (i == pivot) {
      join(k, pivot, i + 1, sub, found);
      return;
    }
    auto it = by_pred_.find(c.positive[i].predicate);
    if (it == by_pred_.end()) return;
    // by_pred_ may grow while we iterate; only the prefix known now is used
    std::size_t n = it->second.size();
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::string> bound;
      if (match(c.positive[i], it->second[j], sub, bound)) join(k, pivot, i + 1, sub, found);
      for (const auto& v : bound) sub.erase(v);
    }
  }

  /// Records the instance of clause k under sub, once; returns its head if new.
  std::optional<Atom> emit(std::size_t k, const Substitution& sub) {
    std::vector<std::string> key;
    for (const auto& v : vars_[k]) key.push_back(sub.at(v));
    if (!seen_[k].insert(std::move(key)).second) return std::nullopt;
    const Clause& c = *clauses_[k];
    std::vector<Atom> positive;
    for (const auto& a : c.positive) {
      positive.push_back(ground_atom(a, sub));
      if (is_fixed(a.predicate) && fixed_->values.truth(positive.back()) == Truth::False)
        return std::nullopt;
    }
    GroundClause g;
    Atom head = ground_atom(c.head, sub);
    g.head = out_.intern(head);
    for (const auto& a : positive) g.positive.push_back(out_.intern(a));
    for (const auto& a : c.negative) g.negative.push_back(out_.intern(ground_atom(a, sub)));
    out_.add(std::move(g));
    return head;
  }

  const Program& program_;
  const FixedAtoms* fixed_;
  std::vector<const Clause*> clauses_;
  std::vector<std::vector<std::string>> vars_;
  std::vector<std::set<std::vector<std::string>>> seen_;
  std::set<Atom> known_;
  std::map<std::string, std::vector<Atom>> by_pred_;
  GroundProgram out_;
};

/// Least model of the clauses whose negative literals all hold, where
/// "not a" holds iff blocked[a] is false.
inline std::vector<char> least_model(const GroundProgram& gp, const std::vector<char>& blocked) {
  std::size_t n = gp.atoms().size();
  std::vector<char> model(n, 0);
  std::vector<std::size_t> pending(gp.clauses().size(), 0);
  std::vector<std::vector<std::size_t>> watch(n);
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < gp.clauses().size(); ++i) {
    const auto& c = gp.clauses()[i];
    bool active = std::none_of(c.negative.begin(), c.negative.end(),
                               [&](std::size_t a) { return blocked[a] != 0; });
    if (!active) {
      pending[i] = static_cast<std::size_t>(-1);
      continue;
    }
    pending[i] = c.positive.size();
    for (auto a : c.positive) watch[a].push_back(i);
    if (pending[i] == 0 && !model[c.head]) {
      model[c.head] = 1;
      work.push_back(c.head);
    }
  }
  while (!work.empty()) {
    std::size_t a = work.back();
    work.pop_back();
    for (auto i : watch[a]) {
      // duplicate body atoms are watched once per occurrence
      if (--pending[i] == 0) {
        std::size_t h = gp.clauses()[i].head;
        if (!model[h]) {
          model[h] = 1;
          work.push_back(h);
        }
      }
    }
  }
  return model;
}

inline Interpretation to_interpretation(const GroundProgram& gp, const std::vector<Truth>& value) {
  Interpretation out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const Atom& a = gp.atom(i);
    switch (value[i]) {
      case Truth::True: out.true_set.insert(a); break;
      case Truth::False: out.false_set.insert(a); break;
      case Truth::Unknown: out.unknown_set.insert(a); break;
    }
  }
  return out;
}

}  // namespace detail

/// Ground instances of a program over its own constants. Throws
/// UnsafeProgram in Derivable mode when a clause is not safe.
inline GroundProgram ground_program(const Program& program,
                                    GroundingMode mode = GroundingMode::Derivable,
                                    const FixedAtoms* fixed = nullptr) {
  detail::Grounder g(program, fixed);
  return mode == GroundingMode::Derivable ? g.derivable() : g.exhaustive();
}

/// One step of the alternating fixpoint: `lower` atoms are known true,
/// atoms outside `upper` are known false.
struct AlternatingStep {
  std::vector<char> lower;
  std::vector<char> upper;
};

struct EvalOptions {
  std::size_t max_iterations = 1'000'000;
  std::vector<AlternatingStep>* trace = nullptr;
};

inline Interpretation eval_wellfounded(const GroundProgram& gp, const EvalOptions& opts = {}) {
  std::size_t n = gp.atoms().size();
  std::vector<char> lower(n, 0);
  std::vector<char> upper = detail::least_model(gp, lower);
  for (std::size_t it = 0;; ++it) {
    if (it >= opts.max_iterations) throw IterationLimit(opts.max_iterations);
    if (opts.trace) opts.trace->push_back({lower, upper});
    auto next_lower = detail::least_model(gp, upper);
    auto next_upper = detail::least_model(gp, next_lower);
    if (next_lower == lower && next_upper == upper) break;
    lower = std::move(next_lower);
    upper = std::move(next_upper);
  }
  std::vector<Truth> value(n);
  for (std::size_t i = 0; i < n; ++i)
    value[i] = lower[i] ? Truth::True : upper[i] ? Truth::Unknown : Truth::False;
  return detail::to_interpretation(gp, value);
}

/// Well-founded model by the alternating fixpoint. Throws UnsafeProgram.
inline Interpretation eval_wellfounded(const Program& program, const EvalOptions& opts = {}) {
  return eval_wellfounded(ground_program(program), opts);
}

/// Least fixpoint of Fitting's three-valued operator, by propagation.
inline Interpretation eval_fitting(const GroundProgram& gp, const FixedAtoms* fixed = nullptr) {
  std::size_t n = gp.atoms().size();
  const auto& clauses = gp.clauses();
  std::vector<Truth> value(n, Truth::Unknown);
  std::vector<std::size_t> live(n, 0);
  std::vector<std::size_t> pending(clauses.size());
  std::vector<char> dead(clauses.size(), 0);
  std::vector<std::vector<std::size_t>> pos_watch(n), neg_watch(n);
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const auto& c = clauses[i];
    ++live[c.head];
    pending[i] = c.positive.size() + c.negative.size();
    for (auto a : c.positive) pos_watch[a].push_back(i);
    for (auto a : c.negative) neg_watch[a].push_back(i);
  }

  std::vector<std::size_t> work;
  auto set = [&](std::size_t a, Truth t) {
    if (value[a] != Truth::Unknown) return;
    value[a] = t;
    work.push_back(a);
  };
  auto kill = [&](std::size_t i) {
    if (dead[i]) return;
    dead[i] = 1;
    if (--live[clauses[i].head] == 0) set(clauses[i].head, Truth::False);
  };
  auto satisfy_one = [&](std::size_t i) {
    if (!dead[i] && --pending[i] == 0) set(clauses[i].head, Truth::True);
  };

  for (std::size_t a = 0; a < n; ++a) {
    const Atom& atom = gp.atom(a);
    if (fixed && fixed->predicates.count(atom.predicate))
      set(a, fixed->values.truth(atom));
    else if (live[a] == 0)
      set(a, Truth::False);
  }
  for (std::size_t i = 0; i < clauses.size(); ++i)
    if (pending[i] == 0) set(clauses[i].head, Truth::True);

  while (!work.empty()) {
    std::size_t a = work.back();
    work.pop_back();
    if (value[a] == Truth::True) {
      for (auto i : pos_watch[a]) satisfy_one(i);
      for (auto i : neg_watch[a]) kill(i);
    } else if (value[a] == Truth::False) {
      for (auto i : pos_watch[a]) kill(i);
      for (auto i : neg_watch[a]) satisfy_one(i);
    }
  }
  return detail::to_interpretation(gp, value);
}

/// Fitting's semantics; atoms of fixed predicates take their given values
/// and clauses defining them are ignored.
inline Interpretation eval_fitting(const Program& program, const FixedAtoms* fixed = nullptr,
                                   GroundingMode mode = GroundingMode::Exhaustive) {
  return eval_fitting(ground_program(program, mode, fixed), fixed);
}

/// Iterated least models, stratum by stratum. Throws NotStratified.
inline Interpretation eval_stratified(const Program& program) {
  auto strata = stratify(program);
  if (!strata) throw NotStratified();
  GroundProgram gp = ground_program(program);
  std::size_t n = gp.atoms().size();

  std::map<std::size_t, std::vector<std::size_t>> by_stratum;
  for (std::size_t i = 0; i < gp.clauses().size(); ++i)
    by_stratum[strata->at(gp.atom(gp.clauses()[i].head).predicate)].push_back(i);

  std::vector<char> model(n, 0);
  for (const auto& [level, ids] : by_stratum) {
    // negative literals refer to lower strata, which are final
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto i : ids) {
        const auto& c = gp.clauses()[i];
        if (model[c.head]) continue;
        bool fires = std::all_of(c.positive.begin(), c.positive.end(),
                                 [&](std::size_t a) { return model[a] != 0; }) &&
                     std::none_of(c.negative.begin(), c.negative.end(),
                                  [&](std::size_t a) { return model[a] != 0; });
        if (fires) {
          model[c.head] = 1;
          changed = true;
        }
      }
    }
  }
  std::vector<Truth> value(n);
  for (std::size_t i = 0; i < n; ++i) value[i] = model[i] ? Truth::True : Truth::False;
  return detail::to_interpretation(gp, value);
}

/// Floor first by the stratified semantics, then everything above it by
/// Fitting's semantics with the floor fixed.
inline Interpretation eval_hybrid(const CompilationOutput& compiled) {
  const Program& program = compiled.program;
  if (compiled.origins.size() != program.size())
    throw Error("hybrid evaluation needs a program produced by the compiler");
  for (const auto& p : program.predicates())
    if (!compiled.meaning(p))
      throw Error("hybrid evaluation needs a program produced by the compiler");

  Interpretation floor = eval_stratified(program.restricted_to(compiled.floor));
  FixedAtoms fixed{compiled.floor, floor};
  Interpretation upper = eval_fitting(program, &fixed, GroundingMode::Derivable);

  Interpretation out = floor;
  for (const auto& a : upper.true_set)
    if (!compiled.in_floor(a.predicate)) out.true_set.insert(a);
  for (const auto& a : upper.false_set)
    if (!compiled.in_floor(a.predicate)) out.false_set.insert(a);
  for (const auto& a : upper.unknown_set)
    if (!compiled.in_floor(a.predicate)) out.unknown_set.insert(a);
  return out;
}

/// True iff no clause has a true body and a head that is not true, and
/// no clause has an undefined body and a false head.
inline bool is_model(const GroundProgram& gp, const Interpretation& i) {
  auto body_value = [&](const GroundClause& c) {
    Truth v = Truth::True;
    for (auto a : c.positive) v = std::min(v, i.truth(gp.atom(a)));
    for (auto a : c.negative) {
      Truth t = i.truth(gp.atom(a));
      Truth neg = t == Truth::True ? Truth::False : t == Truth::False ? Truth::True : Truth::Unknown;
      v = std::min(v, neg);
    }
    return v;
  };
  for (const auto& c : gp.clauses())
    if (i.truth(gp.atom(c.head)) < body_value(c)) return false;
  return true;
}

}  // namespace defeasidl
