#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace defeasidl {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class EmptyUniverse : public Error {
public:
  EmptyUniverse()
      : Error("theory contains variables but no constants (empty Herbrand universe)") {}
};

// Identifiers ---------------------------------------------------------------

inline bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

/// Predicates, constants and rule labels: lowercase letter or digit first.
inline bool is_constant_name(std::string_view s) {
  if (s.empty()) return false;
  char c = s.front();
  if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

inline bool is_variable_name(std::string_view s) {
  if (s.empty()) return false;
  char c = s.front();
  if (!(c >= 'A' && c <= 'Z')) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

// Terms, atoms, literals ----------------------------------------------------

struct Term {
  enum class Kind { Variable, Constant };

  Kind kind = Kind::Constant;
  std::string name;

  static Term variable(std::string n) { return {Kind::Variable, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }

  bool is_variable() const { return kind == Kind::Variable; }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  std::size_t arity() const { return args.size(); }
  bool is_ground() const {
    return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
  }

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

enum class Polarity { Positive, Negative };

struct Literal {
  Atom atom;
  Polarity polarity = Polarity::Positive;

  bool negative() const { return polarity == Polarity::Negative; }
  bool is_ground() const { return atom.is_ground(); }
  const std::string& predicate() const { return atom.predicate; }

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

inline Literal complement(Literal lit) {
  lit.polarity = lit.negative() ? Polarity::Positive : Polarity::Negative;
  return lit;
}

inline Literal positive(std::string predicate, std::vector<Term> args = {}) {
  return {{std::move(predicate), std::move(args)}, Polarity::Positive};
}

inline Literal negative(std::string predicate, std::vector<Term> args = {}) {
  return {{std::move(predicate), std::move(args)}, Polarity::Negative};
}

// Rules and theories --------------------------------------------------------

enum class RuleKind { Strict, Defeasible, Defeater };

inline std::string_view arrow(RuleKind kind) {
  switch (kind) {
    case RuleKind::Strict: return "->";
    case RuleKind::Defeasible: return "=>";
    case RuleKind::Defeater: return "~>";
  }
  return "?";
}

struct Rule {
  std::string label;
  std::vector<Literal> body;
  Literal head;
  RuleKind kind = RuleKind::Defeasible;

  bool strict() const { return kind == RuleKind::Strict; }
  bool strict_or_defeasible() const { return kind != RuleKind::Defeater; }

  auto operator<=>(const Rule&) const = default;
  bool operator==(const Rule&) const = default;
};

/// (superior, inferior): the first rule overrides the second.
using Superiority = std::pair<std::string, std::string>;

struct Theory {
  std::set<Literal> facts;
  std::vector<Rule> rules;
  std::set<Superiority> superiority;

  bool empty() const { return facts.empty() && rules.empty() && superiority.empty(); }

  const Rule* rule(std::string_view label) const {
    for (const auto& r : rules)
      if (r.label == label) return &r;
    return nullptr;
  }

  bool superior(std::string_view t, std::string_view s) const {
    return superiority.count({std::string(t), std::string(s)}) > 0;
  }

  bool operator==(const Theory&) const = default;
};

// Printing ------------------------------------------------------------------

inline std::string to_string(const Term& t) { return t.name; }

inline std::string to_string(const Atom& a) {
  std::string out = a.predicate;
  if (a.args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ", ";
    out += a.args[i].name;
  }
  out += ')';
  return out;
}

inline std::string to_string(const Literal& l) {
  return l.negative() ? "neg " + to_string(l.atom) : to_string(l.atom);
}

inline std::string to_string(const Rule& r) {
  std::string out = r.label + ":";
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    out += i ? ", " : " ";
    out += to_string(r.body[i]);
  }
  out += ' ';
  out += arrow(r.kind);
  out += ' ';
  out += to_string(r.head);
  out += '.';
  return out;
}

// Structural queries --------------------------------------------------------

/// Distinct variables of a rule in order of first occurrence (body, then head).
inline std::vector<std::string> rule_variables(const Rule& r) {
  std::vector<std::string> vars;
  auto note = [&](const Literal& l) {
    for (const auto& t : l.atom.args)
      if (t.is_variable() && std::find(vars.begin(), vars.end(), t.name) == vars.end())
        vars.push_back(t.name);
  };
  for (const auto& l : r.body) note(l);
  note(r.head);
  return vars;
}

/// Constants occurring anywhere in facts and rules, sorted.
inline std::vector<std::string> herbrand_universe(const Theory& theory) {
  std::set<std::string> out;
  auto note = [&](const Literal& l) {
    for (const auto& t : l.atom.args)
      if (!t.is_variable()) out.insert(t.name);
  };
  for (const auto& f : theory.facts) note(f);
  for (const auto& r : theory.rules) {
    for (const auto& l : r.body) note(l);
    note(r.head);
  }
  return {out.begin(), out.end()};
}

inline bool is_range_restricted(const Theory& theory) {
  for (const auto& f : theory.facts)
    if (!f.is_ground()) return false;
  for (const auto& r : theory.rules) {
    std::set<std::string> body_vars;
    for (const auto& l : r.body)
      for (const auto& t : l.atom.args)
        if (t.is_variable()) body_vars.insert(t.name);
    for (const auto& t : r.head.atom.args)
      if (t.is_variable() && !body_vars.count(t.name)) return false;
  }
  return true;
}

inline bool is_ground(const Theory& theory) {
  auto ground = [](const Literal& l) { return l.is_ground(); };
  if (!std::all_of(theory.facts.begin(), theory.facts.end(), ground)) return false;
  return std::all_of(theory.rules.begin(), theory.rules.end(), [&](const Rule& r) {
    return ground(r.head) && std::all_of(r.body.begin(), r.body.end(), ground);
  });
}

/// Symbol count: one per predicate, term and label occurrence, plus one per
/// rule arrow, fact and superiority statement. Classical negation is not counted.
inline std::size_t theory_size(const Theory& theory) {
  auto literal_size = [](const Literal& l) { return 1 + l.atom.args.size(); };
  std::size_t n = 0;
  for (const auto& f : theory.facts) n += literal_size(f) + 1;
  for (const auto& r : theory.rules) {
    n += 1 + 1;  // label, arrow
    n += literal_size(r.head);
    for (const auto& l : r.body) n += literal_size(l);
  }
  n += 3 * theory.superiority.size();
  return n;
}

// Grounding -----------------------------------------------------------------

using Substitution = std::map<std::string, std::string>;

struct RuleOrigin {
  std::string source_label;
  Substitution substitution;

  bool operator==(const RuleOrigin&) const = default;
};

struct GroundTheory {
  Theory theory;
  /// Ground rule label -> source rule and the substitution that produced it.
  std::map<std::string, RuleOrigin> provenance;
};

/// Separator between a source label and the ordinal of one of its instances.
inline constexpr std::string_view kGroundLabelSeparator = "__";

namespace detail {

inline Term substitute(const Term& t, const Substitution& sub) {
  if (!t.is_variable()) return t;
  auto it = sub.find(t.name);
  return it == sub.end() ? t : Term::constant(it->second);
}

inline Literal substitute(Literal l, const Substitution& sub) {
  for (auto& t : l.atom.args) t = substitute(t, sub);
  return l;
}

}  // namespace detail

inline Rule instantiate(const Rule& r, const Substitution& sub) {
  Rule g = r;
  g.head = detail::substitute(r.head, sub);
  for (auto& l : g.body) l = detail::substitute(l, sub);
  return g;
}

/// Every rule instantiated over the constants of the theory. Variable-free
/// rules keep their label; instances of other rules are labelled
/// `label__k` for the k-th substitution in lexicographic order.
inline GroundTheory ground_theory(const Theory& theory) {
  const auto universe = herbrand_universe(theory);

  std::set<std::string> used;
  for (const auto& r : theory.rules) used.insert(r.label);

  GroundTheory out;
  out.theory.facts = theory.facts;
  std::map<std::string, std::vector<std::string>> instances;

  for (const auto& r : theory.rules) {
    const auto vars = rule_variables(r);
    if (vars.empty()) {
      out.theory.rules.push_back(r);
      out.provenance[r.label] = {r.label, {}};
      instances[r.label].push_back(r.label);
      continue;
    }
    if (universe.empty()) throw EmptyUniverse();

    std::vector<std::size_t> index(vars.size(), 0);
    std::size_t ordinal = 0;
    for (;;) {
      Substitution sub;
      for (std::size_t i = 0; i < vars.size(); ++i) sub[vars[i]] = universe[index[i]];

      Rule g = instantiate(r, sub);
      std::string label = r.label + std::string(kGroundLabelSeparator) + std::to_string(ordinal++);
      while (used.count(label)) label += "_";
      used.insert(label);
      g.label = label;
      out.provenance[label] = {r.label, sub};
      instances[r.label].push_back(label);
      out.theory.rules.push_back(std::move(g));

      // odometer over universe^|vars|, last variable fastest
      std::size_t k = vars.size();
      while (k > 0) {
        if (++index[k - 1] < universe.size()) break;
        index[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }

  for (const auto& [t, s] : theory.superiority)
    for (const auto& gt : instances[t])
      for (const auto& gs : instances[s]) out.theory.superiority.insert({gt, gs});
  return out;
}

// Hierarchy -----------------------------------------------------------------

namespace detail {

/// Longest-path levels of a dependency relation, or nullopt on a cycle.
template <class Node>
std::optional<std::map<Node, std::size_t>> acyclic_levels(
    const std::set<Node>& nodes, const std::map<Node, std::set<Node>>& depends_on) {
  enum class Mark { White, Grey, Black };
  std::map<Node, Mark> mark;
  std::map<Node, std::size_t> level;
  for (const auto& n : nodes) mark[n] = Mark::White;

  // iterative DFS; a grey node on the stack means a cycle
  for (const auto& root : nodes) {
    if (mark[root] != Mark::White) continue;
    std::vector<std::pair<Node, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [n, expanded] = stack.back();
      stack.pop_back();
      if (expanded) {
        std::size_t lv = 0;
        if (auto it = depends_on.find(n); it != depends_on.end())
          for (const auto& d : it->second) lv = std::max(lv, level[d] + 1);
        level[n] = lv;
        mark[n] = Mark::Black;
        continue;
      }
      if (mark[n] == Mark::Black) continue;
      if (mark[n] == Mark::Grey) return std::nullopt;
      mark[n] = Mark::Grey;
      stack.push_back({n, true});
      if (auto it = depends_on.find(n); it != depends_on.end())
        for (const auto& d : it->second) {
          if (mark[d] == Mark::Grey) return std::nullopt;
          if (mark[d] == Mark::White) stack.push_back({d, false});
        }
    }
  }
  return level;
}

}  // namespace detail

/// Level mapping over predicates witnessing that no predicate depends on
/// itself (polarity ignored), or nullopt if the theory is recursive.
inline std::optional<std::map<std::string, std::size_t>> is_hierarchical(const Theory& theory) {
  std::set<std::string> preds;
  std::map<std::string, std::set<std::string>> deps;
  for (const auto& f : theory.facts) preds.insert(f.predicate());
  for (const auto& r : theory.rules) {
    preds.insert(r.head.predicate());
    auto& d = deps[r.head.predicate()];
    for (const auto& l : r.body) {
      preds.insert(l.predicate());
      d.insert(l.predicate());
    }
  }
  return detail::acyclic_levels(preds, deps);
}

/// True iff the ground-atom dependency graph of ground_theory(theory) is acyclic.
inline bool is_locally_hierarchical(const Theory& theory) {
  const auto g = ground_theory(theory);
  std::set<Atom> atoms;
  std::map<Atom, std::set<Atom>> deps;
  for (const auto& f : g.theory.facts) atoms.insert(f.atom);
  for (const auto& r : g.theory.rules) {
    atoms.insert(r.head.atom);
    auto& d = deps[r.head.atom];
    for (const auto& l : r.body) {
      atoms.insert(l.atom);
      d.insert(l.atom);
    }
  }
  return detail::acyclic_levels(atoms, deps).has_value();
}

}  // namespace defeasidl
