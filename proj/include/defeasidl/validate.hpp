#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mangle.hpp"
#include "theory.hpp"

namespace defeasidl {

struct Diagnostic {
  std::string code;
  std::string message;
  std::string location;

  bool operator==(const Diagnostic&) const = default;
};

struct ValidationReport {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;

  bool ok() const { return errors.empty(); }

  bool has_error(std::string_view code) const {
    for (const auto& e : errors)
      if (e.code == code) return true;
    return false;
  }
  bool has_warning(std::string_view code) const {
    for (const auto& w : warnings)
      if (w.code == code) return true;
    return false;
  }
};

class ValidationFailed : public Error {
public:
  explicit ValidationFailed(ValidationReport report)
      : Error(summary(report)), report_(std::move(report)) {}

  const ValidationReport& report() const { return report_; }

private:
  static std::string summary(const ValidationReport& r) {
    std::string s = "theory failed validation";
    if (!r.errors.empty()) s += ": " + r.errors.front().message;
    return s;
  }

  ValidationReport report_;
};

namespace detail {

inline bool complementary_heads(const Rule& a, const Rule& b) {
  return a.head.predicate() == b.head.predicate() && a.head.polarity != b.head.polarity;
}

/// Some label on a cycle of the superiority graph, if any.
inline std::optional<std::string> superiority_cycle(const std::set<Superiority>& sup) {
  std::map<std::string, std::set<std::string>> next;
  std::set<std::string> nodes;
  for (const auto& [t, s] : sup) {
    next[t].insert(s);
    nodes.insert(t);
    nodes.insert(s);
  }
  if (auto levels = acyclic_levels(nodes, next)) return std::nullopt;
  // report the smallest label that reaches itself
  for (const auto& n : nodes) {
    std::set<std::string> seen;
    std::vector<std::string> stack(next[n].begin(), next[n].end());
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      if (x == n) return n;
      if (!seen.insert(x).second) continue;
      for (const auto& y : next[x]) stack.push_back(y);
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline ValidationReport validate_theory(const Theory& theory) {
  ValidationReport rep;
  auto error = [&](std::string code, std::string msg, std::string loc) {
    rep.errors.push_back({std::move(code), std::move(msg), std::move(loc)});
  };
  auto warn = [&](std::string code, std::string msg, std::string loc) {
    rep.warnings.push_back({std::move(code), std::move(msg), std::move(loc)});
  };

  // identifiers
  auto check_literal = [&](const Literal& l, const std::string& loc) {
    if (!is_constant_name(l.predicate()) || l.predicate() == "neg")
      error("bad-identifier", "invalid predicate name '" + l.predicate() + "'", loc);
    for (const auto& t : l.atom.args) {
      bool ok = t.is_variable() ? is_variable_name(t.name) : is_constant_name(t.name);
      if (!ok) error("bad-identifier", "invalid term '" + t.name + "'", loc);
    }
  };

  for (const auto& f : theory.facts) {
    std::string loc = "fact " + to_string(f);
    check_literal(f, loc);
    if (!f.is_ground()) error("non-ground-fact", "fact " + to_string(f) + " contains variables", loc);
  }

  std::map<std::string, std::size_t> label_count;
  for (const auto& r : theory.rules) {
    std::string loc = "rule " + r.label;
    if (!is_constant_name(r.label))
      error("bad-identifier", "invalid rule label '" + r.label + "'", loc);
    if (++label_count[r.label] == 2)
      error("duplicate-label", "rule label '" + r.label + "' is used more than once", loc);
    check_literal(r.head, loc);
    for (const auto& l : r.body) check_literal(l, loc);
  }

  // arities
  std::map<std::string, std::pair<std::size_t, std::string>> arity;
  auto check_arity = [&](const Literal& l, const std::string& loc) {
    auto [it, fresh] = arity.emplace(l.predicate(), std::pair{l.atom.arity(), loc});
    if (!fresh && it->second.first != l.atom.arity())
      error("arity-mismatch",
            "predicate '" + l.predicate() + "' used with arity " + std::to_string(l.atom.arity()) +
                " but arity " + std::to_string(it->second.first) + " at " + it->second.second,
            loc);
  };
  for (const auto& f : theory.facts) check_arity(f, "fact " + to_string(f));
  for (const auto& r : theory.rules) {
    for (const auto& l : r.body) check_arity(l, "rule " + r.label);
    check_arity(r.head, "rule " + r.label);
  }

  // superiority
  for (const auto& [t, s] : theory.superiority) {
    std::string loc = "superiority " + t + " > " + s;
    const Rule* rt = theory.rule(t);
    const Rule* rs = theory.rule(s);
    if (!rt) error("undefined-label", "superiority refers to unknown rule '" + t + "'", loc);
    if (!rs) error("undefined-label", "superiority refers to unknown rule '" + s + "'", loc);
    if (!rt || !rs) continue;
    if (!detail::complementary_heads(*rt, *rs))
      warn("inert-superiority",
           "rules " + t + " and " + s + " do not have complementary heads; the pair has no effect",
           loc);
    else if (!rt->strict_or_defeasible())
      warn("defeater-superior",
           "defeater " + t + " is declared superior; defeaters never support a conclusion", loc);
  }
  if (auto n = detail::superiority_cycle(theory.superiority))
    error("superiority-cycle", "superiority relation has a cycle through '" + *n + "'",
          "superiority");

  for (const auto& c : mangling_collisions(theory))
    error("mangling-collision",
          "compiled name '" + c.name + "' is produced by both " + c.first + " and " + c.second,
          "theory");
  return rep;
}

}  // namespace defeasidl
