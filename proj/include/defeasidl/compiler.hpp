#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "datalog.hpp"
#include "mangle.hpp"
#include "theory.hpp"
#include "validate.hpp"

namespace defeasidl {

enum class DefeatMode { Team, Individual };

/// Clause schemata of the compiled program, in emission order.
enum class Schema {
  Fact,              // definitely_q(a). lambda_q(a). defeasibly_q(a).
  StrictDefinitely,  // definitely_q(a) :- body_r_delta(a).
  StrictLambda,      // lambda_q(a) :- body_r_delta(a).
  StrictDefeasibly,  // defeasibly_q(a) :- body_r_delta(a).
  BodyDelta,         // body_r_delta(a) :- definitely_q1(a1), ...
  Lambda,            // lambda_q(a) :- body_r_lam(a), not definitely_~q(a).
  Defeasibly,        // defeasibly_q(a) :- body_r_d(a), not definitely_~q(a), not overruled_q([r,] a).
  BodyLambda,        // body_r_lam(a) :- lambda_q1(a1), ...
  BodyDefeasible,    // body_r_d(a) :- defeasibly_q1(a1), ...
  Overruled,         // overruled_~h([r,] b) :- body_s_lam(b), not defeated_h(s, b) | not defeats_h(r, s).
  Defeated,          // defeated_~q(s, a) :- body_t_d(a).
  Defeats,           // defeats_h(r, s).
};

inline std::string_view schema_name(Schema s) {
  switch (s) {
    case Schema::Fact: return "fact";
    case Schema::StrictDefinitely: return "strict-definitely";
    case Schema::StrictLambda: return "strict-lambda";
    case Schema::StrictDefeasibly: return "strict-defeasibly";
    case Schema::BodyDelta: return "body-delta";
    case Schema::Lambda: return "lambda";
    case Schema::Defeasibly: return "defeasibly";
    case Schema::BodyLambda: return "body-lam";
    case Schema::BodyDefeasible: return "body-d";
    case Schema::Overruled: return "overruled";
    case Schema::Defeated: return "defeated";
    case Schema::Defeats: return "defeats";
  }
  return "?";
}

struct ClauseOrigin {
  Schema schema = Schema::Fact;
  /// Rule label, "t > s" for superiority-derived clauses, or the fact text.
  std::string source;

  bool operator==(const ClauseOrigin&) const = default;
};

struct CompilationOutput {
  DefeatMode mode = DefeatMode::Team;
  Program program;
  /// Parallel to program.clauses().
  std::vector<ClauseOrigin> origins;
  /// definitely_*, lambda_*, body_*_delta and body_*_lam predicates.
  std::set<std::string> floor;
  /// Meaning of every predicate name in the program.
  std::map<std::string, MangledPredicate> predicates;

  bool in_floor(const std::string& pred) const { return floor.count(pred) > 0; }

  const MangledPredicate* meaning(const std::string& pred) const {
    auto it = predicates.find(pred);
    return it == predicates.end() ? nullptr : &it->second;
  }
};

namespace detail {

class Emitter {
public:
  explicit Emitter(DefeatMode mode) { out_.mode = mode; }

  Atom literal_atom(Tag tag, const Literal& lit, std::vector<Term> prefix = {}) {
    auto m = MangledPredicate::literal(tag, lit.predicate(), lit.polarity);
    Atom a{m.name(), std::move(prefix)};
    a.args.insert(a.args.end(), lit.atom.args.begin(), lit.atom.args.end());
    remember(m);
    return a;
  }

  Atom body_atom(const Rule& r, BodyFlavor flavor) {
    auto m = MangledPredicate::body(r.label, flavor);
    remember(m);
    return {m.name(), r.head.atom.args};
  }

  void emit(Schema schema, std::string source, Clause c) {
    pending_.push_back({schema, order_++, std::move(c), {schema, std::move(source)}});
  }

  CompilationOutput finish() {
    std::stable_sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
      return a.schema != b.schema ? a.schema < b.schema : a.order < b.order;
    });
    for (auto& p : pending_) {
      out_.program.add(std::move(p.clause));
      out_.origins.push_back(std::move(p.origin));
    }
    return std::move(out_);
  }

private:
  struct Pending {
    Schema schema;
    std::size_t order;
    Clause clause;
    ClauseOrigin origin;
  };

  void remember(const MangledPredicate& m) {
    auto name = m.name();
    bool floor = m.is_body() ? m.flavor != BodyFlavor::Defeasible
                             : (m.tag == Tag::Definitely || m.tag == Tag::Lambda);
    if (floor) out_.floor.insert(name);
    out_.predicates.emplace(std::move(name), m);
  }

  CompilationOutput out_;
  std::vector<Pending> pending_;
  std::size_t order_ = 0;
};

inline Term label_term(const std::string& label) { return Term::constant(label); }

inline CompilationOutput compile(const Theory& theory, DefeatMode mode) {
  auto report = validate_theory(theory);
  if (!report.ok()) throw ValidationFailed(std::move(report));

  Emitter e(mode);

  for (const auto& f : theory.facts) {
    auto src = to_string(f);
    e.emit(Schema::Fact, src, {e.literal_atom(Tag::Definitely, f), {}, {}});
    e.emit(Schema::Fact, src, {e.literal_atom(Tag::Lambda, f), {}, {}});
    e.emit(Schema::Fact, src, {e.literal_atom(Tag::Defeasibly, f), {}, {}});
  }

  auto body_of = [&](const Rule& r, Tag tag) {
    std::vector<Atom> atoms;
    for (const auto& l : r.body) atoms.push_back(e.literal_atom(tag, l));
    return atoms;
  };

  for (const auto& r : theory.rules) {
    const Literal& q = r.head;
    const Literal nq = complement(q);

    if (r.strict()) {
      Atom bd = e.body_atom(r, BodyFlavor::Delta);
      e.emit(Schema::StrictDefinitely, r.label, {e.literal_atom(Tag::Definitely, q), {bd}, {}});
      e.emit(Schema::StrictLambda, r.label, {e.literal_atom(Tag::Lambda, q), {bd}, {}});
      e.emit(Schema::StrictDefeasibly, r.label, {e.literal_atom(Tag::Defeasibly, q), {bd}, {}});
      e.emit(Schema::BodyDelta, r.label, {bd, body_of(r, Tag::Definitely), {}});
    }

    if (r.strict_or_defeasible()) {
      e.emit(Schema::Lambda, r.label,
             {e.literal_atom(Tag::Lambda, q), {e.body_atom(r, BodyFlavor::Lambda)},
              {e.literal_atom(Tag::Definitely, nq)}});
      std::vector<Term> prefix;
      if (mode == DefeatMode::Individual) prefix.push_back(label_term(r.label));
      e.emit(Schema::Defeasibly, r.label,
             {e.literal_atom(Tag::Defeasibly, q), {e.body_atom(r, BodyFlavor::Defeasible)},
              {e.literal_atom(Tag::Definitely, nq), e.literal_atom(Tag::Overruled, q, prefix)}});
      e.emit(Schema::BodyDefeasible, r.label,
             {e.body_atom(r, BodyFlavor::Defeasible), body_of(r, Tag::Defeasibly), {}});
    }

    // every rule, defeaters included, can attack its complement
    e.emit(Schema::BodyLambda, r.label,
           {e.body_atom(r, BodyFlavor::Lambda), body_of(r, Tag::Lambda), {}});
    if (mode == DefeatMode::Team) {
      std::vector<Term> s_prefix{label_term(r.label)};
      e.emit(Schema::Overruled, r.label,
             {e.literal_atom(Tag::Overruled, nq), {e.body_atom(r, BodyFlavor::Lambda)},
              {e.literal_atom(Tag::Defeated, q, s_prefix)}});
    } else {
      // one clause per rule that the attack can overrule
      for (const auto& d : theory.rules) {
        if (!d.strict_or_defeasible() || d.head.predicate() != q.predicate() ||
            d.head.polarity == q.polarity)
          continue;
        Atom defeats{MangledPredicate::literal(Tag::Defeats, q.predicate(), q.polarity).name(),
                     {label_term(d.label), label_term(r.label)}};
        e.literal_atom(Tag::Defeats, q);  // registers the predicate
        e.emit(Schema::Overruled, r.label,
               {e.literal_atom(Tag::Overruled, nq, {label_term(d.label)}),
                {e.body_atom(r, BodyFlavor::Lambda)},
                {std::move(defeats)}});
      }
    }
  }

  for (const auto& [tl, sl] : theory.superiority) {
    const Rule* t = theory.rule(tl);
    const Rule* s = theory.rule(sl);
    if (!t->strict_or_defeasible() || !complementary_heads(*t, *s)) continue;
    std::string src = tl + " > " + sl;
    if (mode == DefeatMode::Team) {
      e.emit(Schema::Defeated, src,
             {e.literal_atom(Tag::Defeated, complement(t->head), {label_term(sl)}),
              {e.body_atom(*t, BodyFlavor::Defeasible)},
              {}});
    } else {
      auto pred = MangledPredicate::literal(Tag::Defeats, s->head.predicate(), s->head.polarity);
      e.literal_atom(Tag::Defeats, s->head);
      e.emit(Schema::Defeats, src, {{pred.name(), {label_term(tl), label_term(sl)}}, {}, {}});
    }
  }

  return e.finish();
}

}  // namespace detail

/// Compiles a validated theory to the team-defeat program. Throws ValidationFailed.
inline CompilationOutput compile_team(const Theory& theory) {
  return detail::compile(theory, DefeatMode::Team);
}

/// Compiles a validated theory to the individual-defeat program. Throws ValidationFailed.
inline CompilationOutput compile_individual(const Theory& theory) {
  return detail::compile(theory, DefeatMode::Individual);
}

inline CompilationOutput compile(const Theory& theory, DefeatMode mode) {
  return detail::compile(theory, mode);
}

/// One clause per line, each followed by a "% schema source" comment.
inline std::string emit_datalog_text(const CompilationOutput& out) {
  std::string text;
  const auto& clauses = out.program.clauses();
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    text += to_string(clauses[i]);
    if (i < out.origins.size()) {
      text += "  % ";
      text += schema_name(out.origins[i].schema);
      text += ' ';
      text += out.origins[i].source;
    }
    text += '\n';
  }
  return text;
}

/// Symbol count of a program, counted like theory_size: predicates and
/// terms, plus one marker per clause (arrow or fact).
inline std::size_t program_size(const Program& program) {
  std::size_t n = 0;
  for (const auto& c : program.clauses()) {
    n += 1 + c.head.arity() + 1;
    for (const auto& a : c.positive) n += 1 + a.arity();
    for (const auto& a : c.negative) n += 1 + a.arity();
  }
  return n;
}

inline std::size_t compiled_size(const CompilationOutput& out) { return program_size(out.program); }

}  // namespace defeasidl
