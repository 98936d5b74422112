#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "theory.hpp"
#include "theory_parser.hpp"

namespace defeasidl {

/// head :- positive..., not negative...
struct Clause {
  Atom head;
  std::vector<Atom> positive;
  std::vector<Atom> negative;

  bool is_fact() const { return positive.empty() && negative.empty(); }

  auto operator<=>(const Clause&) const = default;
  bool operator==(const Clause&) const = default;
};

class ArityConflict : public Error {
public:
  ArityConflict(const std::string& pred, std::size_t have, std::size_t got)
      : Error("predicate '" + pred + "' has arity " + std::to_string(have) + " but is used with " +
              std::to_string(got) + " arguments") {}
};

class DatalogSyntaxError : public Error {
public:
  enum class Kind { Syntax, FunctionSymbol };

  DatalogSyntaxError(Kind kind, ParseError err)
      : Error(err.message()), kind_(kind), error_(std::move(err)) {}

  Kind kind() const { return kind_; }
  const ParseError& error() const { return error_; }

private:
  Kind kind_;
  ParseError error_;
};

/// A function-free logic program with negation as failure. Every predicate
/// is used with a single arity.
class Program {
public:
  Program() = default;
  explicit Program(std::vector<Clause> clauses) {
    for (auto& c : clauses) add(std::move(c));
  }

  void add(Clause c) {
    note(c.head);
    for (const auto& a : c.positive) note(a);
    for (const auto& a : c.negative) note(a);
    clauses_.push_back(std::move(c));
  }

  const std::vector<Clause>& clauses() const { return clauses_; }
  const std::map<std::string, std::size_t>& arities() const { return arity_; }
  std::size_t size() const { return clauses_.size(); }
  bool empty() const { return clauses_.empty(); }

  std::set<std::string> predicates() const {
    std::set<std::string> out;
    for (const auto& [p, n] : arity_) out.insert(p);
    return out;
  }

  /// Predicates with at least one defining clause.
  std::set<std::string> defined_predicates() const {
    std::set<std::string> out;
    for (const auto& c : clauses_) out.insert(c.head.predicate);
    return out;
  }

  /// Clauses whose head predicate is in `preds`.
  Program restricted_to(const std::set<std::string>& preds) const {
    Program p;
    for (const auto& c : clauses_)
      if (preds.count(c.head.predicate)) p.add(c);
    return p;
  }

private:
  void note(const Atom& a) {
    auto [it, fresh] = arity_.emplace(a.predicate, a.arity());
    if (!fresh && it->second != a.arity()) throw ArityConflict(a.predicate, it->second, a.arity());
  }

  std::vector<Clause> clauses_;
  std::map<std::string, std::size_t> arity_;
};

/// Equality of programs as sets of clauses.
inline bool same_clauses(const Program& a, const Program& b) {
  std::set<Clause> x(a.clauses().begin(), a.clauses().end());
  std::set<Clause> y(b.clauses().begin(), b.clauses().end());
  return x == y;
}

inline std::string to_string(const Clause& c) {
  std::string out = to_string(c.head);
  if (c.is_fact()) return out + ".";
  out += " :- ";
  bool first = true;
  for (const auto& a : c.positive) {
    if (!first) out += ", ";
    out += to_string(a);
    first = false;
  }
  for (const auto& a : c.negative) {
    if (!first) out += ", ";
    out += "not " + to_string(a);
    first = false;
  }
  return out + ".";
}

inline std::string print_datalog(const Program& p) {
  std::string out;
  for (const auto& c : p.clauses()) out += to_string(c) + "\n";
  return out;
}

namespace detail {

class DatalogReader {
public:
  explicit DatalogReader(std::string_view text) : toks_(Lexer(text).tokenize()) {}

  Program run() {
    Program p;
    while (peek().kind != Tok::End) p.add(clause());
    return p;
  }

private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void fail(std::string expected,
                         DatalogSyntaxError::Kind kind = DatalogSyntaxError::Kind::Syntax) const {
    throw DatalogSyntaxError(kind, {peek().loc, std::move(expected), describe(peek())});
  }

  Clause clause() {
    Clause c;
    c.head = atom();
    if (peek().kind == Tok::Arrow) {
      if (peek().text != ":-") fail("':-' or '.'");
      next();
      body_literal(c);
      while (peek().kind == Tok::Comma) {
        next();
        body_literal(c);
      }
    }
    if (peek().kind != Tok::Dot) fail("',' or '.'");
    next();
    return c;
  }

  void body_literal(Clause& c) {
    if (peek().kind == Tok::Ident && peek().text == "not" && peek(1).kind == Tok::Ident) {
      next();
      c.negative.push_back(atom());
    } else {
      c.positive.push_back(atom());
    }
  }

  Atom atom() {
    if (peek().kind != Tok::Ident) fail("predicate name");
    Atom a{next().text, {}};
    if (peek().kind == Tok::LParen) {
      next();
      a.args.push_back(term());
      while (peek().kind == Tok::Comma) {
        next();
        a.args.push_back(term());
      }
      if (peek().kind != Tok::RParen) fail("',' or ')'");
      next();
    }
    return a;
  }

  Term term() {
    if (peek().kind == Tok::Variable) return Term::variable(next().text);
    if (peek().kind == Tok::Ident) {
      Term t = Term::constant(next().text);
      if (peek().kind == Tok::LParen)
        fail("',' or ')' (function symbols are not allowed)", DatalogSyntaxError::Kind::FunctionSymbol);
      return t;
    }
    fail("variable or constant");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Reads "head :- lit, ..., not lit." clauses and "head." facts; '%' comments.
/// Throws DatalogSyntaxError or ArityConflict.
inline Program parse_datalog(std::string_view text) { return detail::DatalogReader(text).run(); }

}  // namespace defeasidl
