#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "theory.hpp"

namespace defeasidl {

struct SourceLocation {
  std::size_t line = 1;
  std::size_t column = 1;

  bool operator==(const SourceLocation&) const = default;
};

struct ParseError {
  SourceLocation location;
  std::string expected;
  std::string found;

  std::string message() const {
    return std::to_string(location.line) + ":" + std::to_string(location.column) +
           ": expected " + expected + ", found " + found;
  }
};

/// Either a theory or the errors that prevented building one.
class ParseResult {
public:
  ParseResult(Theory t) : value_(std::move(t)) {}
  ParseResult(std::vector<ParseError> e) : value_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<Theory>(value_); }
  explicit operator bool() const { return ok(); }

  const Theory& theory() const { return std::get<Theory>(value_); }
  Theory& theory() { return std::get<Theory>(value_); }
  const std::vector<ParseError>& errors() const {
    static const std::vector<ParseError> none;
    return ok() ? none : std::get<std::vector<ParseError>>(value_);
  }

private:
  std::variant<Theory, std::vector<ParseError>> value_;
};

namespace detail {

enum class Tok { Ident, Variable, LParen, RParen, Comma, Dot, Colon, Greater, Arrow, End, Invalid };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLocation loc;
  RuleKind arrow = RuleKind::Defeasible;
};

inline std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Invalid: return "invalid character '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

/// Tokenizer shared by the theory and Datalog readers. '%' starts a comment.
class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (is_ident_start(c) || (c >= 'A' && c <= 'Z')) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        t.kind = (c >= 'A' && c <= 'Z') ? Tok::Variable : Tok::Ident;
      } else if ((c == '-' || c == '=' || c == '~') && peek(1) == '>') {
        t.kind = Tok::Arrow;
        t.text = std::string{c, '>'};
        t.arrow = c == '-' ? RuleKind::Strict : c == '=' ? RuleKind::Defeasible : RuleKind::Defeater;
        advance();
        advance();
      } else if (c == ':' && peek(1) == '-') {
        t.kind = Tok::Arrow;  // Datalog neck; the theory grammar rejects it
        t.text = ":-";
        advance();
        advance();
      } else {
        t.text = std::string(1, c);
        switch (c) {
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case ',': t.kind = Tok::Comma; break;
          case '.': t.kind = Tok::Dot; break;
          case ':': t.kind = Tok::Colon; break;
          case '>': t.kind = Tok::Greater; break;
          default:
            t.kind = Tok::Invalid;
            if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f) {
              char buf[8];
              std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned char>(c));
              t.text = buf;
            }
        }
        advance();
      }
      out.push_back(std::move(t));
    }
  }

private:
  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

  char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct SyntaxError {
  ParseError error;
};

class TheoryReader {
public:
  explicit TheoryReader(std::string_view text) : toks_(Lexer(text).tokenize()) {}

  ParseResult run() {
    Theory theory;
    while (peek().kind != Tok::End) {
      try {
        statement(theory);
      } catch (const SyntaxError& e) {
        errors_.push_back(e.error);
        recover();
      }
    }
    if (!errors_.empty()) return ParseResult(std::move(errors_));
    return ParseResult(std::move(theory));
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

  [[noreturn]] void fail(std::string expected) const {
    throw SyntaxError{{peek().loc, std::move(expected), describe(peek())}};
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(what);
    return next();
  }

  void recover() {
    while (peek().kind != Tok::End && peek().kind != Tok::Dot) next();
    if (peek().kind == Tok::Dot) next();
  }

  void statement(Theory& theory) {
    if (peek().kind == Tok::Ident && peek().text != "neg" && peek(1).kind == Tok::Colon) {
      std::string label = next().text;
      next();
      labelled(theory, std::move(label));
      return;
    }
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Greater) {
      std::string t = next().text;
      next();
      std::string s = expect(Tok::Ident, "rule label").text;
      expect(Tok::Dot, "'.'");
      theory.superiority.insert({std::move(t), std::move(s)});
      return;
    }
    Literal fact = literal();
    if (peek().kind == Tok::Arrow) fail("'.' (rules need a label)");
    expect(Tok::Dot, "'.'");
    theory.facts.insert(std::move(fact));
  }

  void labelled(Theory& theory, std::string label) {
    std::vector<Literal> body;
    if (peek().kind != Tok::Arrow) {
      body.push_back(literal());
      while (peek().kind == Tok::Comma) {
        next();
        body.push_back(literal());
      }
      if (peek().kind == Tok::Dot && body.size() == 1) {
        next();
        theory.facts.insert(std::move(body.front()));  // fact labels are discarded
        return;
      }
    }
    if (peek().kind != Tok::Arrow || peek().text == ":-") fail("'->', '=>', '~>' or ','");
    RuleKind kind = next().arrow;
    Literal head = literal();
    expect(Tok::Dot, "'.'");
    theory.rules.push_back({std::move(label), std::move(body), std::move(head), kind});
  }

  Literal literal() {
    Polarity pol = Polarity::Positive;
    if (peek().kind == Tok::Ident && peek().text == "neg") {
      next();
      pol = Polarity::Negative;
    }
    if (peek().kind != Tok::Ident || peek().text == "neg") fail("predicate name");
    Atom atom{next().text, {}};
    if (peek().kind == Tok::LParen) {
      next();
      atom.args.push_back(term());
      while (peek().kind == Tok::Comma) {
        next();
        atom.args.push_back(term());
      }
      expect(Tok::RParen, "',' or ')'");
    }
    return {std::move(atom), pol};
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Tok::Variable) return Term::variable(next().text);
    if (t.kind == Tok::Ident) {
      Term c = Term::constant(next().text);
      if (peek().kind == Tok::LParen) fail("',' or ')' (function symbols are not supported)");
      return c;
    }
    fail("variable or constant");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<ParseError> errors_;
};

}  // namespace detail

/// Reads the textual theory format:
///
///     % comment
///     penguin(tweety).                  fact (an optional "label:" is ignored)
///     r1: bird(X) => fly(X).            defeasible rule
///     r2: penguin(X) => neg fly(X).     classical negation is "neg"
///     r3: penguin(X) -> bird(X).        strict rule
///     r4: injured(X) ~> neg fly(X).     defeater
///     r5: => p.                         empty body
///     r2 > r1.                          superiority
inline ParseResult parse_theory(std::string_view text) {
  return detail::TheoryReader(text).run();
}

/// One statement per line: facts, then rules in order, then superiority.
inline std::string format_theory(const Theory& theory) {
  std::string out;
  for (const auto& f : theory.facts) out += to_string(f) + ".\n";
  for (const auto& r : theory.rules) out += to_string(r) + "\n";
  for (const auto& [t, s] : theory.superiority) out += t + " > " + s + ".\n";
  return out;
}

}  // namespace defeasidl
