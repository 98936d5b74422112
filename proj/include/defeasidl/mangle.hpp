#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "theory.hpp"

namespace defeasidl {

/// Reserved separator joining the components of a compiled predicate name.
inline constexpr std::string_view kManglingSeparator = "__";

enum class Tag { Definitely, Lambda, Defeasibly, Overruled, Defeated, Defeats };

enum class BodyFlavor { Delta, Lambda, Defeasible };

inline std::string_view tag_name(Tag tag) {
  switch (tag) {
    case Tag::Definitely: return "definitely";
    case Tag::Lambda: return "lambda";
    case Tag::Defeasibly: return "defeasibly";
    case Tag::Overruled: return "overruled";
    case Tag::Defeated: return "defeated";
    case Tag::Defeats: return "defeats";
  }
  return "?";
}

inline std::string_view flavor_name(BodyFlavor f) {
  switch (f) {
    case BodyFlavor::Delta: return "delta";
    case BodyFlavor::Lambda: return "lam";
    case BodyFlavor::Defeasible: return "d";
  }
  return "?";
}

/// A compiled predicate: either a tag applied to a source predicate with a
/// polarity, or a rule body predicate of some flavor.
struct MangledPredicate {
  enum class Kind { Literal, Body };

  Kind kind = Kind::Literal;
  Tag tag = Tag::Definitely;
  std::string predicate;
  Polarity polarity = Polarity::Positive;
  std::string label;
  BodyFlavor flavor = BodyFlavor::Delta;

  static MangledPredicate literal(Tag tag, std::string pred, Polarity pol) {
    MangledPredicate m;
    m.kind = Kind::Literal;
    m.tag = tag;
    m.predicate = std::move(pred);
    m.polarity = pol;
    return m;
  }

  static MangledPredicate body(std::string label, BodyFlavor flavor) {
    MangledPredicate m;
    m.kind = Kind::Body;
    m.label = std::move(label);
    m.flavor = flavor;
    return m;
  }

  bool is_body() const { return kind == Kind::Body; }

  std::string name() const {
    std::string sep(kManglingSeparator);
    if (is_body()) return "body" + sep + label + sep + std::string(flavor_name(flavor));
    std::string out(tag_name(tag));
    out += sep;
    if (polarity == Polarity::Negative) out += "not" + sep;
    return out + predicate;
  }

  /// Human-readable origin, used in diagnostics.
  std::string describe() const {
    if (is_body())
      return "body predicate (" + std::string(flavor_name(flavor)) + ") of rule " + label;
    return std::string(tag_name(tag)) + " of " +
           (polarity == Polarity::Negative ? "neg " : "") + predicate;
  }

  bool operator==(const MangledPredicate& o) const { return name() == o.name(); }
};

inline std::string mangle(Tag tag, const Literal& lit) {
  return MangledPredicate::literal(tag, lit.predicate(), lit.polarity).name();
}

inline std::string mangle_body(const std::string& label, BodyFlavor flavor) {
  return MangledPredicate::body(label, flavor).name();
}

struct ManglingCollision {
  std::string name;
  std::string first;
  std::string second;
};

/// Pairs of distinct sources (predicate/polarity/tag or rule label/flavor)
/// whose compiled names coincide.
inline std::vector<ManglingCollision> mangling_collisions(const Theory& theory) {
  std::set<std::string> preds;
  for (const auto& f : theory.facts) preds.insert(f.predicate());
  std::set<std::string> labels;
  for (const auto& r : theory.rules) {
    labels.insert(r.label);
    preds.insert(r.head.predicate());
    for (const auto& l : r.body) preds.insert(l.predicate());
  }

  std::map<std::string, std::string> owner;
  std::vector<ManglingCollision> out;
  auto claim = [&](const MangledPredicate& m) {
    auto name = m.name();
    auto desc = m.describe();
    auto [it, fresh] = owner.emplace(name, desc);
    if (!fresh && it->second != desc) out.push_back({name, it->second, desc});
  };

  constexpr Tag tags[] = {Tag::Definitely, Tag::Lambda,   Tag::Defeasibly,
                          Tag::Overruled,  Tag::Defeated, Tag::Defeats};
  for (const auto& p : preds)
    for (auto pol : {Polarity::Positive, Polarity::Negative})
      for (auto tag : tags) claim(MangledPredicate::literal(tag, p, pol));
  for (const auto& l : labels)
    for (auto f : {BodyFlavor::Delta, BodyFlavor::Lambda, BodyFlavor::Defeasible})
      claim(MangledPredicate::body(l, f));
  return out;
}

}  // namespace defeasidl
