#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "defeasidl/defeasidl.hpp"

namespace testing_support {

using namespace defeasidl;

inline std::string data_path(const std::string& name) { return std::string(DEFEASIDL_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Theory theory_from(std::string_view text) {
  auto r = parse_theory(text);
  if (!r.ok()) throw std::runtime_error("parse failed: " + r.errors().front().message());
  return r.theory();
}

inline Theory data_theory(const std::string& name) { return theory_from(slurp(data_path(name))); }

/// "fly(tweety)" or "neg fly(tweety)" parsed through a one-fact theory.
inline Literal lit(const std::string& text) { return *theory_from(text + ".").facts.begin(); }

inline LiteralSet lits(std::initializer_list<const char*> texts) {
  LiteralSet out;
  for (const char* t : texts) out.insert(lit(t));
  return out;
}

inline Atom atom(const std::string& text) { return lit(text).atom; }

/// Tweety theory with every predicate and constant suffixed by `_k`.
inline Theory renamed_tweety(std::size_t k) {
  std::string s = std::to_string(k);
  return theory_from("r1_" + s + ": bird_" + s + "(X) => fly_" + s + "(X).\n" +
                     "r2_" + s + ": penguin_" + s + "(X) => neg fly_" + s + "(X).\n" +
                     "r3_" + s + ": penguin_" + s + "(X) -> bird_" + s + "(X).\n" +
                     "r4_" + s + ": injured_" + s + "(X) ~> neg fly_" + s + "(X).\n" +
                     "penguin_" + s + "(tweety_" + s + ").\n" +
                     "bird_" + s + "(freddie_" + s + ").\n" +
                     "injured_" + s + "(freddie_" + s + ").\n" +
                     "r2_" + s + " > r1_" + s + ".\n");
}

/// Disjoint union of D_1 .. D_k.
inline Theory replicated_tweety(std::size_t k) {
  Theory out;
  for (std::size_t i = 1; i <= k; ++i) {
    Theory t = renamed_tweety(i);
    out.facts.insert(t.facts.begin(), t.facts.end());
    out.rules.insert(out.rules.end(), t.rules.begin(), t.rules.end());
    out.superiority.insert(t.superiority.begin(), t.superiority.end());
  }
  return out;
}

}  // namespace testing_support
