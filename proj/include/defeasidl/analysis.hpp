#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "datalog.hpp"

namespace defeasidl {

struct DependencyEdge {
  std::string from;
  std::string to;
  int sign = +1;

  auto operator<=>(const DependencyEdge&) const = default;
  bool operator==(const DependencyEdge&) const = default;
};

/// Predicate-level dependency graph: head depends on body with sign +1
/// (positive literal) or -1 (negative literal).
struct DependencyGraph {
  std::set<std::string> nodes;
  std::set<DependencyEdge> edges;

  std::map<std::string, std::vector<std::pair<std::string, int>>> adjacency() const {
    std::map<std::string, std::vector<std::pair<std::string, int>>> adj;
    for (const auto& n : nodes) adj[n];
    for (const auto& e : edges) adj[e.from].push_back({e.to, e.sign});
    return adj;
  }

  bool has_edge(const std::string& from, const std::string& to, int sign) const {
    return edges.count({from, to, sign}) > 0;
  }
};

inline DependencyGraph dependency_graph(const Program& program) {
  DependencyGraph g;
  g.nodes = program.predicates();
  for (const auto& c : program.clauses()) {
    for (const auto& a : c.positive) g.edges.insert({c.head.predicate, a.predicate, +1});
    for (const auto& a : c.negative) g.edges.insert({c.head.predicate, a.predicate, -1});
  }
  return g;
}

namespace detail {

/// Strongly connected components; component ids are a reverse topological
/// order (a node's dependencies get ids no larger than its own).
inline std::map<std::string, std::size_t> strongly_connected(const DependencyGraph& g) {
  auto adj = g.adjacency();
  std::map<std::string, std::size_t> index, low, comp;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;
  std::size_t counter = 0, ncomp = 0;

  struct Frame {
    std::string node;
    std::size_t next;
  };

  for (const auto& root : g.nodes) {
    if (index.count(root)) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack.insert(root);
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& out = adj[f.node];
      if (f.next < out.size()) {
        const std::string& w = out[f.next++].first;
        if (!index.count(w)) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack.insert(w);
          call.push_back({w, 0});
        } else if (on_stack.count(w)) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      std::string v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        for (;;) {
          std::string w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          comp[w] = ncomp;
          if (w == v) break;
        }
        ++ncomp;
      }
    }
  }
  return comp;
}

/// Pairs (q, parity) reachable from p by a path of at least one edge;
/// parity 1 means an odd number of negative edges.
inline std::set<std::pair<std::string, int>> parity_reach(
    const std::map<std::string, std::vector<std::pair<std::string, int>>>& adj,
    const std::string& p) {
  std::set<std::pair<std::string, int>> seen;
  std::vector<std::pair<std::string, int>> work;
  auto push = [&](const std::string& from, int parity) {
    auto it = adj.find(from);
    if (it == adj.end()) return;
    for (const auto& [to, sign] : it->second) {
      std::pair<std::string, int> s{to, parity ^ (sign < 0 ? 1 : 0)};
      if (seen.insert(s).second) work.push_back(s);
    }
  };
  push(p, 0);
  while (!work.empty()) {
    auto [q, parity] = work.back();
    work.pop_back();
    push(q, parity);
  }
  return seen;
}

}  // namespace detail

/// Stratum per predicate with m(head) >= m(positive body) and
/// m(head) > m(negative body), or nothing when a recursive component
/// contains a negative edge. Strata are as low as possible.
inline std::optional<std::map<std::string, std::size_t>> stratify(const DependencyGraph& g) {
  auto comp = detail::strongly_connected(g);
  for (const auto& e : g.edges)
    if (e.sign < 0 && comp.at(e.from) == comp.at(e.to)) return std::nullopt;

  std::size_t ncomp = 0;
  for (const auto& [n, c] : comp) ncomp = std::max(ncomp, c + 1);
  std::vector<std::vector<const DependencyEdge*>> out(ncomp);
  for (const auto& e : g.edges) out[comp.at(e.from)].push_back(&e);

  // components are numbered dependencies-first
  std::vector<std::size_t> level(ncomp, 0);
  for (std::size_t c = 0; c < ncomp; ++c)
    for (const auto* e : out[c]) {
      std::size_t d = comp.at(e->to);
      if (d == c) continue;
      level[c] = std::max(level[c], level[d] + (e->sign < 0 ? 1 : 0));
    }

  std::map<std::string, std::size_t> m;
  for (const auto& n : g.nodes) m[n] = level[comp.at(n)];
  return m;
}

inline std::optional<std::map<std::string, std::size_t>> stratify(const Program& program) {
  return stratify(dependency_graph(program));
}

inline bool is_stratified(const Program& program) { return stratify(program).has_value(); }

/// True iff no predicate depends on itself through an odd number of negations.
inline bool is_call_consistent(const DependencyGraph& g) {
  auto adj = g.adjacency();
  for (const auto& p : g.nodes)
    if (detail::parity_reach(adj, p).count({p, 1})) return false;
  return true;
}

inline bool is_call_consistent(const Program& program) {
  return is_call_consistent(dependency_graph(program));
}

struct Signing {
  std::set<std::string> scope;
  std::map<std::string, int> sign;

  int operator()(const std::string& p) const { return sign.at(p); }
  bool operator==(const Signing&) const = default;

  Signing inverted() const {
    Signing s = *this;
    for (auto& [p, v] : s.sign) v = -v;
    return s;
  }
};

/// A signing of `scope`: for p, q in scope with q depending on p through
/// i-parity paths, s(p) = s(q) * i. Each group of linked predicates is
/// oriented so that its least `prefer`red member gets the preferred sign,
/// or, without preferences in the group, its least member gets +1.
inline std::optional<Signing> compute_signing(const DependencyGraph& g,
                                              const std::set<std::string>& scope,
                                              const std::map<std::string, int>& prefer = {}) {
  auto adj = g.adjacency();

  // union-find with parity relative to the parent
  std::map<std::string, std::string> parent;
  std::map<std::string, int> rel;
  for (const auto& p : scope) {
    parent[p] = p;
    rel[p] = 0;
  }
  auto find = [&](std::string p) {
    int parity = 0;
    while (parent[p] != p) {
      parity ^= rel[p];
      p = parent[p];
    }
    return std::pair{p, parity};
  };

  for (const auto& p : scope) {
    for (const auto& [q, parity] : detail::parity_reach(adj, p)) {
      if (!scope.count(q)) continue;
      auto [rp, pp] = find(p);
      auto [rq, pq] = find(q);
      if (rp == rq) {
        if ((pp ^ pq) != parity) return std::nullopt;
        continue;
      }
      parent[rq] = rp;
      rel[rq] = pp ^ pq ^ parity;
    }
  }

  std::map<std::string, std::vector<std::pair<std::string, int>>> groups;
  for (const auto& p : scope) {
    auto [root, parity] = find(p);
    groups[root].push_back({p, parity});
  }

  Signing s;
  s.scope = scope;
  for (const auto& [root, members] : groups) {
    auto anchor = members.front();
    int anchor_sign = +1;
    for (const auto& m : members) {
      auto it = prefer.find(m.first);
      if (it != prefer.end()) {
        anchor = m;
        anchor_sign = it->second < 0 ? -1 : +1;
        break;
      }
    }
    int base = anchor.second ? -anchor_sign : anchor_sign;
    for (const auto& [m, parity] : members) s.sign[m] = parity ? -base : base;
  }
  return s;
}

inline std::optional<Signing> compute_signing(const Program& program,
                                              const std::set<std::string>& scope,
                                              const std::map<std::string, int>& prefer = {}) {
  return compute_signing(dependency_graph(program), scope, prefer);
}

/// True iff every pair of scope predicates related by dependency satisfies
/// the signing constraint.
inline bool is_signing(const DependencyGraph& g, const Signing& s) {
  auto adj = g.adjacency();
  for (const auto& p : s.scope)
    for (const auto& [q, parity] : detail::parity_reach(adj, p))
      if (s.scope.count(q) && s.sign.at(q) != s.sign.at(p) * (parity ? -1 : 1)) return false;
  return true;
}

namespace detail {

inline void collect_variables(const Atom& a, std::set<std::string>& out) {
  for (const auto& t : a.args)
    if (t.is_variable()) out.insert(t.name);
}

inline std::set<std::string> positive_variables(const Clause& c) {
  std::set<std::string> v;
  for (const auto& a : c.positive) collect_variables(a, v);
  return v;
}

inline bool covered(const Atom& a, const std::set<std::string>& bound) {
  for (const auto& t : a.args)
    if (t.is_variable() && !bound.count(t.name)) return false;
  return true;
}

}  // namespace detail

/// Every head variable occurs in a positive body literal.
inline bool is_range_restricted(const Clause& c) {
  return detail::covered(c.head, detail::positive_variables(c));
}

/// Every variable of a negative body literal occurs in a positive body literal.
inline bool is_negation_safe(const Clause& c) {
  auto bound = detail::positive_variables(c);
  for (const auto& a : c.negative)
    if (!detail::covered(a, bound)) return false;
  return true;
}

inline bool is_safe(const Clause& c) { return is_range_restricted(c) && is_negation_safe(c); }

inline bool is_range_restricted(const Program& p) {
  return std::all_of(p.clauses().begin(), p.clauses().end(),
                     [](const Clause& c) { return is_range_restricted(c); });
}

inline bool is_negation_safe(const Program& p) {
  return std::all_of(p.clauses().begin(), p.clauses().end(),
                     [](const Clause& c) { return is_negation_safe(c); });
}

inline bool is_safe(const Program& p) {
  return std::all_of(p.clauses().begin(), p.clauses().end(),
                     [](const Clause& c) { return is_safe(c); });
}

}  // namespace defeasidl
