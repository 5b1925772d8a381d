#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "geodd/formal_lang.hpp"
#include "geodd/rational.hpp"
#include "geodd/statement.hpp"

namespace geodd {

using PointId = std::uint8_t;

// A statement over point indices.
struct Atom {
  Predicate pred = Predicate::coll;
  std::array<PointId, kMaxArity> a{};
  Rational lit{};

  std::size_t size() const { return arity(pred); }
  friend bool operator==(const Atom&, const Atom&) = default;
  friend bool operator<(const Atom& x, const Atom& y) {
    if (x.pred != y.pred) return x.pred < y.pred;
    if (x.a != y.a) return x.a < y.a;
    return x.lit < y.lit;
  }
};

struct AtomHash {
  std::size_t operator()(const Atom& t) const {
    std::uint64_t h = static_cast<std::uint64_t>(t.pred) * 0x9E3779B97F4A7C15ull;
    for (auto v : t.a) h = (h ^ v) * 0x100000001B3ull;
    h ^= std::hash<Rational>{}(t.lit) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

Atom canonical(const Atom& t);

// Calls f(variant) for every symmetry of t (duplicates possible).
template <class F>
void for_each_variant(const Atom& t, F&& f) {
  const std::size_t n = t.size();
  for (const auto& s : symmetries(t.pred)) {
    Atom v;
    v.pred = t.pred;
    for (std::size_t i = 0; i < n; ++i) v.a[i] = t.a[s.perm[i]];
    v.lit = apply_literal_op(s.op, t.lit);
    f(v);
  }
}

// Sorted, duplicate-free fact ids.
using DepSet = std::vector<FactId>;
void merge_into(DepSet& into, const DepSet& from);

// Union-find over an abelian group of offsets with a proof forest.
// val(x) = val(root) + pot(x); merge(x, y, d) records val(x) - val(y) = d.
template <class G>
class WeightedUF {
 public:
  using V = typename G::V;

  int add() {
    int id = static_cast<int>(parent_.size());
    parent_.push_back(id);
    pot_.push_back(G::zero());
    size_.push_back(1);
    adj_.emplace_back();
    return id;
  }
  void resize(int n) {
    while (static_cast<int>(parent_.size()) < n) add();
  }
  int size() const { return static_cast<int>(parent_.size()); }

  int find(int x) const {
    int r = x;
    V acc = G::zero();
    while (parent_[r] != r) {
      acc = G::add(acc, pot_[r]);
      r = parent_[r];
    }
    // Path compression.
    V rest = acc;
    int y = x;
    while (parent_[y] != y) {
      int next = parent_[y];
      V p = pot_[y];
      parent_[y] = r;
      pot_[y] = rest;
      rest = G::sub(rest, p);
      y = next;
    }
    return r;
  }
  // val(x) - val(root(x)).
  V pot(int x) const {
    find(x);
    return parent_[x] == x ? G::zero() : pot_[x];
  }
  bool same(int x, int y) const { return find(x) == find(y); }
  // val(x) - val(y); only meaningful when same(x, y).
  V rel(int x, int y) const { return G::sub(pot(x), pot(y)); }

  // Returns false (and records nothing) when x and y are already joined.
  bool merge(int x, int y, V d, int label) {
    int rx = find(x), ry = find(y);
    if (rx == ry) return false;
    V w = G::add(G::sub(d, pot(x)), pot(y));  // val(rx) - val(ry)
    if (size_[rx] > size_[ry]) {
      std::swap(rx, ry);
      w = G::neg(w);
    }
    parent_[rx] = ry;
    pot_[rx] = w;
    size_[ry] += size_[rx];
    adj_[x].push_back({y, label});
    adj_[y].push_back({x, label});
    return true;
  }

  // Labels along the proof-forest path between two joined nodes.
  std::vector<int> path(int x, int y) const {
    if (x == y) return {};
    std::vector<int> prev(parent_.size(), -1), via(parent_.size(), -1);
    std::vector<int> queue{x};
    prev[x] = x;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      int u = queue[h];
      if (u == y) break;
      for (const auto& [v, lab] : adj_[u]) {
        if (prev[v] != -1) continue;
        prev[v] = u;
        via[v] = lab;
        queue.push_back(v);
      }
    }
    std::vector<int> out;
    if (prev[y] == -1) return out;
    for (int v = y; v != x; v = prev[v]) out.push_back(via[v]);
    return out;
  }

 private:
  mutable std::vector<int> parent_;
  mutable std::vector<V> pot_;
  std::vector<int> size_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

// Angles are measured in units of pi, modulo 1.
struct AngleGroup {
  using V = Rational;
  static V zero() { return Rational(0); }
  static V add(V a, V b) { return (a + b).mod(Rational(1)); }
  static V sub(V a, V b) { return (a - b).mod(Rational(1)); }
  static V neg(V a) { return (-a).mod(Rational(1)); }
};

struct RatioGroup {
  using V = Rational;
  static V zero() { return Rational(1); }
  static V add(V a, V b) { return a * b; }
  static V sub(V a, V b) { return a / b; }
  static V neg(V a) { return Rational(1) / a; }
};

// Equivalence structures built from a fact list: directions of lines, angle
// terms between direction classes, segment lengths and length-ratio terms.
// Rebuilt from scratch; feedback from the angle and ratio layers is iterated
// until no new direction or length merge appears.
class Symbolic {
 public:
  explicit Symbolic(int points);

  void build(std::span<const std::pair<FactId, Atom>> facts);

  bool holds(const Atom& t) const;
  // Dependencies of a symbolic derivation, or nullopt.
  std::optional<DepSet> explain(const Atom& t) const;
  // Id of a stored fact with the same canonical form.
  std::optional<FactId> lookup(const Atom& t) const;

  int points() const { return n_; }

 private:
  bool check(const Atom& t, DepSet* out) const;
  int line(int i, int j) const { return i < j ? i * n_ + j : j * n_ + i; }
  void build_directions(std::span<const std::pair<FactId, Atom>> facts);
  void build_angles(std::span<const std::pair<FactId, Atom>> facts);
  void build_lengths(std::span<const std::pair<FactId, Atom>> facts);
  void build_ratios(std::span<const std::pair<FactId, Atom>> facts);
  bool angle_feedback();
  bool coll_feedback();
  bool ratio_feedback();

  int angle_term(int r1, int r2, bool create);
  int ratio_term(int r1, int r2, bool create);
  int label(DepSet deps);
  void collect(const std::vector<int>& labels, DepSet& out) const;
  DepSet line_expl(int l) const;
  DepSet seg_expl(int s) const;

  int n_;
  std::vector<DepSet> labels_;
  WeightedUF<AngleGroup> dir_;
  WeightedUF<AngleGroup> ang_;
  WeightedUF<RatioGroup> len_;
  WeightedUF<RatioGroup> rat_;
  std::unordered_map<std::uint32_t, int> ang_terms_;
  std::unordered_map<std::uint32_t, int> rat_terms_;
  std::vector<std::pair<int, int>> ang_keys_;  // node -> (r1, r2)
  std::vector<std::pair<int, int>> rat_keys_;
  struct Derived {
    int x, y;
    Rational d;
    DepSet deps;
  };
  std::vector<Derived> dir_derived_;
  std::vector<Derived> len_derived_;
  std::unordered_map<Atom, FactId, AtomHash> explicit_;
};

// Greedily drops dependencies that are not needed to derive `t` symbolically.
DepSet minimize_deps(const Atom& t, DepSet deps, int points,
                     const std::function<const Atom&(FactId)>& atom_of);

// Chain rule name for a symbolically derived statement.
const char* chain_rule(Predicate p);

}  // namespace geodd
