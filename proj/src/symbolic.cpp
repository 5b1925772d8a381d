#include "geodd/symbolic.hpp"

#include <algorithm>
#include <map>

namespace geodd {

Atom canonical(const Atom& t) {
  Atom best = t;
  bool first = true;
  for_each_variant(t, [&](const Atom& v) {
    if (first || v.a < best.a || (v.a == best.a && v.lit < best.lit)) best = v;
    first = false;
  });
  return best;
}

void merge_into(DepSet& into, const DepSet& from) {
  if (from.empty()) return;
  DepSet out;
  out.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into.swap(out);
}

const char* chain_rule(Predicate p) {
  switch (p) {
    case Predicate::cong:
    case Predicate::rconst:
    case Predicate::eqratio:
      return "a00";
    default:
      return "a01";
  }
}

namespace {

std::uint32_t pair_key(int a, int b) {
  return static_cast<std::uint32_t>(a) << 16 | static_cast<std::uint32_t>(b);
}

}  // namespace

Symbolic::Symbolic(int points) : n_(points) {}

int Symbolic::label(DepSet deps) {
  labels_.push_back(std::move(deps));
  return static_cast<int>(labels_.size()) - 1;
}

void Symbolic::collect(const std::vector<int>& labels, DepSet& out) const {
  for (int l : labels) merge_into(out, labels_[static_cast<std::size_t>(l)]);
}

DepSet Symbolic::line_expl(int l) const {
  DepSet out;
  collect(dir_.path(l, dir_.find(l)), out);
  return out;
}

DepSet Symbolic::seg_expl(int s) const {
  DepSet out;
  collect(len_.path(s, len_.find(s)), out);
  return out;
}

void Symbolic::build(std::span<const std::pair<FactId, Atom>> facts) {
  labels_.clear();
  explicit_.clear();
  for (const auto& [id, t] : facts) explicit_.emplace(canonical(t), id);
  dir_derived_.clear();
  len_derived_.clear();
  while (true) {
    build_directions(facts);
    build_angles(facts);
    bool more = angle_feedback();
    if (!(coll_feedback() || more)) break;
  }
  while (true) {
    build_lengths(facts);
    build_ratios(facts);
    if (!ratio_feedback()) break;
  }
}

void Symbolic::build_directions(std::span<const std::pair<FactId, Atom>> facts) {
  dir_ = {};
  dir_.resize(n_ * n_);
  for (const auto& [id, t] : facts) {
    const auto& a = t.a;
    switch (t.pred) {
      case Predicate::coll: {
        if (a[0] == a[1] || a[0] == a[2] || a[1] == a[2]) break;
        int lab = label({id});
        dir_.merge(line(a[0], a[1]), line(a[0], a[2]), Rational(0), lab);
        dir_.merge(line(a[0], a[1]), line(a[1], a[2]), Rational(0), lab);
        break;
      }
      case Predicate::para:
      case Predicate::perp:
      case Predicate::aconst: {
        if (a[0] == a[1] || a[2] == a[3]) break;
        Rational d = t.pred == Predicate::para   ? Rational(0)
                     : t.pred == Predicate::perp ? Rational(1, 2)
                                                 : (t.lit / Rational(180)).mod(Rational(1));
        dir_.merge(line(a[2], a[3]), line(a[0], a[1]), d, label({id}));
        break;
      }
      default:
        break;
    }
  }
  for (const auto& m : dir_derived_) dir_.merge(m.x, m.y, m.d, label(m.deps));
}

int Symbolic::angle_term(int r1, int r2, bool create) {
  if (r1 == r2) return 0;
  auto it = ang_terms_.find(pair_key(r1, r2));
  if (it != ang_terms_.end()) return it->second;
  if (!create) return -1;
  for (auto [x, y] : {std::pair{r1, r2}, std::pair{r2, r1}}) {
    ang_terms_[pair_key(x, y)] = ang_.add();
    ang_keys_.push_back({x, y});
  }
  return ang_terms_[pair_key(r1, r2)];
}

int Symbolic::ratio_term(int r1, int r2, bool create) {
  if (r1 == r2) return 0;
  auto it = rat_terms_.find(pair_key(r1, r2));
  if (it != rat_terms_.end()) return it->second;
  if (!create) return -1;
  for (auto [x, y] : {std::pair{r1, r2}, std::pair{r2, r1}}) {
    rat_terms_[pair_key(x, y)] = rat_.add();
    rat_keys_.push_back({x, y});
  }
  return rat_terms_[pair_key(r1, r2)];
}

void Symbolic::build_angles(std::span<const std::pair<FactId, Atom>> facts) {
  ang_ = {};
  ang_terms_.clear();
  ang_keys_.clear();
  ang_.add();  // constant node
  ang_keys_.push_back({-1, -1});
  auto mirror = [&](int node) {
    if (node == 0) return 0;
    auto [x, y] = ang_keys_[static_cast<std::size_t>(node)];
    return ang_terms_.at(pair_key(y, x));
  };
  for (const auto& [id, t] : facts) {
    if (t.pred != Predicate::eqangle) continue;
    const auto& a = t.a;
    if (a[0] == a[1] || a[2] == a[3] || a[4] == a[5] || a[6] == a[7]) continue;
    int l[4] = {line(a[0], a[1]), line(a[2], a[3]), line(a[4], a[5]), line(a[6], a[7])};
    int r[4];
    Rational o[4];
    DepSet deps{id};
    for (int k = 0; k < 4; ++k) {
      r[k] = dir_.find(l[k]);
      o[k] = dir_.pot(l[k]);
      merge_into(deps, line_expl(l[k]));
    }
    int n1 = angle_term(r[0], r[1], true);
    int n2 = angle_term(r[2], r[3], true);
    Rational o1 = AngleGroup::sub(o[1], o[0]);
    Rational o2 = AngleGroup::sub(o[3], o[2]);
    int lab = label(std::move(deps));
    ang_.merge(n1, n2, AngleGroup::sub(o2, o1), lab);
    ang_.merge(mirror(n1), mirror(n2), AngleGroup::sub(o1, o2), lab);
  }
}

bool Symbolic::angle_feedback() {
  WeightedUF<AngleGroup> scratch = dir_;
  bool changed = false;
  std::map<std::pair<int, int>, int> first;
  auto propose = [&](int x, int y, Rational d, const std::vector<int>& path) {
    if (!scratch.merge(x, y, d, -1)) return;
    DepSet deps;
    collect(path, deps);
    dir_derived_.push_back({x, y, d, std::move(deps)});
    changed = true;
  };
  for (int t = 1; t < ang_.size(); ++t) {
    auto [r1, r2] = ang_keys_[static_cast<std::size_t>(t)];
    if (ang_.same(t, 0)) {
      propose(r2, r1, ang_.rel(t, 0), ang_.path(t, 0));
      continue;
    }
    auto [it, fresh] = first.try_emplace({ang_.find(t), r1}, t);
    if (!fresh) {
      int u = it->second;
      propose(r2, ang_keys_[static_cast<std::size_t>(u)].second, ang_.rel(t, u), ang_.path(t, u));
    }
  }
  return changed;
}

// Parallel lines through a common point are one line: every segment between
// their points joins the class.
bool Symbolic::coll_feedback() {
  WeightedUF<AngleGroup> scratch = dir_;
  bool changed = false;
  for (int p = 0; p < n_; ++p) {
    std::map<int, std::vector<int>> through;  // class root -> other points
    for (int q = 0; q < n_; ++q)
      if (q != p) through[dir_.find(line(p, q))].push_back(q);
    for (const auto& [root, qs] : through)
      for (std::size_t i = 0; i < qs.size(); ++i)
        for (std::size_t j = i + 1; j < qs.size(); ++j) {
          int a = line(p, qs[i]), b = line(p, qs[j]);
          if (dir_.rel(a, b) != Rational(0)) continue;
          int c = line(qs[i], qs[j]);
          if (!scratch.merge(c, a, Rational(0), -1)) continue;
          DepSet deps;
          collect(dir_.path(a, b), deps);
          dir_derived_.push_back({c, a, Rational(0), std::move(deps)});
          changed = true;
        }
  }
  return changed;
}

void Symbolic::build_lengths(std::span<const std::pair<FactId, Atom>> facts) {
  len_ = {};
  len_.resize(n_ * n_);
  for (const auto& [id, t] : facts) {
    const auto& a = t.a;
    if (t.pred != Predicate::cong && t.pred != Predicate::rconst) continue;
    if (a[0] == a[1] || a[2] == a[3]) continue;
    Rational d = t.pred == Predicate::cong ? Rational(1) : t.lit;
    len_.merge(line(a[0], a[1]), line(a[2], a[3]), d, label({id}));
  }
  for (const auto& m : len_derived_) len_.merge(m.x, m.y, m.d, label(m.deps));
}

void Symbolic::build_ratios(std::span<const std::pair<FactId, Atom>> facts) {
  rat_ = {};
  rat_terms_.clear();
  rat_keys_.clear();
  rat_.add();
  rat_keys_.push_back({-1, -1});
  auto mirror = [&](int node) {
    if (node == 0) return 0;
    auto [x, y] = rat_keys_[static_cast<std::size_t>(node)];
    return rat_terms_.at(pair_key(y, x));
  };
  for (const auto& [id, t] : facts) {
    if (t.pred != Predicate::eqratio) continue;
    const auto& a = t.a;
    if (a[0] == a[1] || a[2] == a[3] || a[4] == a[5] || a[6] == a[7]) continue;
    int s[4] = {line(a[0], a[1]), line(a[2], a[3]), line(a[4], a[5]), line(a[6], a[7])};
    int r[4];
    Rational f[4];
    DepSet deps{id};
    for (int k = 0; k < 4; ++k) {
      r[k] = len_.find(s[k]);
      f[k] = len_.pot(s[k]);
      merge_into(deps, seg_expl(s[k]));
    }
    int n1 = ratio_term(r[0], r[1], true);
    int n2 = ratio_term(r[2], r[3], true);
    Rational o1 = f[0] / f[1], o2 = f[2] / f[3];
    int lab = label(std::move(deps));
    rat_.merge(n1, n2, o2 / o1, lab);
    rat_.merge(mirror(n1), mirror(n2), o1 / o2, lab);
  }
}

bool Symbolic::ratio_feedback() {
  WeightedUF<RatioGroup> scratch = len_;
  bool changed = false;
  std::map<std::pair<int, int>, int> first;
  auto propose = [&](int x, int y, Rational d, const std::vector<int>& path) {
    if (!scratch.merge(x, y, d, -1)) return;
    DepSet deps;
    collect(path, deps);
    len_derived_.push_back({x, y, d, std::move(deps)});
    changed = true;
  };
  for (int t = 1; t < rat_.size(); ++t) {
    auto [r1, r2] = rat_keys_[static_cast<std::size_t>(t)];
    if (rat_.same(t, 0)) {
      propose(r1, r2, rat_.rel(t, 0), rat_.path(t, 0));
      continue;
    }
    auto [it, fresh] = first.try_emplace({rat_.find(t), r1}, t);
    if (!fresh) {
      int u = it->second;
      propose(rat_keys_[static_cast<std::size_t>(u)].second, r2, rat_.rel(t, u), rat_.path(t, u));
    }
  }
  return changed;
}

std::optional<FactId> Symbolic::lookup(const Atom& t) const {
  auto it = explicit_.find(canonical(t));
  if (it == explicit_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct Side {
  int node = -1;
  std::pair<int, int> key;
  Rational off{};
};

}  // namespace

bool Symbolic::holds(const Atom& t) const {
  switch (t.pred) {
    case Predicate::midp:
    case Predicate::cyclic:
    case Predicate::simtri:
    case Predicate::simtrir:
    case Predicate::contri:
    case Predicate::contrir:
    case Predicate::sameclock:
      return lookup(t).has_value();
    default:
      return lookup(t) || check(t, nullptr);
  }
}

std::optional<DepSet> Symbolic::explain(const Atom& t) const {
  if (auto id = lookup(t)) return DepSet{*id};
  DepSet deps;
  if (!check(t, &deps)) return std::nullopt;
  return deps;
}

bool Symbolic::check(const Atom& t, DepSet* out) const {
  const auto& a = t.a;
  auto dir_rel = [&](int l1, int l2, Rational want) -> bool {
    if (!dir_.same(l1, l2) || dir_.rel(l1, l2) != want.mod(Rational(1))) return false;
    if (out) collect(dir_.path(l1, l2), *out);
    return true;
  };
  auto len_rel = [&](int s1, int s2, Rational want) -> bool {
    if (!len_.same(s1, s2) || len_.rel(s1, s2) != want) return false;
    if (out) collect(len_.path(s1, s2), *out);
    return true;
  };
  auto angle_side = [&](int l1, int l2) {
    int r1 = dir_.find(l1), r2 = dir_.find(l2);
    Side s;
    s.key = {r1, r2};
    s.off = AngleGroup::sub(dir_.pot(l2), dir_.pot(l1));
    s.node = r1 == r2 ? 0 : [&] {
      auto it = ang_terms_.find(pair_key(r1, r2));
      return it == ang_terms_.end() ? -1 : it->second;
    }();
    return s;
  };
  auto ratio_side = [&](int s1, int s2) {
    int r1 = len_.find(s1), r2 = len_.find(s2);
    Side s;
    s.key = {r1, r2};
    s.off = len_.pot(s1) / len_.pot(s2);
    s.node = r1 == r2 ? 0 : [&] {
      auto it = rat_terms_.find(pair_key(r1, r2));
      return it == rat_terms_.end() ? -1 : it->second;
    }();
    return s;
  };

  bool ok = false;
  switch (t.pred) {
    case Predicate::coll:
      if (a[0] == a[1] || a[0] == a[2] || a[1] == a[2]) return true;
      // Any two of the three lines share a point, so one parallel pair suffices.
      ok = dir_rel(line(a[0], a[1]), line(a[0], a[2]), Rational(0)) ||
           dir_rel(line(a[0], a[1]), line(a[1], a[2]), Rational(0)) ||
           dir_rel(line(a[0], a[2]), line(a[1], a[2]), Rational(0));
      break;
    case Predicate::para:
    case Predicate::perp:
    case Predicate::aconst: {
      if (a[0] == a[1] || a[2] == a[3]) return false;
      Rational want = t.pred == Predicate::para   ? Rational(0)
                      : t.pred == Predicate::perp ? Rational(1, 2)
                                                  : t.lit / Rational(180);
      ok = dir_rel(line(a[2], a[3]), line(a[0], a[1]), want);
      break;
    }
    case Predicate::cong:
    case Predicate::rconst:
      if (a[0] == a[1] || a[2] == a[3]) return false;
      ok = len_rel(line(a[0], a[1]), line(a[2], a[3]),
                   t.pred == Predicate::cong ? Rational(1) : t.lit);
      break;
    case Predicate::eqangle:
    case Predicate::eqratio: {
      for (int k = 0; k < 8; k += 2)
        if (a[k] == a[k + 1]) return false;
      int l[4] = {line(a[0], a[1]), line(a[2], a[3]), line(a[4], a[5]), line(a[6], a[7])};
      bool angles = t.pred == Predicate::eqangle;
      Side s1 = angles ? angle_side(l[0], l[1]) : ratio_side(l[0], l[1]);
      Side s2 = angles ? angle_side(l[2], l[3]) : ratio_side(l[2], l[3]);
      if (s1.node < 0 || s2.node < 0) {
        ok = s1.node == s2.node && s1.key == s2.key && s1.off == s2.off;
      } else if (angles) {
        ok = ang_.same(s1.node, s2.node) &&
             ang_.rel(s1.node, s2.node) == AngleGroup::sub(s2.off, s1.off);
        if (ok && out) collect(ang_.path(s1.node, s2.node), *out);
      } else {
        ok = rat_.same(s1.node, s2.node) && rat_.rel(s1.node, s2.node) == s2.off / s1.off;
        if (ok && out) collect(rat_.path(s1.node, s2.node), *out);
      }
      if (ok && out)
        for (int k = 0; k < 4; ++k) merge_into(*out, angles ? line_expl(l[k]) : seg_expl(l[k]));
      break;
    }
    default:
      return false;
  }
  return ok;
}

DepSet minimize_deps(const Atom& t, DepSet deps, int points,
                     const std::function<const Atom&(FactId)>& atom_of) {
  std::size_t i = 0;
  while (i < deps.size() && deps.size() > 1) {
    std::vector<std::pair<FactId, Atom>> trial;
    for (std::size_t k = 0; k < deps.size(); ++k)
      if (k != i) trial.emplace_back(deps[k], atom_of(deps[k]));
    Symbolic s(points);
    s.build(trial);
    if (s.holds(t))
      deps.erase(deps.begin() + static_cast<std::ptrdiff_t>(i));
    else
      ++i;
  }
  return deps;
}

}  // namespace geodd
