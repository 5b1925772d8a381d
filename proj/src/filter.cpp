#include "geodd/filter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace geodd {

std::string_view filter_reason_name(FilterReason r) {
  switch (r) {
    case FilterReason::Keep: return "Keep";
    case FilterReason::TrivialSelf: return "TrivialSelf";
    case FilterReason::ReducibleToPara: return "ReducibleToPara";
    case FilterReason::ReducibleToCong: return "ReducibleToCong";
    case FilterReason::ReducibleToPerp: return "ReducibleToPerp";
    case FilterReason::ReducibleToColl: return "ReducibleToColl";
    case FilterReason::ReducibleToSimilarity: return "ReducibleToSimilarity";
    case FilterReason::SameclockExcluded: return "SameclockExcluded";
    case FilterReason::EquivalentDuplicate: return "EquivalentDuplicate";
  }
  return "?";
}

namespace {

constexpr double kPi = std::numbers::pi;

struct Pair {
  int a, b;
  bool operator==(const Pair& o) const { return (a == o.a && b == o.b) || (a == o.b && b == o.a); }
  bool shares(const Pair& o) const { return a == o.a || a == o.b || b == o.a || b == o.b; }
};

Pair pair_at(const Atom& t, int k) { return {t.a[static_cast<std::size_t>(k)], t.a[static_cast<std::size_t>(k + 1)]}; }

Atom make(Predicate p, std::initializer_list<int> args) {
  Atom t;
  t.pred = p;
  std::size_t i = 0;
  for (int v : args) t.a[i++] = static_cast<PointId>(v);
  return t;
}

}  // namespace

std::vector<Atom> induced_angles(const Atom& tri) {
  const auto& x = tri.a;
  int A = x[0], B = x[1], C = x[2], P = x[3], Q = x[4], R = x[5];
  bool reversed = tri.pred == Predicate::simtrir || tri.pred == Predicate::contrir;
  std::vector<Atom> out;
  if (!reversed) {
    out.push_back(make(Predicate::eqangle, {A, B, A, C, P, Q, P, R}));
    out.push_back(make(Predicate::eqangle, {B, A, B, C, Q, P, Q, R}));
    out.push_back(make(Predicate::eqangle, {C, A, C, B, R, P, R, Q}));
  } else {
    out.push_back(make(Predicate::eqangle, {A, B, A, C, P, R, P, Q}));
    out.push_back(make(Predicate::eqangle, {B, A, B, C, Q, R, Q, P}));
    out.push_back(make(Predicate::eqangle, {C, A, C, B, R, Q, R, P}));
  }
  for (auto& t : out) t = canonical(t);
  return out;
}

FilterVerdict judge(const Atom& t, const NumericTable& num, std::span<const Atom> similar) {
  using R = FilterReason;
  const double eq = num.tol().eq;
  auto degenerate = [&](Pair p) { return !num.distinct(p.a, p.b); };
  auto parallel = [&](Pair p, Pair q) {
    return std::abs(angle_diff(num.theta(p.a, p.b), num.theta(q.a, q.b))) < eq;
  };
  auto perpendicular = [&](Pair p, Pair q) {
    return std::abs(angle_diff(num.theta(q.a, q.b) - num.theta(p.a, p.b), kPi / 2)) < eq;
  };
  auto congruent = [&](Pair p, Pair q) {
    return std::abs(num.length(p.a, p.b) - num.length(q.a, q.b)) < eq;
  };
  const auto& a = t.a;
  switch (t.pred) {
    case Predicate::sameclock:
      return {R::SameclockExcluded};
    case Predicate::coll:
      if (a[0] == a[1] || a[0] == a[2] || a[1] == a[2]) return {R::TrivialSelf};
      return {};
    case Predicate::aconst: {
      if (degenerate(pair_at(t, 0)) || degenerate(pair_at(t, 2))) return {R::TrivialSelf};
      if (t.lit.mod(Rational(180)) == Rational(0)) return {R::ReducibleToPara};
      return {};
    }
    case Predicate::rconst: {
      Pair p = pair_at(t, 0), q = pair_at(t, 2);
      if (degenerate(p) || degenerate(q) || p == q) return {R::TrivialSelf};
      if (t.lit == Rational(1)) return {R::ReducibleToCong};
      return {};
    }
    case Predicate::cong:
    case Predicate::para: {
      Pair p = pair_at(t, 0), q = pair_at(t, 2);
      if (degenerate(p) || degenerate(q) || p == q) return {R::TrivialSelf};
      if (t.pred == Predicate::para && p.shares(q)) return {R::ReducibleToColl};
      return {};
    }
    case Predicate::perp:
      if (degenerate(pair_at(t, 0)) || degenerate(pair_at(t, 2))) return {R::TrivialSelf};
      return {};
    case Predicate::midp:
    case Predicate::cyclic:
      return num.admissible(t) ? FilterVerdict{} : FilterVerdict{R::TrivialSelf};
    case Predicate::eqratio: {
      Pair s[4] = {pair_at(t, 0), pair_at(t, 2), pair_at(t, 4), pair_at(t, 6)};
      for (auto& p : s)
        if (degenerate(p)) return {R::TrivialSelf};
      if (s[0] == s[2] && s[1] == s[3]) return {R::TrivialSelf};
      if (s[0] == s[3] && s[1] == s[2]) return {R::ReducibleToCong};
      if (s[0] == s[1] || s[2] == s[3]) return {R::ReducibleToCong};
      if (congruent(s[0], s[1]) || congruent(s[2], s[3]) || congruent(s[0], s[2]) ||
          congruent(s[1], s[3]))
        return {R::ReducibleToCong};
      return {};
    }
    case Predicate::eqangle: {
      Pair l[4] = {pair_at(t, 0), pair_at(t, 2), pair_at(t, 4), pair_at(t, 6)};
      for (auto& p : l)
        if (degenerate(p)) return {R::TrivialSelf};
      if (l[0] == l[2] && l[1] == l[3]) return {R::TrivialSelf};
      if (l[0] == l[3] && l[1] == l[2]) return {R::ReducibleToPerp};
      if (l[0] == l[1] || l[2] == l[3]) return {R::ReducibleToPara};
      if (parallel(l[0], l[1]) || parallel(l[2], l[3]) || parallel(l[0], l[2]) ||
          parallel(l[1], l[3]))
        return {R::ReducibleToPara};
      if (perpendicular(l[0], l[1]) || perpendicular(l[2], l[3])) return {R::ReducibleToPerp};
      Atom key = canonical(t);
      for (const auto& tri : similar)
        for (const auto& ind : induced_angles(tri))
          if (ind == key) return {R::ReducibleToSimilarity};
      return {};
    }
    case Predicate::simtri:
    case Predicate::simtrir:
    case Predicate::contri:
    case Predicate::contrir: {
      std::array<PointId, 3> x{a[0], a[1], a[2]}, y{a[3], a[4], a[5]};
      std::sort(x.begin(), x.end());
      std::sort(y.begin(), y.end());
      if (x == y) return {R::TrivialSelf};
      return {};
    }
  }
  return {};
}

FilterVerdict judge(const Atom& t, const Engine& eng) {
  std::vector<Atom> similar;
  for (const auto& f : eng.facts())
    if (is_triangle_pred(f.atom.pred)) similar.push_back(f.atom);
  return judge(t, eng.numeric(), similar);
}

std::vector<Atom> dedupe(std::vector<Atom> kept, const NumericTable& num) {
  for (auto& t : kept) t = canonical(t);
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  const double eq = num.tol().eq;

  // Per slot value: line direction for eqangle, segment length for eqratio.
  auto values = [&](const Atom& t) {
    std::array<double, 4> v;
    for (int k = 0; k < 4; ++k) {
      int p = t.a[static_cast<std::size_t>(2 * k)], q = t.a[static_cast<std::size_t>(2 * k + 1)];
      v[static_cast<std::size_t>(k)] = t.pred == Predicate::eqangle ? num.theta(p, q) : num.length(p, q);
    }
    return v;
  };
  auto close = [&](Predicate p, double x, double y) {
    return p == Predicate::eqangle ? std::abs(angle_diff(x, y)) < eq : std::abs(x - y) < eq;
  };
  // Bucket key: sorted slot values on a coarse grid (angles folded mod pi).
  auto bucket = [&](const Atom& t) {
    auto v = values(t);
    std::array<long long, 4> k;
    for (std::size_t i = 0; i < 4; ++i) {
      double x = v[i];
      if (t.pred == Predicate::eqangle && x > kPi - 1e-3) x -= kPi;
      k[i] = std::llround(x * 1e3);
    }
    std::sort(k.begin(), k.end());
    return std::pair{t.pred, k};
  };

  std::vector<Atom> out;
  std::map<std::pair<Predicate, std::array<long long, 4>>, std::vector<std::array<double, 4>>> reps;
  for (const auto& t : kept) {
    if (t.pred != Predicate::eqangle && t.pred != Predicate::eqratio) {
      out.push_back(t);
      continue;
    }
    auto& bucket_reps = reps[bucket(t)];
    bool dup = false;
    for_each_variant(t, [&](const Atom& v) {
      if (dup) return;
      auto vv = values(v);
      for (const auto& r : bucket_reps) {
        bool all = true;
        for (std::size_t i = 0; i < 4 && all; ++i) all = close(t.pred, vv[i], r[i]);
        if (all) {
          dup = true;
          return;
        }
      }
    });
    if (dup) continue;
    bucket_reps.push_back(values(t));
    out.push_back(t);
  }
  return out;
}

}  // namespace geodd
