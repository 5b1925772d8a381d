#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "geodd/engine.hpp"
#include "geodd/error.hpp"

namespace geodd {

namespace {

constexpr double kPi = std::numbers::pi;

double mod_pi(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0) r += kPi;
  if (r >= kPi) r -= kPi;
  return r;
}

int distinct_points(const Atom& t) {
  std::array<bool, 256> seen{};
  int k = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!seen[t.a[i]]) {
      seen[t.a[i]] = true;
      ++k;
    }
  return k;
}

bool same_pair(int a, int b, int c, int d) { return (a == c && b == d) || (a == d && b == c); }

}  // namespace

NumericTable::NumericTable(const Figure& fig, const Tolerances& tol)
    : n_(static_cast<int>(fig.size())), tol_(tol), pts_(fig.coords()) {
  const auto n = static_cast<std::size_t>(n_);
  theta_.assign(n * n, 0);
  len_.assign(n * n, 0);
  close_.assign(n * n, 1);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      double d = dist(pts_[i], pts_[j]);
      len_[idx(i, j)] = d;
      if (i == j || d < tol.deg) continue;
      close_[idx(i, j)] = 0;
      theta_[idx(i, j)] = line_angle(pts_[i], pts_[j], tol).value;
    }
}

bool NumericTable::triangle_ok(int a, int b, int c) const {
  if (!distinct(a, b) || !distinct(b, c) || !distinct(a, c)) return false;
  std::array<Point, 3> p{point(a), point(b), point(c)};
  return !holds(Predicate::coll, p, {}, tol_);
}

bool NumericTable::admissible(const Atom& t, bool six_point_limit) const {
  const auto& a = t.a;
  auto seg = [&](int k) { return distinct(a[k], a[k + 1]); };
  switch (t.pred) {
    case Predicate::coll:
      return distinct(a[0], a[1]) && distinct(a[0], a[2]) && distinct(a[1], a[2]);
    case Predicate::para:
    case Predicate::cong:
      return seg(0) && seg(2) && !same_pair(a[0], a[1], a[2], a[3]);
    case Predicate::perp:
    case Predicate::aconst:
      return seg(0) && seg(2);
    case Predicate::rconst:
      return seg(0) && seg(2) && !same_pair(a[0], a[1], a[2], a[3]);
    case Predicate::midp:
      return distinct(a[1], a[2]);
    case Predicate::cyclic:
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          if (!distinct(a[i], a[j])) return false;
      return true;
    case Predicate::eqangle: {
      if (!seg(0) || !seg(2) || !seg(4) || !seg(6)) return false;
      if (same_pair(a[0], a[1], a[4], a[5]) && same_pair(a[2], a[3], a[6], a[7])) return false;
      double v = theta(a[2], a[3]) - theta(a[0], a[1]);
      if (std::abs(angle_diff(v, 0)) < tol_.eq) return false;
      return !six_point_limit || distinct_points(t) <= 6;
    }
    case Predicate::eqratio: {
      if (!seg(0) || !seg(2) || !seg(4) || !seg(6)) return false;
      if (same_pair(a[0], a[1], a[4], a[5]) && same_pair(a[2], a[3], a[6], a[7])) return false;
      if (same_pair(a[0], a[1], a[2], a[3]) && same_pair(a[4], a[5], a[6], a[7])) return false;
      return !six_point_limit || distinct_points(t) <= 6;
    }
    case Predicate::simtri:
    case Predicate::simtrir:
    case Predicate::contri:
    case Predicate::contrir:
      if (std::equal(a.begin(), a.begin() + 3, a.begin() + 3)) return false;
      [[fallthrough]];
    case Predicate::sameclock:
      return triangle_ok(a[0], a[1], a[2]) && triangle_ok(a[3], a[4], a[5]);
  }
  return false;
}

bool NumericTable::eval(const Atom& t) const {
  const auto& a = t.a;
  const double eq = tol_.eq;
  auto th = [&](int k) { return theta(a[k], a[k + 1]); };
  auto ln = [&](int k) { return length(a[k], a[k + 1]); };
  switch (t.pred) {
    case Predicate::para:
      return std::abs(angle_diff(th(0), th(2))) < eq;
    case Predicate::perp:
      return std::abs(angle_diff(th(2) - th(0), kPi / 2)) < eq;
    case Predicate::cong:
      return std::abs(ln(0) - ln(2)) < eq;
    case Predicate::eqangle:
      return std::abs(angle_diff(th(2) - th(0), th(6) - th(4))) < eq;
    case Predicate::eqratio:
      return std::abs(std::log(ln(0) / ln(2)) - std::log(ln(4) / ln(6))) < eq;
    case Predicate::aconst:
      return std::abs(angle_diff(th(2) - th(0), t.lit.to_double() * kPi / 180.0)) < eq;
    case Predicate::rconst:
      return std::abs(std::log(ln(0) / ln(2)) - std::log(t.lit.to_double())) < eq;
    default:
      break;
  }
  std::array<Point, kMaxArity> p;
  for (std::size_t i = 0; i < t.size(); ++i) p[i] = point(a[i]);
  try {
    return holds(t.pred, std::span<const Point>(p.data(), t.size()), t.lit, tol_);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateInput) throw;
    return false;
  }
}

namespace {

struct PairEntry {
  double v;
  PointId a, b, c, d;
};

// Pairs (e_i, e_j) whose values are within `window`, each tested exactly.
template <class F>
void window_pairs(std::vector<PairEntry>& entries, double window, F&& f) {
  std::sort(entries.begin(), entries.end(), [](const PairEntry& x, const PairEntry& y) {
    return x.v < y.v;
  });
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size() && entries[j].v - entries[i].v < window; ++j)
      f(entries[i], entries[j]);
}

std::vector<std::pair<PointId, PointId>> segments(int n, const NumericTable& num) {
  std::vector<std::pair<PointId, PointId>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (num.distinct(i, j)) out.emplace_back(static_cast<PointId>(i), static_cast<PointId>(j));
  return out;
}

Atom make(Predicate p, std::initializer_list<int> args, Rational lit = {}) {
  Atom t;
  t.pred = p;
  t.lit = lit;
  std::size_t i = 0;
  for (int v : args) t.a[i++] = static_cast<PointId>(v);
  return t;
}

}  // namespace

NumericIndex pre_identify(const NumericTable& num, bool six_point_limit) {
  const int n = num.points();
  const double eq = num.tol().eq;
  std::array<std::set<Atom>, kPredicateCount> found;
  auto offer = [&](const Atom& t) {
    if (num.admissible(t, six_point_limit) && num.eval(t))
      found[static_cast<std::size_t>(t.pred)].insert(canonical(t));
  };

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        offer(make(Predicate::coll, {i, j, k}));
        for (int l = k + 1; l < n; ++l) offer(make(Predicate::cyclic, {i, j, k, l}));
      }
      for (int m = 0; m < n; ++m) offer(make(Predicate::midp, {m, i, j}));
    }

  auto segs = segments(n, num);
  for (std::size_t x = 0; x < segs.size(); ++x)
    for (std::size_t y = x; y < segs.size(); ++y) {
      auto [a, b] = segs[x];
      auto [c, d] = segs[y];
      offer(make(Predicate::perp, {a, b, c, d}));
      if (x == y) continue;
      offer(make(Predicate::para, {a, b, c, d}));
      offer(make(Predicate::cong, {a, b, c, d}));
    }

  // Angles between ordered line pairs; angles near 0 are never admissible.
  std::vector<PairEntry> angles;
  for (std::size_t x = 0; x < segs.size(); ++x)
    for (std::size_t y = 0; y < segs.size(); ++y) {
      if (x == y) continue;
      auto [a, b] = segs[x];
      auto [c, d] = segs[y];
      double v = mod_pi(num.theta(c, d) - num.theta(a, b));
      if (v < eq || v > kPi - eq) continue;
      angles.push_back({v, a, b, c, d});
    }
  window_pairs(angles, 2 * eq, [&](const PairEntry& p, const PairEntry& q) {
    offer(make(Predicate::eqangle, {p.a, p.b, p.c, p.d, q.a, q.b, q.c, q.d}));
  });

  std::vector<PairEntry> ratios;
  for (std::size_t x = 0; x < segs.size(); ++x)
    for (std::size_t y = 0; y < segs.size(); ++y) {
      auto [a, b] = segs[x];
      auto [c, d] = segs[y];
      ratios.push_back({std::log(num.length(a, b) / num.length(c, d)), a, b, c, d});
    }
  window_pairs(ratios, 2 * eq, [&](const PairEntry& p, const PairEntry& q) {
    offer(make(Predicate::eqratio, {p.a, p.b, p.c, p.d, q.a, q.b, q.c, q.d}));
  });

  // Triangle shapes: (log BC/AB, log CA/AB) per vertex-ordered triangle.
  struct Shape {
    double u, w;
    int a, b, c;
  };
  std::vector<Shape> shapes;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        if (a == b || b == c || a == c) continue;
        if (!num.admissible(make(Predicate::sameclock, {a, b, c, a, b, c}))) continue;
        double ab = num.length(a, b);
        shapes.push_back({std::log(num.length(b, c) / ab), std::log(num.length(c, a) / ab), a, b, c});
      }
  std::sort(shapes.begin(), shapes.end(), [](const Shape& x, const Shape& y) { return x.u < y.u; });
  for (std::size_t i = 0; i < shapes.size(); ++i)
    for (std::size_t j = i + 1; j < shapes.size() && shapes[j].u - shapes[i].u < 2 * eq; ++j) {
      const Shape& s = shapes[i];
      const Shape& r = shapes[j];
      if (std::abs(s.w - r.w) >= 2 * eq) continue;
      for (Predicate p : {Predicate::simtri, Predicate::simtrir, Predicate::contri,
                          Predicate::contrir})
        offer(make(p, {s.a, s.b, s.c, r.a, r.b, r.c}));
    }

  NumericIndex idx;
  for (std::size_t p = 0; p < kPredicateCount; ++p)
    idx.by_pred[p].assign(found[p].begin(), found[p].end());
  return idx;
}

std::vector<Atom> brute_force_candidates(const NumericTable& num, Predicate p) {
  auto segs = segments(num.points(), num);
  std::set<Atom> out;
  for (auto [a, b] : segs)
    for (auto [c, d] : segs)
      for (auto [e, f] : segs)
        for (auto [g, h] : segs) {
          Atom t = make(p, {a, b, c, d, e, f, g, h});
          if (num.admissible(t, false) && num.eval(t)) out.insert(canonical(t));
        }
  return {out.begin(), out.end()};
}

}  // namespace geodd
