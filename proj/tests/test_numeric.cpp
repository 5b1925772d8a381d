#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geodd/construction.hpp"
#include "geodd/diagram.hpp"
#include "geodd/numeric.hpp"

using namespace geodd;

namespace {

constexpr double kPi = std::numbers::pi;

Figure with_points(std::initializer_list<std::pair<const char*, Point>> pts) {
  Figure f;
  for (const auto& [n, p] : pts) f.add_point(n, p);
  return f;
}

Statement st(Predicate p, std::vector<std::string> args, Rational lit = {}) {
  return {p, std::move(args), lit};
}

// Independent eqangle check: signed angle between direction vectors, folded mod pi.
bool oracle_eqangle(const std::array<Point, 8>& p, double eps) {
  auto ang = [](Point a, Point b, Point c, Point d) {
    Point u = b - a, v = d - c;
    double t = std::atan2(u.x * v.y - u.y * v.x, u.x * v.x + u.y * v.y);
    return t;
  };
  double d = ang(p[0], p[1], p[2], p[3]) - ang(p[4], p[5], p[6], p[7]);
  double r = std::remainder(d, kPi);
  return std::abs(r) < eps;
}

Point rotate(Point p, double t) {
  return {p.x * std::cos(t) - p.y * std::sin(t), p.x * std::sin(t) + p.y * std::cos(t)};
}

}  // namespace

TEST_CASE("line angles") {
  Tolerances tol;
  CHECK(line_angle({0, 0}, {1, 1}, tol).value == doctest::Approx(kPi / 4));
  CHECK(line_angle({0, 0}, {-1, -1}, tol).value == doctest::Approx(kPi / 4));
  CHECK(line_angle({2, 3}, {2, 9}, tol).value == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(line_angle({1, 1}, {1, 1}, tol), Error);
}

TEST_CASE("line angle invariance under rigid motion") {
  Tolerances tol;
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    Point a{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    Point b{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    if (dist(a, b) < 0.01) continue;
    double t = uniform(rng, 0, 2 * kPi);
    Point shift{uniform(rng, -3, 3), uniform(rng, -3, 3)};
    double base = line_angle(a, b, tol).value;
    CHECK(std::abs(angle_diff(line_angle(b, a, tol).value, base)) < tol.ang);
    double moved = line_angle(rotate(a, t) + shift, rotate(b, t) + shift, tol).value;
    CHECK(std::abs(angle_diff(moved, base + t)) < tol.ang);
  }
}

TEST_CASE("basic predicates") {
  Tolerances tol;
  auto f = with_points({{"a", {0, 0}}, {"b", {1, 1}}, {"c", {2, 2}}, {"d", {1, 0}}, {"e", {0, 1}}});
  CHECK(eval_statement(st(Predicate::coll, {"a", "b", "c"}), f, tol));
  CHECK_FALSE(eval_statement(st(Predicate::coll, {"a", "b", "d"}), f, tol));
  CHECK(eval_statement(st(Predicate::perp, {"a", "d", "a", "e"}), f, tol));
  CHECK(eval_statement(st(Predicate::cong, {"a", "d", "a", "e"}), f, tol));
  CHECK(eval_statement(st(Predicate::aconst, {"a", "d", "a", "b"}, Rational(45)), f, tol));
  CHECK(eval_statement(st(Predicate::aconst, {"a", "b", "a", "d"}, Rational(135)), f, tol));
  CHECK(eval_statement(st(Predicate::rconst, {"a", "c", "a", "b"}, Rational(2)), f, tol));
  CHECK(eval_statement(st(Predicate::midp, {"b", "a", "c"}), f, tol));
  CHECK(eval_statement(st(Predicate::cyclic, {"a", "d", "b", "e"}), f, tol));
  CHECK_THROWS_AS(eval_statement(st(Predicate::para, {"a", "a", "b", "c"}), f, tol), Error);
}

TEST_CASE("triangle predicates") {
  Tolerances tol;
  auto f = with_points({{"a", {0, 0}}, {"b", {2, 0}}, {"c", {0, 1}},
                        {"p", {1, 1}}, {"q", {5, 1}}, {"r", {1, 3}},
                        {"u", {1, 1}}, {"v", {5, 1}}, {"w", {1, -1}}});
  CHECK(eval_statement(st(Predicate::simtri, {"a", "b", "c", "p", "q", "r"}), f, tol));
  CHECK_FALSE(eval_statement(st(Predicate::simtrir, {"a", "b", "c", "p", "q", "r"}), f, tol));
  CHECK(eval_statement(st(Predicate::simtrir, {"a", "b", "c", "u", "v", "w"}), f, tol));
  CHECK(eval_statement(st(Predicate::sameclock, {"a", "b", "c", "p", "q", "r"}), f, tol));
  CHECK_FALSE(eval_statement(st(Predicate::sameclock, {"a", "b", "c", "u", "v", "w"}), f, tol));
  CHECK_FALSE(eval_statement(st(Predicate::contri, {"a", "b", "c", "p", "q", "r"}), f, tol));
}

TEST_CASE("eqangle agrees with an independent evaluator") {
  Tolerances tol;
  Rng rng(11);
  int agreed = 0, positives = 0;
  for (int i = 0; i < 10000; ++i) {
    std::array<Point, 8> p;
    for (auto& q : p) q = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
    if (i % 2 == 0) {
      // Force equality: second angle is a rotated copy of the first.
      double t = uniform(rng, 0, 2 * kPi);
      Point s{uniform(rng, -1, 1), uniform(rng, -1, 1)};
      for (int k = 0; k < 4; ++k) p[4 + k] = rotate(p[k], t) + s;
      if (i % 4 == 0) std::swap(p[4], p[5]);
    }
    bool degenerate = false;
    for (int k = 0; k < 8; k += 2) degenerate |= dist(p[k], p[k + 1]) < 0.05;
    if (degenerate) continue;
    bool mine = holds(Predicate::eqangle, p, {}, tol);
    bool theirs = oracle_eqangle(p, tol.eq);
    agreed += mine == theirs;
    positives += theirs;
    CHECK(mine == theirs);
  }
  CHECK(positives > 1000);
  CHECK(agreed > 5000);
}

TEST_CASE("sketch oracles") {
  Tolerances tol;
  Rng rng(3);
  const auto& cat = default_catalog();
  auto f = with_points({{"a", {0, 0}}, {"b", {2, 0}}, {"c", {0, 2}}});
  auto cc = parse_construction_script("x = circumcenter x a b c", cat);
  auto o = sketch(cc[0], cat, f, rng, tol);
  CHECK(o[0].x == doctest::Approx(1));
  CHECK(o[0].y == doctest::Approx(1));

  auto g = with_points({{"a", {0, 0}}, {"b", {4, 0}}, {"c", {0, 3}}, {"p", {1, 1}}});
  auto oc = parse_construction_script("x = orthocenter x a b c", cat);
  // The vertex itself is the orthocenter of a right triangle; it collides with a.
  CHECK_THROWS_AS(sketch(oc[0], cat, g, rng, tol), Error);
  Figure h = with_points({{"b", {4, 0}}, {"c", {0, 3}}, {"q", {1, 1}}});
  auto oq = parse_construction_script("x = orthocenter x q b c", cat);
  auto hq = sketch(oq[0], cat, h, rng, tol);
  // Hand oracle: altitude from q is perpendicular to bc = (-4, 3); from b perpendicular to qc = (-1, 2).
  // q + t(3,4) meets b + s(2,1): 1+3t = 4+2s, 1+4t = s  =>  t = -1, s = -3.
  CHECK(hq[0].x == doctest::Approx(-2));
  CHECK(hq[0].y == doctest::Approx(-3));
}

TEST_CASE("line missing a circle is infeasible") {
  Tolerances tol;
  Rng rng(5);
  const auto& cat = default_catalog();
  auto f = with_points({{"a", {0, 5}}, {"b", {1, 5}}, {"o", {0, 0}}, {"r", {1, 0}}});
  auto s = parse_construction_script("x = on_line x a b, on_circle x o r", cat);
  try {
    sketch(std::span<const Construction>(s), cat, f, rng, tol);
    FAIL("expected NumericallyInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NumericallyInfeasible);
  }
}

TEST_CASE("every construction satisfies its added predicates") {
  Tolerances tol;
  const auto& cat = default_catalog();
  Rng rng(2024);
  const char* names[] = {"a", "b", "c", "d"};
  for (const auto& def : cat.defs()) {
    int placed = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      Figure f;
      for (std::size_t k = 0; k < def.ins.size(); ++k)
        f.add_point(names[k], {uniform(rng, -1, 1), uniform(rng, -1, 1)});
      Construction c{def.name, def.outs, {}, def.category, 0};
      for (std::size_t k = 0; k < def.outs.size(); ++k) c.outs[k] = "o" + std::to_string(k);
      for (std::size_t k = 0; k < def.ins.size(); ++k) c.args.push_back(names[k]);
      if (!check_prerequisites(c, f, cat, tol)) continue;
      std::vector<Point> pts;
      try {
        pts = sketch(c, cat, f, rng, tol);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NumericallyInfeasible);
        continue;
      }
      for (std::size_t k = 0; k < pts.size(); ++k) f.add_point(c.outs[k], pts[k]);
      for (const auto& s : cat.added_statements(c)) {
        INFO(def.name, " ", s.str());
        CHECK(eval_statement(s, f, tol));
      }
      ++placed;
    }
    INFO(def.name);
    CHECK(placed > 500);
  }
}
