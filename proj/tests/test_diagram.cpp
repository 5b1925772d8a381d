#include <doctest.h>

#include <fstream>
#include <sstream>

#include "geodd/diagram.hpp"

using namespace geodd;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Statement parse_stmt(const std::string& text, const Figure& f) {
  return parse_clause("zz : " + text, f.names()).statements.at(0).stmt;
}

}  // namespace

TEST_CASE("prerequisites") {
  const auto& cat = default_catalog();
  Tolerances tol;
  Figure f;
  f.add_point("a", {0, 0});
  f.add_point("b", {1, 1});
  f.add_point("c", {2, 2});
  f.add_point("x", {3, 0});
  auto oc = parse_construction_script("y = orthocenter y a b c", cat)[0];
  CHECK_FALSE(check_prerequisites(oc, f, cat, tol));
  auto fr = parse_construction_script("y = free y", cat)[0];
  CHECK(check_prerequisites(fr, f, cat, tol));
  auto clash = parse_construction_script("x = free x", cat)[0];
  auto r = check_prerequisites(clash, f, cat, tol);
  CHECK_FALSE(r);
  CHECK(r.reason == "NameCollision");
}

TEST_CASE("orthocenter script") {
  const auto& cat = default_catalog();
  Rng rng(1);
  auto script = parse_construction_script("a b c = triangle a b c\nx = orthocenter x a b c", cat);
  auto fig = build_figure(script, cat, {}, rng);
  CHECK(fig.size() == 4);
  CHECK(eval_statement(parse_stmt("perp a x b c", fig), fig, {}));
  CHECK(eval_statement(parse_stmt("perp b x a c", fig), fig, {}));
  CHECK(eval_statement(parse_stmt("perp c x a b", fig), fig, {}));
  REQUIRE(fig.clauses.size() == 2);
  CHECK(fig.clauses[1].statements.size() == 2);
  CHECK(fig.clauses[1].statements[0].id == 0);
}

TEST_CASE("empty script") {
  Rng rng(1);
  auto fig = build_figure({}, default_catalog(), {}, rng);
  CHECK(fig.empty());
}

TEST_CASE("infeasible intersection fails the build") {
  const auto& cat = default_catalog();
  Rng rng(1);
  // cd is parallel to ab, so y on both lines has no solution.
  auto script = parse_construction_script(
      "a b c = triangle a b c\nd = on_pline d c a b\ny = on_line y a b, on_line y c d", cat);
  try {
    build_figure(script, cat, {}, rng);
    FAIL("expected BuildFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BuildFailed);
    CHECK(e.token() == "2");
  }
}

TEST_CASE("tangent lengths build") {
  const auto& cat = default_catalog();
  auto script = parse_construction_script(slurp(std::string(GEODD_TEST_DATA) + "/tangent_lengths.script"), cat);
  Rng rng(42);
  auto fig = build_figure(script, cat, {}, rng);
  CHECK(fig.size() == 8);
  for (const auto& c : fig.clauses)
    for (const auto& s : c.statements) CHECK(eval_statement(s.stmt, fig, {}));
  CHECK(eval_statement(parse_stmt("sameclock a f e a e h", fig), fig, {}));
  CHECK(eval_statement(parse_stmt("sameclock d h e d e g", fig), fig, {}));
  CHECK(eval_statement(parse_stmt("cong f e g e", fig), fig, {}));

  Rng again(42);
  auto twin = build_figure(script, cat, {}, again);
  CHECK(twin.coords() == fig.coords());
}

TEST_CASE("figure from the tangent lengths problem") {
  auto rec = parse_record(slurp(std::string(GEODD_TEST_DATA) + "/tangent_lengths.txt"));
  Rng rng(9);
  auto fig = figure_from_problem(rec.problem, {}, rng);
  CHECK(fig.size() == 7);
  CHECK(eval_statement(rec.problem.goal, fig, {}));
  auto ext = extend_figure(fig, rec.aux[0], {}, rng);
  CHECK(ext.size() == 8);
  CHECK(eval_statement(parse_stmt("sameclock a f e a e h", ext), ext, {}));
}

TEST_CASE("catalog coverage") {
  const auto& cat = default_catalog();
  CHECK(cat.of_category(Category::BASIC).size() >= 3);
  CHECK(cat.of_category(Category::BASIC_FREE).size() == 1);
  CHECK(cat.of_category(Category::INTERSECT).size() >= 6);
  CHECK(cat.of_category(Category::OTHERS).size() >= 8);
  for (const char* n : {"segment", "triangle", "rectangle", "free", "on_line", "on_circle",
                        "on_bline", "orthocenter", "circumcenter", "midpoint", "foot", "incenter"})
    CHECK(cat.find(n) != nullptr);
  for (const auto* d : cat.of_category(Category::BASIC_FREE)) {
    CHECK(d->ins.empty());
    CHECK(d->outs.size() == 1);
  }
  for (const auto* d : cat.of_category(Category::INTERSECT)) CHECK(d->added.size() == 1);
}

TEST_CASE("sketches stay separated after normalization") {
  // A circumcenter of a nearly flat triangle used to push the other points together.
  auto p = parse_problem(
      "a b c : ; d : cong b d b c , cong d a d b ; e : eqangle b d b e b e b a , eqangle d a d e d e d b ;"
      " f : cong a f a c , para f a e b ; g : cong g f g c , cong g f g d ? perp c f a g");
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Rng rng(seed);
    auto fig = figure_from_problem(p, {}, rng);
    INFO(seed);
    CHECK(well_separated(fig, Tolerances{}.deg * 10));
    CHECK(eval_statement(p.goal, fig, {}));
  }
}
