#include <doctest.h>

#include <fstream>
#include <sstream>

#include "geodd/diagram.hpp"
#include "geodd/engine.hpp"

using namespace geodd;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Figure tangent_figure(bool with_aux, std::uint64_t seed = 9) {
  auto rec = parse_record(slurp(std::string(GEODD_TEST_DATA) + "/tangent_lengths.txt"));
  Rng rng(seed);
  auto fig = figure_from_problem(rec.problem, {}, rng);
  if (with_aux) fig = extend_figure(fig, rec.aux[0], {}, rng);
  return fig;
}

Statement parse_goal(const std::string& text, const Figure& fig) {
  std::string decl;
  for (const auto& n : fig.names()) decl += n + " : ; ";
  return parse_problem(decl + "? " + text).goal;
}

}  // namespace

TEST_CASE("default rules compile") {
  const auto& rules = default_compiled_rules();
  CHECK(rules.size() >= 30);
  for (const auto& r : rules) {
    INFO(r.name);
    CHECK(r.vars.size() <= 6);
  }
}

TEST_CASE("tangent lengths saturation derives the goal") {
  auto fig = tangent_figure(true);
  Engine eng(fig, default_compiled_rules());
  eng.saturate();
  CHECK_FALSE(eng.incomplete());
  auto id = eng.query(parse_goal("cong f e g e", fig));
  REQUIRE(id);
  const auto& f = eng.fact(*id);
  MESSAGE("rule ", f.rule, " facts ", eng.facts().size(), " rounds ", eng.rounds());
}

TEST_CASE("tangent lengths without aux does not derive the goal") {
  auto fig = tangent_figure(false);
  Engine eng(fig, default_compiled_rules());
  eng.saturate();
  CHECK_FALSE(eng.query(parse_goal("cong f e g e", fig)));
}

TEST_CASE("naive and partial matching agree on the tangent lengths figure") {
  auto fig = tangent_figure(true);
  EngineOptions naive;
  naive.mode = MatchMode::naive;
  Engine a(fig, default_compiled_rules(), naive);
  Engine b(fig, default_compiled_rules());
  a.saturate();
  b.saturate();
  CHECK(a.facts().size() == b.facts().size());
  CHECK(a.fact_set() == b.fact_set());
  bool same_ids = a.facts().size() == b.facts().size();
  for (std::size_t i = 0; same_ids && i < a.facts().size(); ++i)
    same_ids = a.facts()[i].atom == b.facts()[i].atom && a.facts()[i].deps == b.facts()[i].deps;
  CHECK(same_ids);
}

TEST_CASE("implied is invariant under statement variants") {
  Problem p = parse_problem(
      "a b : ; c : midp a b c ; d : cong d c d b , cong a d a c ; e : cong e a e b , coll e c a ; "
      "f : cong e f e c , para f a d e ? coll e a b");
  Rng rng(3);
  Engine eng(figure_from_problem(p, {}, rng), default_compiled_rules());
  eng.saturate();
  CHECK(eng.query(p.goal));
  for (const auto& t : eng.closure()) {
    for_each_variant(t, [&](const Atom& v) {
      INFO(eng.to_statement(v).str());
      CHECK(eng.implied(v));
    });
  }
}
