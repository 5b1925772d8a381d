#include <doctest.h>

#include <fstream>
#include <sstream>

#include "geodd/construction.hpp"
#include "geodd/formal_lang.hpp"

using namespace geodd;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tangent_figure() { return slurp(std::string(GEODD_TEST_DATA) + "/tangent_lengths.txt"); }

// Collapses all whitespace runs so line wrapping does not matter.
std::string squash(const std::string& s) {
  std::istringstream is(s);
  std::string out, w;
  while (is >> w) out += (out.empty() ? "" : " ") + w;
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("minimal problem") {
  auto p = parse_problem("a : ; b : ; c : ; d : coll b c d [000] ? para a b c d");
  CHECK(p.clauses.size() == 4);
  CHECK(p.goal.pred == Predicate::para);
  CHECK(p.goal.args == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(p.clauses[3].statements[0].id == 0);
}

TEST_CASE("tangent lengths problem block") {
  auto r = parse_record(tangent_figure());
  CHECK(r.problem.clauses.size() == 7);
  std::vector<FactId> ids;
  for (const auto& c : r.problem.clauses)
    for (const auto& s : c.statements) ids.push_back(*s.id);
  CHECK(ids == std::vector<FactId>{0, 1, 2, 3, 4, 5, 6});
  CHECK(r.problem.goal.str() == "cong f e g e");
  CHECK(r.aux.size() == 1);
  CHECK(r.aux[0].label == "x00");
  CHECK(r.numerical_checks.size() == 2);
  REQUIRE(r.proof.size() == 9);
  CHECK(r.proof[2].rule == "r35");
  CHECK(r.proof[2].deps == std::vector<FactId>{11, 12, 9});
}

TEST_CASE("tangent lengths round trip") {
  auto text = tangent_figure();
  auto r = parse_record(text);
  auto out = serialize_record(r);
  CHECK(squash(out) == squash(text));
  CHECK(parse_record(out) == r);
  CHECK(serialize_record(parse_record(out)) == out);
}

TEST_CASE("forward reference") {
  try {
    parse_problem("a : coll a b c ?");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UndeclaredPoint);
    CHECK(e.token() == "b");
    CHECK(e.offset() == 11);
  }
}

TEST_CASE("parse errors carry codes") {
  CHECK(code_of([] { parse_problem("a : ; b : ; c : foo a b ? coll a b c"); }) ==
        ErrorCode::UnknownPredicate);
  CHECK(code_of([] { parse_problem("a : ; b : ; c : coll a b ? coll a b c"); }) ==
        ErrorCode::ArityMismatch);
  CHECK(code_of([] { parse_problem("a : ; a : ? coll a a a"); }) == ErrorCode::DuplicatePoint);
  CHECK(code_of([] { parse_problem("a : ; b : ; c : ; d : ? rconst a b c d -2"); }) ==
        ErrorCode::BadLiteral);
}

TEST_CASE("literals") {
  auto p = parse_problem("a : ; b : ; c : ; d : ? aconst a b c d 270");
  CHECK(p.goal.literal == Rational(90));
  auto q = parse_problem("a : ; b : ; c : ; d : ? rconst a b c d 3/6");
  CHECK(q.goal.literal == Rational(1, 2));
  CHECK(q.goal.str() == "rconst a b c d 1/2");
}

TEST_CASE("rules") {
  auto rules = parse_rules("r53 : simtrir A B C P Q R => eqratio A B P Q B C Q R");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].premises.size() == 1);
  CHECK(rules[0].conclusions.size() == 1);
  CHECK(parse_rules("").empty());
  try {
    parse_rules("bad : coll A B C => para A B D E");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundConclusionVariable);
    CHECK(e.token() == "D");
  }
  CHECK(code_of([] { parse_rules("x : coll A B C => coll B A C\nx : coll A B C => coll C B A"); }) ==
        ErrorCode::DuplicateRuleName);
  auto g = parse_rules("g : eqangle A B B C Q R P Q , sameclock A B C P Q R => para A B A B");
  CHECK(g[0].premises.size() == 1);
  CHECK(g[0].numeric_guards.size() == 1);
}

TEST_CASE("record with empty sections") {
  Record r;
  r.problem = parse_problem("a : ; b : ; c : coll a b c [000] ? coll a b c");
  auto text = serialize_record(r);
  CHECK(text.find("<aux>\n</aux>") != std::string::npos);
  CHECK(text.find("<numerical_check>\n</numerical_check>") != std::string::npos);
  CHECK(parse_record(text) == r);
}

TEST_CASE("dangling dependency") {
  auto r = parse_record(tangent_figure());
  r.proof.back().deps.push_back(999);
  CHECK(find_dangling_dependency(r) == 999);
  try {
    serialize_record(r);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DanglingDependency);
    CHECK(e.token() == "999");
  }
}

TEST_CASE("manifest lines") {
  RecordMeta m{"shard-00000.txt", 3, "cong", 8, 1, 9, 42};
  CHECK(parse_manifest_line(manifest_line(m)) == m);
}

TEST_CASE("construction scripts") {
  const auto& cat = default_catalog();
  auto s = parse_construction_script("x = orthocenter x a b c", cat);
  REQUIRE(s.size() == 1);
  CHECK(s[0].name == "orthocenter");
  CHECK(s[0].outs == std::vector<std::string>{"x"});
  CHECK(s[0].args == std::vector<std::string>{"a", "b", "c"});
  CHECK(s[0].category == Category::OTHERS);

  auto t = parse_construction_script("a b c = triangle a b c", cat);
  REQUIRE(t.size() == 1);
  CHECK(t[0].category == Category::BASIC);
  CHECK(t[0].outs.size() == 3);
  CHECK(t[0].args.empty());

  CHECK(code_of([&] { parse_construction_script("x = orthocenter x a b", cat); }) ==
        ErrorCode::WrongArgCount);
  CHECK(code_of([&] { parse_construction_script("x = nothing x a", cat); }) ==
        ErrorCode::UnknownConstruction);

  auto pair = parse_construction_script("x = on_line x a b, on_circle x o a", cat);
  REQUIRE(pair.size() == 2);
  CHECK(pair[0].line == pair[1].line);
  CHECK(serialize_construction_line(pair) == "x = on_line x a b, on_circle x o a");
}

TEST_CASE("parsing is total on junk input") {
  const std::string samples[] = {"", "?", ";;;", "a : [", "a : ; ? coll a a", "<problem>",
                                 "a : coll a a a [xyz] ? coll a a a", "\xff\xfe",
                                 "a b : ; ? cong a b a b [1"};
  for (const auto& s : samples) {
    try {
      parse_problem(s);
    } catch (const Error&) {
    }
    try {
      parse_record(s);
    } catch (const Error&) {
    }
  }
  CHECK(true);
}
