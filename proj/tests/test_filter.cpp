#include <doctest.h>

#include <sstream>

#include "geodd/filter.hpp"

using namespace geodd;

namespace {

Figure table_figure() {
  Figure f;
  f.add_point("a", {0, 0});
  f.add_point("b", {1, 0});
  f.add_point("c", {0, 1});
  f.add_point("d", {1, 1});
  f.add_point("e", {0.31, 0.72});
  f.add_point("f", {2.13, -0.41});
  f.add_point("g", {-0.77, 1.37});
  f.add_point("h", {1.61, 2.05});
  f.add_point("i", {-1.29, -0.83});
  f.add_point("j", {0.57, -1.91});
  f.add_point("m", {2, 0});
  return f;
}

Atom atom(const std::string& text, Rational lit = {}) {
  std::istringstream in(text);
  std::string name, p;
  in >> name;
  Atom t;
  t.pred = *predicate_from_name(name);
  t.lit = lit;
  std::size_t i = 0;
  auto fig = table_figure();
  while (in >> p) t.a[i++] = static_cast<PointId>(*fig.index_of(p));
  return t;
}

struct Row {
  const char* text;
  Rational lit;
  FilterReason reason;
};

}  // namespace

TEST_CASE("one instance per filtering row") {
  auto fig = table_figure();
  NumericTable num(fig, {});
  std::vector<Atom> similar = {atom("simtri e f g h i j")};
  const Row rows[] = {
      {"aconst a b c d", Rational(0), FilterReason::ReducibleToPara},
      {"rconst a b c d", Rational(1), FilterReason::ReducibleToCong},
      {"cong a b a b", {}, FilterReason::TrivialSelf},
      {"para a b a b", {}, FilterReason::TrivialSelf},
      {"para a b a m", {}, FilterReason::ReducibleToColl},
      {"eqratio a b c e a b c e", {}, FilterReason::TrivialSelf},
      {"eqratio a b c e c e a b", {}, FilterReason::ReducibleToCong},
      {"eqratio a b a b e f g h", {}, FilterReason::ReducibleToCong},
      {"eqratio a b c d e f g h", {}, FilterReason::ReducibleToCong},
      {"eqratio a b e f a c g h", {}, FilterReason::ReducibleToCong},
      {"eqangle a b c e a b c e", {}, FilterReason::TrivialSelf},
      {"eqangle a b a e a e a b", {}, FilterReason::ReducibleToPerp},
      {"eqangle a b a b e f e g", {}, FilterReason::ReducibleToPara},
      {"eqangle a b a e c d c e", {}, FilterReason::ReducibleToPara},
      {"eqangle a b a c e f e g", {}, FilterReason::ReducibleToPerp},
      {"eqangle f e f g i h i j", {}, FilterReason::ReducibleToSimilarity},
      {"simtri e f g e f g", {}, FilterReason::TrivialSelf},
      {"simtrir e f g e g f", {}, FilterReason::TrivialSelf},
      {"contri e f g e f g", {}, FilterReason::TrivialSelf},
      {"contrir e f g e g f", {}, FilterReason::TrivialSelf},
      {"sameclock e f g h i j", {}, FilterReason::SameclockExcluded},
      {"eqangle e f e g a h a j", {}, FilterReason::Keep},
      {"eqratio e f e g h i h j", {}, FilterReason::Keep},
      {"cong e f g h", {}, FilterReason::Keep},
  };
  for (const auto& r : rows) {
    INFO(std::string(r.text));
    auto v = judge(atom(r.text, r.lit), num, similar);
    CHECK(filter_reason_name(v.reason) == filter_reason_name(r.reason));
    CHECK(v.keep() == (r.reason == FilterReason::Keep));
    // Every variant gets the same verdict.
    for_each_variant(atom(r.text, r.lit), [&](const Atom& x) {
      CHECK(judge(x, num, similar).reason == v.reason);
    });
  }
}

TEST_CASE("dedupe keeps one representative per class") {
  Figure f;
  // Two translated copies of the same pair of directions.
  f.add_point("a", {0, 0});
  f.add_point("b", {1, 0.2});
  f.add_point("c", {0.3, 1});
  f.add_point("d", {2, 0});
  f.add_point("e", {3, 0.2});
  f.add_point("g", {2.3, 1});
  f.add_point("p", {-1, -1});
  f.add_point("q", {-0.4, -1.7});
  NumericTable num(f, {});
  auto mk = [&](std::initializer_list<const char*> names) {
    Atom t;
    t.pred = Predicate::eqangle;
    std::size_t i = 0;
    for (auto n : names) t.a[i++] = static_cast<PointId>(*f.index_of(n));
    return t;
  };
  Atom x = mk({"a", "b", "a", "c", "p", "q", "p", "a"});
  Atom y = mk({"d", "e", "d", "g", "p", "q", "p", "a"});
  auto out = dedupe({x, y}, num);
  CHECK(out.size() == 1);
  CHECK(dedupe(out, num) == out);
  CHECK(dedupe({}, num).empty());

  Atom r1, r2;
  r1.pred = r2.pred = Predicate::eqratio;
  r1.a = mk({"a", "b", "a", "c", "p", "q", "p", "a"}).a;
  r2.a = mk({"d", "e", "d", "g", "p", "q", "p", "a"}).a;
  CHECK(dedupe({r1, r2}, num).size() == 1);
}
