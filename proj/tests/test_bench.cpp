#include <doctest.h>

#include <json.hpp>

#include "geodd/bench.hpp"
#include "geodd/diagram.hpp"

using namespace geodd;

TEST_CASE("a trivial figure benches equal") {
  Tolerances tol;
  Rng rng(1);
  auto script = parse_construction_script("a b c = triangle a b c", default_catalog());
  BenchCase c{"triangle", build_figure(script, default_catalog(), tol, rng)};
  auto row = bench_figure(c, default_compiled_rules(), Budget{}, tol);
  CHECK(row.points == 3);
  CHECK(row.equal);
  CHECK(row.speedup().has_value());
}

TEST_CASE("report math and mismatch handling") {
  BenchReport r;
  r.rows.push_back({"x", 12, 10, 400, 10, true});
  r.rows.push_back({"y", 12, 10, 100, 10, true});
  REQUIRE(r.geomean_speedup().has_value());
  CHECK(*r.geomean_speedup() == doctest::Approx(20.0));
  CHECK_NOTHROW(require_equal(r));
  CHECK(r.table().find("20.0x") != std::string::npos);

  auto lines = r.jsonl();
  auto first = nlohmann::json::parse(lines.substr(0, lines.find('\n')));
  CHECK(first["problem"] == "x");
  CHECK(first["speedup"].get<double>() == doctest::Approx(40.0));

  r.rows[1].equal = false;
  CHECK_FALSE(r.rows[1].speedup().has_value());
  CHECK_FALSE(r.geomean_speedup().has_value());
  CHECK(r.table().find("n/a") != std::string::npos);
  try {
    require_equal(r);
    FAIL("expected ClosureMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClosureMismatch);
    CHECK(e.token() == "y");
  }
}

TEST_CASE("bundled bench figures have at least 12 points") {
  auto cases = load_bench_dir(std::string(GEODD_SOURCE_DIR) + "/data/bench", default_catalog(),
                              Tolerances{}, 1);
  REQUIRE(cases.size() >= 3);
  for (const auto& c : cases) CHECK(c.figure.size() >= 12);
}
