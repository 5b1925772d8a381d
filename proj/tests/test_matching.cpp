#include <doctest.h>

#include <string>

#include "geodd/bench.hpp"
#include "geodd/generator.hpp"

using namespace geodd;

namespace {

// Random generator figures with at most `max_points` points, in seed order.
std::vector<Figure> random_figures(std::size_t count, std::size_t max_points, std::uint64_t seed) {
  SampleConfig cfg;
  std::vector<Figure> out;
  for (; out.size() < count; ++seed) {
    Rng rng(seed);
    try {
      auto s = sample_script(cfg, default_catalog(), rng);
      if (s.figure.size() <= max_points) out.push_back(std::move(s.figure));
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace

TEST_CASE("naive and partial matching give the same facts on random figures") {
  auto figs = random_figures(50, 8, 1);
  Tolerances tol;
  int i = 0;
  for (const auto& f : figs) {
    auto row = bench_figure({"fig" + std::to_string(i++), f}, default_compiled_rules(),
                            Budget{16, 20000, 0}, tol);
    INFO(row.name);
    CHECK(row.equal);
    CHECK(row.facts > 0);
  }
}

TEST_CASE("pre-identification equals brute force") {
  auto figs = random_figures(20, 10, 500);
  Tolerances tol;
  for (const auto& f : figs) {
    NumericTable num(f, tol);
    auto idx = pre_identify(num, false);
    for (Predicate p : {Predicate::eqangle, Predicate::eqratio}) {
      auto got = idx.of(p);
      std::sort(got.begin(), got.end());
      auto want = brute_force_candidates(num, p);
      INFO(predicate_name(p));
      CHECK(got.size() == want.size());
      CHECK(got == want);
    }
  }
}
