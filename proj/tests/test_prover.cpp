#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "geodd/diagram.hpp"
#include "geodd/prover.hpp"
#include "geodd/traceback.hpp"

using namespace geodd;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Problem tangent_problem() {
  return parse_record(slurp(std::string(GEODD_TEST_DATA) + "/tangent_lengths.txt")).problem;
}

std::vector<std::pair<std::string, Problem>> suite() {
  std::vector<std::pair<std::string, Problem>> out;
  for (const auto& e : std::filesystem::directory_iterator(std::string(GEODD_SOURCE_DIR) + "/data/problems"))
    if (e.path().extension() == ".gex") out.emplace_back(e.path().stem().string(), parse_problem(slurp(e.path())));
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

ProofState root_state(const Problem& p) {
  ProofState s;
  s.problem = &p;
  Rng rng(1);
  s.figure = figure_from_problem(p, {}, rng);
  return s;
}

class FixedProposer : public Proposer {
 public:
  explicit FixedProposer(std::vector<Candidate> c) : c_(std::move(c)) {}
  std::vector<Candidate> propose(const ProofState&, std::size_t k) override {
    auto v = c_;
    if (v.size() > k) v.resize(k);
    return v;
  }

 private:
  std::vector<Candidate> c_;
};

// Mostly malformed, unsound or unbuildable clauses, with the occasional
// useful one so that some searches succeed.
class AdversarialProposer : public Proposer {
 public:
  explicit AdversarialProposer(std::uint64_t seed) : rng_(seed) {}
  std::vector<Candidate> propose(const ProofState& s, std::size_t k) override {
    const auto& names = s.figure.names();
    auto any = [&] { return names[rng_() % names.size()]; };
    std::string x = "x" + std::to_string(rng_() % 3);
    const char* preds[] = {"coll", "para", "perp", "cong", "cyclic", "midp", "eqangle", "eqratio", "sameclock", "simtri"};
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < k; ++i) {
      std::string text;
      switch (rng_() % 9) {
        case 0: text = "%%% nonsense"; break;
        case 1: text = x + " : "; break;
        case 2: text = names[0] + " : coll " + names[0] + " " + any() + " " + any(); break;
        case 3: text = x + " : para " + any() + " " + any() + " " + any() + " " + any(); break;
        case 4: text = x + " = orthocenter " + x + " " + any() + " " + any(); break;
        case 5: text = x + " : cong " + x + " " + any() + " zz " + any(); break;
        default: {
          std::string p = preds[rng_() % std::size(preds)];
          text = x + " : " + p;
          std::size_t ar = p == "coll" ? 3 : p == "midp" ? 3 : p == "eqangle" || p == "eqratio" ? 8 : p == "sameclock" || p == "simtri" ? 6 : 4;
          for (std::size_t j = 0; j < ar; ++j) text += " " + (rng_() % 3 == 0 ? x : any());
        }
      }
      double score = rng_() % 11 == 0 ? std::nan("") : static_cast<double>(rng_() % 100);
      out.push_back({score, text});
    }
    auto good = enumerative_.propose(s, 2);
    out.insert(out.end(), good.begin(), good.end());
    return out;
  }

 private:
  Rng rng_;
  EnumerativeProposer enumerative_;
};

}  // namespace

TEST_CASE("tangent lengths without aux is solved by the enumerative proposer") {
  Problem p = tangent_problem();
  EnumerativeProposer ep;
  SolveStats st;
  auto rec = solve(p, default_compiled_rules(), ep, {}, &st);
  REQUIRE(rec);
  CHECK(st.depth == 1);
  REQUIRE(rec->aux.size() == 1);
  CHECK(rec->aux[0].points.size() == 1);
  CHECK(rec->problem.clauses.size() == p.clauses.size());
  auto r = check_record(*rec, default_compiled_rules());
  INFO(r.message);
  CHECK(r.ok);
}

TEST_CASE("a goal that is a premise is solved at depth 0") {
  Problem p = parse_problem("a b : ; c : midp c a b ? midp c b a");
  EnumerativeProposer ep;
  SolveStats st;
  auto rec = solve(p, default_compiled_rules(), ep, {}, &st);
  REQUIRE(rec);
  CHECK(st.depth == 0);
  CHECK(rec->aux.empty());
  CHECK(rec->proof.empty());
  CHECK(check_record(*rec, default_compiled_rules()).ok);
}

TEST_CASE("depth 0 does not add aux") {
  SolveOptions opt;
  opt.budget.depth = 0;
  EnumerativeProposer ep;
  CHECK_FALSE(solve(tangent_problem(), default_compiled_rules(), ep, opt));
}

TEST_CASE("external proposer speaks the line protocol") {
  Problem p = tangent_problem();
  ProofState s = root_state(p);

  ExternalProposer stub("cat > /dev/null; printf '1.0\\th : coll a d h , perp a d h e\\n'");
  auto c = stub.propose(s, 4);
  REQUIRE(c.size() == 1);
  CHECK(c[0].score == 1.0);
  CHECK(c[0].clause == "h : coll a d h , perp a d h e");

  auto rec = solve(p, default_compiled_rules(), stub, {});
  REQUIRE(rec);
  REQUIRE(rec->aux.size() == 1);
  CHECK(rec->aux[0].points == std::vector<std::string>{"h"});
  CHECK(check_record(*rec, default_compiled_rules()).ok);

  ExternalProposer garbage("cat > /dev/null; echo 'no tab here'; printf 'x\\th : coll a b h\\n'");
  CHECK(garbage.propose(s, 4).empty());
  CHECK(garbage.malformed() == 2);

  ExternalProposer k_echo("cat > /dev/null; printf '2\\th = midpoint h a b\\n' | head -n \"$GEODD_PROPOSALS\"");
  CHECK(k_echo.propose(s, 1).size() == 1);

  ExternalProposer reads_state("grep -c '<aux>' | sed 's/^/0\\t/'");
  auto echoed = reads_state.propose(s, 4);
  REQUIRE(echoed.size() == 1);
  CHECK(echoed[0].clause == "1");

  ExternalProposer slow("sleep 5", 200);
  CHECK(slow.propose(s, 4).empty());
}

TEST_CASE("an unavailable proposer degrades to the fallback") {
  auto missing = std::make_shared<ExternalProposer>("/nonexistent/proposer");
  Problem p = tangent_problem();
  ProofState s = root_state(p);
  CHECK_THROWS_AS(missing->propose(s, 2), Error);
  FallbackProposer fp(missing, std::make_shared<EnumerativeProposer>());
  auto rec = solve(tangent_problem(), default_compiled_rules(), fp, {});
  CHECK(fp.degraded());
  CHECK(rec);
}

TEST_CASE("interleave alternates ranked lists") {
  auto a = std::make_shared<FixedProposer>(std::vector<Candidate>{{1, "A2"}, {5, "A1"}});
  auto b = std::make_shared<FixedProposer>(std::vector<Candidate>{{9, "B1"}, {3, "A1"}, {0, "B2"}});
  InterleaveProposer ip(a, b);
  Problem p = parse_problem("a b : ? cong a b a b");
  ProofState s = root_state(p);
  auto c = ip.propose(s, 10);
  std::vector<std::string> got;
  for (const auto& x : c) got.push_back(x.clause);
  CHECK(got == std::vector<std::string>{"A1", "B1", "A2", "B2"});
  CHECK(c[0].score > c[1].score);
  CHECK(ip.propose(s, 2).size() == 2);
}

TEST_CASE("enumerative proposer") {
  EnumerativeProposer ep;
  Problem two = parse_problem("a b : ? cong a b b a");
  ProofState s2 = root_state(two);
  auto c = ep.propose(s2, 100);
  REQUIRE_FALSE(c.empty());
  for (const auto& x : c) {
    auto step = parse_construction_script(x.clause, default_catalog());
    REQUIRE(step.size() == 1);
    CHECK(step[0].args.size() <= 2);
  }
  CHECK(ep.propose(s2, 1).size() == 1);

  // Same state, same ranking.
  Problem alt = parse_problem("a b c : ? perp a b a c");
  ProofState s3 = root_state(alt);
  auto all = ep.propose(s3, 1000);
  auto again = ep.propose(s3, 1000);
  CHECK(all.size() == again.size());
  for (std::size_t i = 0; i < all.size() && i < again.size(); ++i) CHECK(all[i].clause == again[i].clause);
  for (const auto& x : all) CHECK(std::isfinite(x.score));
}

TEST_CASE("candidates are validated") {
  Problem p = tangent_problem();
  ProofState s = root_state(p);
  CHECK(parse_candidate("h : coll a d h , perp a d h e", s).points == std::vector<std::string>{"h"});
  CHECK(parse_candidate("h : ", s).statements.empty());
  CHECK(parse_candidate("h = foot h e a d", s).statements.size() == 2);
  for (const char* bad : {"a : coll a b c", "h : para a b c d", "h = foot h e a", "h : cong h a zz b",
                          "%%%", "h : sameclock h a b c d e", "h = foot h b c d"}) {
    INFO(std::string(bad));
    CHECK_THROWS_AS(parse_candidate(bad, s), Error);
  }
}

TEST_CASE("adversarial proposals never yield an invalid record") {
  auto problems = suite();
  problems.emplace_back("tangent", tangent_problem());
  std::size_t solved = 0, invalid = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    for (const auto& [name, p] : problems) {
      if (name < "25") continue;  // the later problems need aux
      AdversarialProposer adv(seed);
      SolveOptions opt;
      opt.budget.beam = 2;
      opt.budget.depth = 2;
      opt.seed = seed;
      SolveStats st;
      auto rec = solve(p, default_compiled_rules(), adv, opt, &st);
      invalid += st.invalid;
      if (!rec) continue;
      ++solved;
      auto r = check_record(*rec, default_compiled_rules());
      INFO(name);
      INFO(r.message);
      CHECK(r.ok);
    }
  CHECK(invalid > 0);
  CHECK(solved > 0);
}

TEST_CASE("solved set grows with beam and depth") {
  auto problems = suite();
  REQUIRE(problems.size() >= 25);
  std::map<std::pair<int, int>, std::set<std::string>> solved;
  for (auto [b, d] : {std::pair{1, 0}, {1, 1}, {2, 1}, {1, 2}, {4, 2}}) {
    SolveOptions opt;
    opt.budget.beam = b;
    opt.budget.depth = d;
    for (const auto& [name, p] : problems) {
      EnumerativeProposer ep;
      if (solve(p, default_compiled_rules(), ep, opt)) solved[{b, d}].insert(name);
    }
  }
  auto subset = [&](std::pair<int, int> x, std::pair<int, int> y) {
    return std::includes(solved[y].begin(), solved[y].end(), solved[x].begin(), solved[x].end());
  };
  CHECK(subset({1, 0}, {1, 1}));
  CHECK(subset({1, 1}, {2, 1}));
  CHECK(subset({1, 1}, {1, 2}));
  CHECK(subset({2, 1}, {4, 2}));
  CHECK(subset({1, 2}, {4, 2}));
  CHECK(solved[{4, 2}].size() >= 20);
  CHECK(solved[{4, 2}].size() > solved[{1, 0}].size());
}

TEST_CASE("solving is deterministic and independent of the worker count") {
  auto problems = suite();
  std::vector<Problem> ps;
  for (const auto& [name, p] : problems)
    if (name >= "25") ps.push_back(p);
  auto make = [] { return std::make_unique<EnumerativeProposer>(); };
  auto one = solve_all(ps, default_compiled_rules(), make, {}, 1);
  auto two = solve_all(ps, default_compiled_rules(), make, {}, 3);
  REQUIRE(one.size() == two.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].error == two[i].error);
    REQUIRE(one[i].record.has_value() == two[i].record.has_value());
    if (one[i].record) CHECK(serialize_record(*one[i].record) == serialize_record(*two[i].record));
  }
}
