#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "geodd/formal_lang.hpp"
#include "geodd/numeric.hpp"
#include "geodd/symbolic.hpp"

namespace geodd {

// A rule with variables replaced by dense indices.
struct CompiledRule {
  struct Template {
    Predicate pred = Predicate::coll;
    std::array<int, kMaxArity> v{};
    Rational lit{};
    std::size_t size() const { return arity(pred); }
  };
  std::string name;
  std::vector<std::string> vars;
  std::vector<Template> premises;
  std::vector<Template> guards;
  std::vector<Template> conclusions;

  Atom instantiate(const Template& t, std::span<const PointId> binding) const;
};

std::vector<CompiledRule> compile_rules(const std::vector<Rule>& rules);
const std::vector<Rule>& default_rules();
const std::vector<CompiledRule>& default_compiled_rules();

// Angle and length tables for one figure; evaluation agrees with holds().
class NumericTable {
 public:
  NumericTable(const Figure& fig, const Tolerances& tol);

  int points() const { return n_; }
  const Tolerances& tol() const { return tol_; }
  Point point(int i) const { return pts_[static_cast<std::size_t>(i)]; }
  bool distinct(int i, int j) const { return !close_[idx(i, j)]; }
  double theta(int i, int j) const { return theta_[idx(i, j)]; }
  double length(int i, int j) const { return len_[idx(i, j)]; }

  // Nondegenerate and not trivially true; the same test for premises and
  // conclusions. eqangle/eqratio are limited to 6 distinct points by default.
  bool admissible(const Atom& t, bool six_point_limit = true) const;
  // Numeric truth; requires admissible(t) or a predicate without degeneracy checks.
  bool eval(const Atom& t) const;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * n_ + j); }
  bool triangle_ok(int a, int b, int c) const;

  int n_;
  Tolerances tol_;
  std::vector<Point> pts_;
  std::vector<double> theta_;
  std::vector<double> len_;
  std::vector<char> close_;
};

// Numerically true statements bucketed per predicate (canonical atoms).
struct NumericIndex {
  std::array<std::vector<Atom>, kPredicateCount> by_pred;
  const std::vector<Atom>& of(Predicate p) const { return by_pred[static_cast<std::size_t>(p)]; }
};

// Numerical pre-identification. eqangle/eqratio via sorted value windows,
// simtri/simtrir/contri/contrir via shape buckets. With `six_point_limit`,
// eqangle/eqratio candidates over more than 6 distinct points are dropped.
NumericIndex pre_identify(const NumericTable& num, bool six_point_limit = false);

// Brute-force reference for eqangle/eqratio candidates (canonical, sorted).
std::vector<Atom> brute_force_candidates(const NumericTable& num, Predicate p);

enum class MatchMode { naive, partial };

struct Budget {
  int max_rounds = 32;
  std::size_t max_facts = 100000;
  long long max_millis = 0;  // 0: unlimited
};

enum class FactKind { premise, check, derived };

struct Fact {
  Atom atom;
  FactKind kind = FactKind::premise;
  int clause = -1;  // premise clause index
  std::string rule;
  std::vector<FactId> deps;
  int round = 0;
};

struct RuleStats {
  std::string rule;
  int round = 0;
  std::size_t candidates = 0;
  std::size_t pruned = 0;
  std::size_t premise_checks = 0;
  std::size_t emitted = 0;
  std::size_t rejected = 0;
  long long micros = 0;
};

struct EngineOptions {
  MatchMode mode = MatchMode::partial;
  Budget budget;
  Tolerances tol;
};

class Engine {
 public:
  // Premises are taken from fig.clauses in order.
  Engine(const Figure& fig, std::span<const CompiledRule> rules, EngineOptions opt = {});

  // Runs to a fixed point or until the budget runs out.
  void saturate();
  bool incomplete() const { return incomplete_; }
  int rounds() const { return rounds_; }

  const Figure& figure() const { return fig_; }
  const NumericTable& numeric() const { return num_; }
  const std::vector<Fact>& facts() const { return facts_; }
  const Fact& fact(FactId id) const { return facts_[static_cast<std::size_t>(id)]; }
  const std::vector<RuleStats>& stats() const { return stats_; }
  std::span<const CompiledRule> rules() const { return rules_; }

  std::optional<Atom> to_atom(const Statement& s) const;
  Statement to_statement(const Atom& t) const;

  // Stored fact with the same canonical form.
  std::optional<FactId> find(const Atom& t) const;
  // Goal lookup honoring the equivalence structures; adds a chain fact when
  // the goal is only implied. Reflexive goals are not materialized.
  std::optional<FactId> query(const Atom& goal);
  std::optional<FactId> query(const Statement& goal);
  bool implied(const Atom& t);

  // Numerically true, admissible statements implied by the database.
  std::vector<Atom> closure();
  // Canonical text of the closure, for comparisons across runs.
  std::set<std::string> fact_set();

 private:
  using Binding = std::array<PointId, 8>;

  FactId add(const Atom& t, FactKind kind, std::string rule, std::vector<FactId> deps,
             int clause = -1);
  void rebuild_symbolic();
  bool symbolic_holds(const Atom& t) const;
  FactId materialize(const Atom& t);
  std::vector<Binding> match(const CompiledRule& r, RuleStats& st);
  std::vector<Binding> match_naive(const CompiledRule& r, RuleStats& st);
  std::vector<Binding> match_partial(const CompiledRule& r, RuleStats& st);
  bool out_of_budget() const;

  Figure fig_;
  std::span<const CompiledRule> rules_;
  EngineOptions opt_;
  NumericTable num_;
  std::optional<NumericIndex> index_;
  std::vector<Fact> facts_;
  std::unordered_map<Atom, FactId, AtomHash> by_key_;
  Symbolic sym_;
  std::size_t sym_facts_ = static_cast<std::size_t>(-1);  // facts seen by sym_
  mutable std::unordered_map<Atom, bool, AtomHash> sym_cache_;
  // Symmetry variants of this round's true indexed statements, grouped by
  // which argument positions hold equal points.
  struct VariantBucket {
    std::uint32_t mask = 0;
    std::vector<Atom> atoms;
  };
  const std::vector<VariantBucket>& true_variants(Predicate p);
  std::array<std::vector<VariantBucket>, kPredicateCount> true_variants_;
  std::array<std::vector<char>, kPredicateCount> index_true_;  // truth only grows
  std::array<bool, kPredicateCount> true_variants_ready_{};
  std::vector<RuleStats> stats_;
  bool incomplete_ = false;
  int rounds_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace geodd
