#include "geodd/traceback.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "geodd/diagram.hpp"
#include "geodd/error.hpp"

namespace geodd {

ProofDag trace(const Engine& eng, FactId goal) {
  ProofDag dag;
  dag.goal = goal;
  std::vector<char> seen(eng.facts().size(), 0);
  std::vector<FactId> stack{goal};
  while (!stack.empty()) {
    FactId id = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(id)]) continue;
    seen[static_cast<std::size_t>(id)] = 1;
    const Fact& f = eng.fact(id);
    switch (f.kind) {
      case FactKind::premise:
        dag.premises.push_back(id);
        break;
      case FactKind::check:
        dag.checks.push_back(id);
        break;
      case FactKind::derived:
        dag.steps.push_back(id);
        for (FactId d : f.deps) stack.push_back(d);
        break;
    }
  }
  // Dependencies always precede their users, so id order is topological.
  std::sort(dag.steps.begin(), dag.steps.end());
  std::sort(dag.premises.begin(), dag.premises.end());
  std::sort(dag.checks.begin(), dag.checks.end());
  return dag;
}

AuxSplit classify_aux(const Figure& fig, const Atom& goal, const ProofDag& dag,
                      const Engine& eng) {
  const std::size_t nc = fig.clauses.size();
  // Adds the clause of every point in `pts`, then the points its statements mention.
  auto close = [&](std::vector<char>& in, std::vector<int> pts) {
    while (!pts.empty()) {
      int p = pts.back();
      pts.pop_back();
      int c = fig.clause_of(p);
      if (c < 0 || in[static_cast<std::size_t>(c)]) continue;
      in[static_cast<std::size_t>(c)] = 1;
      for (const auto& ns : fig.clauses[static_cast<std::size_t>(c)].statements)
        for (const auto& a : ns.stmt.args) pts.push_back(*fig.index_of(a));
    }
  };
  auto points_of = [](const Atom& t) {
    std::vector<int> out;
    for (std::size_t i = 0; i < t.size(); ++i) out.push_back(t.a[i]);
    return out;
  };
  std::vector<char> required(nc, 0), included(nc, 0);
  close(required, points_of(goal));
  included = required;
  for (FactId id : dag.premises) {
    int c = eng.fact(id).clause;
    if (c >= 0 && !included[static_cast<std::size_t>(c)]) {
      std::vector<int> pts;
      for (const auto& ns : fig.clauses[static_cast<std::size_t>(c)].statements)
        for (const auto& a : ns.stmt.args) pts.push_back(*fig.index_of(a));
      for (const auto& p : fig.clauses[static_cast<std::size_t>(c)].points)
        pts.push_back(*fig.index_of(p));
      close(included, pts);
    }
  }
  for (FactId id : dag.steps) close(included, points_of(eng.fact(id).atom));
  for (FactId id : dag.checks) close(included, points_of(eng.fact(id).atom));
  AuxSplit out;
  for (std::size_t c = 0; c < nc; ++c) {
    if (required[c])
      out.problem.push_back(static_cast<int>(c));
    else if (included[c])
      out.aux.push_back(static_cast<int>(c));
  }
  return out;
}

Record make_record(const Engine& eng, const ProofDag& dag, const AuxSplit& split) {
  const Figure& fig = eng.figure();
  // Engine ids of premise facts, clause by clause.
  std::vector<FactId> base(fig.clauses.size() + 1, 0);
  for (std::size_t c = 0; c < fig.clauses.size(); ++c)
    base[c + 1] = base[c] + static_cast<FactId>(fig.clauses[c].statements.size());

  std::unordered_map<FactId, FactId> renum;
  FactId next = 0;
  auto emit_clause = [&](int c, std::string label) {
    PremiseClause out = fig.clauses[static_cast<std::size_t>(c)];
    out.label = std::move(label);
    for (std::size_t k = 0; k < out.statements.size(); ++k) {
      renum[base[static_cast<std::size_t>(c)] + static_cast<FactId>(k)] = next;
      out.statements[k].id = next++;
    }
    return out;
  };
  Record rec;
  for (int c : split.problem) rec.problem.clauses.push_back(emit_clause(c, ""));
  for (std::size_t i = 0; i < split.aux.size(); ++i) {
    char label[16];
    std::snprintf(label, sizeof label, "x%02zu", i);
    rec.aux.push_back(emit_clause(split.aux[i], label));
  }
  // Duplicated premises resolve to the first stored copy.
  for (FactId p : dag.premises)
    if (!renum.count(p)) throw Error(ErrorCode::DanglingDependency, "premise outside record");
  for (FactId id : dag.checks) {
    renum[id] = next;
    rec.numerical_checks.push_back({eng.to_statement(eng.fact(id).atom), next++});
  }
  for (FactId id : dag.steps) {
    const Fact& f = eng.fact(id);
    ProofStep s;
    s.conclusion = eng.to_statement(f.atom);
    s.rule = f.rule;
    for (FactId d : f.deps) s.deps.push_back(renum.at(d));
    renum[id] = next;
    s.id = next++;
    rec.proof.push_back(std::move(s));
  }
  rec.problem.goal = eng.to_statement(eng.fact(dag.goal).atom);
  return rec;
}

Record make_record(const Engine& eng, FactId goal) {
  ProofDag dag = trace(eng, goal);
  return make_record(eng, dag, classify_aux(eng.figure(), eng.fact(goal).atom, dag, eng));
}

namespace {

struct Unifier {
  const CompiledRule& rule;
  std::vector<std::pair<const CompiledRule::Template*, std::vector<Atom>>> slots;
  Atom target;
  std::array<PointId, 8> b{};
  std::array<bool, 8> set{};

  bool concludes() const {
    Atom key = canonical(target);
    for (const auto& c : rule.conclusions)
      if (canonical(rule.instantiate(c, b)) == key) return true;
    return false;
  }

  bool run(std::size_t i) {
    if (i == slots.size()) return concludes();
    const auto& [t, variants] = slots[i];
    for (const Atom& v : variants) {
      if (has_literal(t->pred) && v.lit != t->lit) continue;
      auto saved_b = b;
      auto saved_set = set;
      bool ok = true;
      for (std::size_t k = 0; k < t->size() && ok; ++k) {
        auto var = static_cast<std::size_t>(t->v[k]);
        if (set[var])
          ok = b[var] == v.a[k];
        else {
          set[var] = true;
          b[var] = v.a[k];
        }
      }
      if (ok && run(i + 1)) return true;
      b = saved_b;
      set = saved_set;
    }
    return false;
  }
};

}  // namespace

ReplayResult replay(const Record& rec, const Figure& fig, std::span<const CompiledRule> rules,
                    const Tolerances& tol) {
  NumericTable num(fig, tol);
  enum class Kind { premise, check, step };
  std::unordered_map<FactId, std::pair<Atom, Kind>> known;
  auto fail = [](std::optional<FactId> id, std::string msg) {
    return ReplayResult{false, id, std::move(msg)};
  };
  auto to_atom = [&](const Statement& s) -> std::optional<Atom> {
    if (s.args.size() != arity(s.pred)) return std::nullopt;
    Atom t;
    t.pred = s.pred;
    t.lit = s.literal;
    for (std::size_t i = 0; i < s.args.size(); ++i) {
      auto k = fig.index_of(s.args[i]);
      if (!k) return std::nullopt;
      t.a[i] = static_cast<PointId>(*k);
    }
    return t;
  };
  auto define = [&](const NumberedStatement& ns, Kind kind) -> std::optional<ReplayResult> {
    auto t = to_atom(ns.stmt);
    if (!t) return fail(ns.id, "unknown point in " + ns.stmt.str());
    if (!ns.id) return std::nullopt;
    if (known.count(*ns.id)) return fail(ns.id, "duplicate id");
    known.emplace(*ns.id, std::pair{*t, kind});
    return std::nullopt;
  };
  for (const auto* clauses : {&rec.problem.clauses, &rec.aux})
    for (const auto& c : *clauses)
      for (const auto& ns : c.statements)
        if (auto r = define(ns, Kind::premise)) return *r;
  for (const auto& ns : rec.numerical_checks) {
    if (auto r = define(ns, Kind::check)) return *r;
    auto t = to_atom(ns.stmt);
    if (!num.admissible(*t) || !num.eval(*t)) return fail(ns.id, "numerical check fails");
  }

  for (const auto& step : rec.proof) {
    auto concl = to_atom(step.conclusion);
    if (!concl) return fail(step.id, "unknown point in conclusion");
    std::vector<std::pair<FactId, Atom>> deps;
    for (FactId d : step.deps) {
      auto it = known.find(d);
      if (it == known.end()) return fail(step.id, "undefined dependency " + format_id(d));
      deps.emplace_back(d, it->second.first);
    }
    if (!num.admissible(*concl) || !num.eval(*concl))
      return fail(step.id, "conclusion is numerically false");
    if (step.rule == "a00" || step.rule == "a01") {
      if (step.rule != chain_rule(concl->pred)) return fail(step.id, "wrong chain rule");
      for (const auto& [d, t] : deps)
        if (known.at(d).second == Kind::check) return fail(step.id, "chain uses a numerical check");
      Symbolic s(static_cast<int>(fig.size()));
      s.build(deps);
      if (!s.holds(*concl)) return fail(step.id, "chain does not derive the conclusion");
    } else {
      auto rule = std::find_if(rules.begin(), rules.end(),
                               [&](const CompiledRule& r) { return r.name == step.rule; });
      if (rule == rules.end()) return fail(step.id, "unknown rule " + step.rule);
      if (deps.size() != rule->premises.size() + rule->guards.size())
        return fail(step.id, "wrong number of dependencies");
      Unifier u{*rule, {}, *concl};
      for (std::size_t i = 0; i < deps.size(); ++i) {
        bool guard = i >= rule->premises.size();
        const auto& t = guard ? rule->guards[i - rule->premises.size()] : rule->premises[i];
        Kind kind = known.at(deps[i].first).second;
        if (guard != (kind == Kind::check))
          return fail(step.id, "numerical checks must match the rule's guards");
        if (deps[i].second.pred != t.pred) return fail(step.id, "dependency predicate mismatch");
        std::vector<Atom> variants;
        for_each_variant(deps[i].second, [&](const Atom& v) { variants.push_back(v); });
        std::sort(variants.begin(), variants.end());
        variants.erase(std::unique(variants.begin(), variants.end()), variants.end());
        u.slots.emplace_back(&t, std::move(variants));
      }
      if (!u.run(0)) return fail(step.id, "rule " + step.rule + " does not yield the conclusion");
    }
    if (known.count(step.id)) return fail(step.id, "duplicate id");
    known.emplace(step.id, std::pair{*concl, Kind::step});
  }

  auto goal = to_atom(rec.problem.goal);
  if (!goal) return fail(std::nullopt, "unknown point in goal");
  Atom key = canonical(*goal);
  if (!rec.proof.empty()) {
    if (canonical(known.at(rec.proof.back().id).first) != key)
      return fail(rec.proof.back().id, "last step is not the goal");
  } else {
    bool premise = false;
    for (const auto& [id, v] : known) premise |= v.second == Kind::premise && canonical(v.first) == key;
    if (!premise) return fail(std::nullopt, "goal is neither proved nor a premise");
  }
  return {};
}

ReplayResult check_record(const Record& rec, std::span<const CompiledRule> rules,
                          const Tolerances& tol, std::uint64_t seed, int figures) {
  Problem p = rec.problem;
  p.clauses.insert(p.clauses.end(), rec.aux.begin(), rec.aux.end());
  ReplayResult last{false, std::nullopt, "no figure could be built"};
  Rng rng(seed);
  for (int i = 0; i < figures; ++i) {
    Figure fig;
    try {
      fig = figure_from_problem(p, tol, rng, 4);
    } catch (const Error& e) {
      last.message = e.what();
      continue;
    }
    last = replay(rec, fig, rules, tol);
    // A failing numerical check may only mean another configuration was sketched.
    if (last || last.message != "numerical check fails") return last;
  }
  return last;
}

}  // namespace geodd
