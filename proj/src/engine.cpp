#include "geodd/engine.hpp"

#include <algorithm>
#include <map>

#include "geodd/error.hpp"
#include "geodd_data.hpp"

namespace geodd {

Atom CompiledRule::instantiate(const Template& t, std::span<const PointId> binding) const {
  Atom out;
  out.pred = t.pred;
  out.lit = t.lit;
  for (std::size_t i = 0; i < t.size(); ++i) out.a[i] = binding[static_cast<std::size_t>(t.v[i])];
  return out;
}

std::vector<CompiledRule> compile_rules(const std::vector<Rule>& rules) {
  std::vector<CompiledRule> out;
  for (const auto& r : rules) {
    CompiledRule c;
    c.name = r.name;
    c.vars = r.variables();
    if (c.vars.size() > 8)
      throw Error(ErrorCode::Syntax, "rule has more than 8 variables", r.name);
    auto compile = [&](const std::vector<Statement>& in, std::vector<CompiledRule::Template>& to) {
      for (const auto& s : in) {
        CompiledRule::Template t;
        t.pred = s.pred;
        t.lit = s.literal;
        for (std::size_t i = 0; i < s.args.size(); ++i)
          t.v[i] = static_cast<int>(std::find(c.vars.begin(), c.vars.end(), s.args[i]) -
                                    c.vars.begin());
        to.push_back(t);
      }
    };
    compile(r.premises, c.premises);
    compile(r.numeric_guards, c.guards);
    compile(r.conclusions, c.conclusions);
    out.push_back(std::move(c));
  }
  return out;
}

const std::vector<Rule>& default_rules() {
  static const std::vector<Rule> rules = parse_rules(data::kDefaultRules);
  return rules;
}

const std::vector<CompiledRule>& default_compiled_rules() {
  static const std::vector<CompiledRule> rules = compile_rules(default_rules());
  return rules;
}

namespace {

bool explicit_only(Predicate p) {
  switch (p) {
    case Predicate::midp:
    case Predicate::cyclic:
    case Predicate::sameclock:
      return true;
    default:
      return is_triangle_pred(p);
  }
}

// Variables of a template in first-occurrence order.
std::vector<int> template_vars(const CompiledRule::Template& t) {
  std::vector<int> vars;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::find(vars.begin(), vars.end(), t.v[i]) == vars.end()) vars.push_back(t.v[i]);
  return vars;
}

// Fills `row` (indexed like `vars`) from atom `v` if it fits the template's
// repeated-variable pattern and literal.
bool fit(const CompiledRule::Template& t, const std::vector<int>& vars, const Atom& v,
         std::array<PointId, 8>& row) {
  if (has_literal(t.pred) && v.lit != t.lit) return false;
  std::array<int, 8> seen;
  seen.fill(-1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto k = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), t.v[i]) - vars.begin());
    if (seen[k] >= 0 && seen[k] != v.a[i]) return false;
    seen[k] = v.a[i];
    row[k] = v.a[i];
  }
  return true;
}

// Bit per position pair (i, j), i < j, set when both positions agree.
template <class A>
std::uint32_t equal_mask(const A& a, std::size_t n) {
  std::uint32_t m = 0;
  int bit = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++bit)
      if (a[i] == a[j]) m |= 1u << bit;
  return m;
}

}  // namespace

Engine::Engine(const Figure& fig, std::span<const CompiledRule> rules, EngineOptions opt)
    : fig_(fig),
      rules_(rules),
      opt_(opt),
      num_(fig_, opt.tol),
      sym_(static_cast<int>(fig_.size())) {
  if (fig_.size() > 255) throw Error(ErrorCode::DegenerateInput, "too many points");
  for (std::size_t ci = 0; ci < fig_.clauses.size(); ++ci)
    for (const auto& ns : fig_.clauses[ci].statements) {
      auto t = to_atom(ns.stmt);
      if (!t) throw Error(ErrorCode::UndeclaredPoint, "", ns.stmt.str());
      add(*t, FactKind::premise, "", {}, static_cast<int>(ci));
    }
}

std::optional<Atom> Engine::to_atom(const Statement& s) const {
  if (s.args.size() != arity(s.pred)) return std::nullopt;
  Atom t;
  t.pred = s.pred;
  t.lit = s.literal;
  for (std::size_t i = 0; i < s.args.size(); ++i) {
    auto k = fig_.index_of(s.args[i]);
    if (!k) return std::nullopt;
    t.a[i] = static_cast<PointId>(*k);
  }
  return t;
}

Statement Engine::to_statement(const Atom& t) const {
  Statement s;
  s.pred = t.pred;
  s.literal = t.lit;
  for (std::size_t i = 0; i < t.size(); ++i) s.args.push_back(fig_.name(t.a[i]));
  return s;
}

FactId Engine::add(const Atom& t, FactKind kind, std::string rule, std::vector<FactId> deps,
                   int clause) {
  auto id = static_cast<FactId>(facts_.size());
  facts_.push_back({t, kind, clause, std::move(rule), std::move(deps), rounds_});
  by_key_.emplace(canonical(t), id);
  return id;
}

std::optional<FactId> Engine::find(const Atom& t) const {
  auto it = by_key_.find(canonical(t));
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

void Engine::rebuild_symbolic() {
  if (sym_facts_ == facts_.size()) return;
  std::vector<std::pair<FactId, Atom>> list;
  list.reserve(facts_.size());
  for (std::size_t i = 0; i < facts_.size(); ++i)
    if (facts_[i].kind != FactKind::check) list.emplace_back(static_cast<FactId>(i), facts_[i].atom);
  sym_.build(list);
  sym_facts_ = facts_.size();
  sym_cache_.clear();
  true_variants_ready_.fill(false);
}

bool Engine::symbolic_holds(const Atom& t) const {
  auto [it, fresh] = sym_cache_.try_emplace(t, false);
  if (fresh) it->second = sym_.holds(t);
  return it->second;
}

const std::vector<Engine::VariantBucket>& Engine::true_variants(Predicate pred) {
  auto p = static_cast<std::size_t>(pred);
  auto& out = true_variants_[p];
  if (true_variants_ready_[p]) return out;
  const auto& all = index_->by_pred[p];
  auto& done = index_true_[p];
  done.resize(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (done[i] || !symbolic_holds(all[i])) continue;
    done[i] = 1;
    for_each_variant(all[i], [&](const Atom& v) {
      std::uint32_t m = equal_mask(v.a, v.size());
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& b) { return b.mask == m; });
      if (it == out.end()) it = out.insert(out.end(), VariantBucket{m, {}});
      it->atoms.push_back(v);
    });
  }
  true_variants_ready_[p] = true;
  return out;
}

FactId Engine::materialize(const Atom& t) {
  if (auto id = find(t)) return *id;
  auto deps = sym_.explain(t);
  if (!deps) throw Error(ErrorCode::ReplayFailed, "premise is not derivable", to_statement(t).str());
  auto atom_of = [&](FactId i) -> const Atom& { return facts_[static_cast<std::size_t>(i)].atom; };
  DepSet minimal = minimize_deps(t, std::move(*deps), num_.points(), atom_of);
  return add(t, FactKind::derived, chain_rule(t.pred), std::move(minimal));
}

bool Engine::out_of_budget() const {
  if (facts_.size() >= opt_.budget.max_facts) return true;
  if (opt_.budget.max_millis <= 0) return false;
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start_)
                .count();
  return ms >= opt_.budget.max_millis;
}

std::vector<Engine::Binding> Engine::match(const CompiledRule& r, RuleStats& st) {
  auto out = opt_.mode == MatchMode::naive ? match_naive(r, st) : match_partial(r, st);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Engine::Binding> Engine::match_naive(const CompiledRule& r, RuleStats& st) {
  std::vector<Binding> out;
  const int n = num_.points();
  const std::size_t v = r.vars.size();
  if (n == 0) return out;
  Binding b{};
  auto ok = [&](const CompiledRule::Template& t, bool guard) {
    Atom a = r.instantiate(t, b);
    ++st.premise_checks;
    if (!num_.admissible(a) || !num_.eval(a)) return false;
    return guard || symbolic_holds(a);
  };
  while (true) {
    ++st.candidates;
    bool pass = true;
    for (const auto& p : r.premises)
      if (!ok(p, false)) {
        pass = false;
        break;
      }
    if (pass)
      for (const auto& g : r.guards)
        if (!ok(g, true)) {
          pass = false;
          break;
        }
    if (pass)
      out.push_back(b);
    else
      ++st.pruned;
    std::size_t k = 0;
    while (k < v && ++b[k] == n) b[k++] = 0;
    if (k == v) break;
  }
  return out;
}

std::vector<Engine::Binding> Engine::match_partial(const CompiledRule& r, RuleStats& st) {
  const int n = num_.points();
  struct Rows {
    std::vector<int> vars;
    std::vector<std::array<PointId, 8>> rows;
  };
  std::vector<Rows> per(r.premises.size());
  for (std::size_t i = 0; i < r.premises.size(); ++i) {
    const auto& t = r.premises[i];
    Rows& rw = per[i];
    rw.vars = template_vars(t);
    std::array<PointId, 8> row{};
    auto take = [&](const Atom& v) {
      if (!fit(t, rw.vars, v, row)) return;
      ++st.premise_checks;
      if (num_.admissible(v) && num_.eval(v)) rw.rows.push_back(row);
    };
    if (has_literal(t.pred)) {
      Atom a;
      a.pred = t.pred;
      a.lit = t.lit;
      for (int x = 0; x < n * n * n * n; ++x) {
        a.a[0] = static_cast<PointId>(x % n);
        a.a[1] = static_cast<PointId>(x / n % n);
        a.a[2] = static_cast<PointId>(x / n / n % n);
        a.a[3] = static_cast<PointId>(x / n / n / n);
        if (fit(t, rw.vars, a, row) && num_.admissible(a) && num_.eval(a) && symbolic_holds(a)) {
          ++st.premise_checks;
          rw.rows.push_back(row);
        }
      }
    } else if (explicit_only(t.pred)) {
      std::vector<Atom> seen;
      // Only facts visible to this round's symbolic state.
      for (std::size_t k = 0; k < sym_facts_; ++k) {
        const auto& f = facts_[k];
        if (f.atom.pred == t.pred && f.kind != FactKind::check) seen.push_back(canonical(f.atom));
      }
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (const auto& c : seen) for_each_variant(c, take);
    } else {
      // Variants of a true admissible statement are true and admissible.
      const std::uint32_t need = equal_mask(t.v, t.size());
      for (const auto& bucket : true_variants(t.pred)) {
        if ((bucket.mask & need) != need) continue;
        for (const auto& v : bucket.atoms)
          if (fit(t, rw.vars, v, row)) {
            ++st.premise_checks;
            rw.rows.push_back(row);
          }
      }
    }
    std::sort(rw.rows.begin(), rw.rows.end());
    rw.rows.erase(std::unique(rw.rows.begin(), rw.rows.end()), rw.rows.end());
  }

  std::vector<std::size_t> order(per.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return per[x].rows.size() < per[y].rows.size();
  });

  std::vector<Binding> cur(1, Binding{});
  std::array<bool, 8> bound{};
  for (std::size_t oi : order) {
    const Rows& rw = per[oi];
    std::vector<std::size_t> shared, fresh;
    for (std::size_t k = 0; k < rw.vars.size(); ++k)
      (bound[static_cast<std::size_t>(rw.vars[k])] ? shared : fresh).push_back(k);
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_key;
    auto key_of = [&](auto&& get) {
      std::uint64_t key = 0;
      for (std::size_t k : shared) key = key << 8 | get(k);
      return key;
    };
    for (std::size_t j = 0; j < rw.rows.size(); ++j)
      by_key[key_of([&](std::size_t k) { return rw.rows[j][k]; })].push_back(j);
    std::vector<Binding> next;
    for (const auto& b : cur) {
      auto it = by_key.find(
          key_of([&](std::size_t k) { return b[static_cast<std::size_t>(rw.vars[k])]; }));
      if (it == by_key.end()) continue;
      for (std::size_t j : it->second) {
        Binding nb = b;
        for (std::size_t k : fresh) nb[static_cast<std::size_t>(rw.vars[k])] = rw.rows[j][k];
        next.push_back(nb);
      }
    }
    st.candidates += next.size();
    for (int v : rw.vars) bound[static_cast<std::size_t>(v)] = true;
    cur.swap(next);
    if (cur.empty()) return {};
  }
  // Variables that occur in no premise range over all points.
  for (std::size_t v = 0; v < r.vars.size(); ++v) {
    if (bound[v]) continue;
    std::vector<Binding> next;
    for (const auto& b : cur)
      for (int p = 0; p < n; ++p) {
        Binding nb = b;
        nb[v] = static_cast<PointId>(p);
        next.push_back(nb);
      }
    st.candidates += next.size();
    cur.swap(next);
  }
  std::vector<Binding> out;
  for (const auto& b : cur) {
    bool pass = true;
    for (const auto& g : r.guards) {
      Atom a = r.instantiate(g, b);
      ++st.premise_checks;
      if (!num_.admissible(a) || !num_.eval(a)) {
        pass = false;
        break;
      }
    }
    if (pass) out.push_back(b);
  }
  st.pruned = st.candidates - std::min(st.candidates, out.size());
  return out;
}

void Engine::saturate() {
  start_ = std::chrono::steady_clock::now();
  if (opt_.mode == MatchMode::partial && !index_) index_ = pre_identify(num_, true);
  while (rounds_ < opt_.budget.max_rounds) {
    if (out_of_budget()) {
      incomplete_ = true;
      return;
    }
    rebuild_symbolic();
    ++rounds_;
    std::size_t emitted = 0;
    std::unordered_set<Atom, AtomHash> added;
    for (const auto& r : rules_) {
      RuleStats st;
      st.rule = r.name;
      st.round = rounds_;
      auto t0 = std::chrono::steady_clock::now();
      auto bindings = match(r, st);
      for (const auto& b : bindings) {
        for (const auto& c : r.conclusions) {
          Atom a = r.instantiate(c, b);
          if (!num_.admissible(a) || !num_.eval(a)) {
            ++st.rejected;
            continue;
          }
          Atom key = canonical(a);
          if (by_key_.count(key) || added.count(key) || symbolic_holds(a)) continue;
          if (out_of_budget()) {
            incomplete_ = true;
            break;
          }
          std::vector<FactId> deps;
          for (const auto& p : r.premises) deps.push_back(materialize(r.instantiate(p, b)));
          for (const auto& g : r.guards) {
            Atom ga = r.instantiate(g, b);
            auto id = find(ga);
            deps.push_back(id ? *id : add(ga, FactKind::check, "", {}));
          }
          add(a, FactKind::derived, r.name, std::move(deps));
          added.insert(key);
          ++st.emitted;
        }
        if (incomplete_) break;
      }
      st.micros = std::chrono::duration_cast<std::chrono::microseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
      emitted += st.emitted;
      stats_.push_back(std::move(st));
      if (incomplete_) return;
    }
    if (emitted == 0) return;
  }
  incomplete_ = true;
}

bool Engine::implied(const Atom& t) {
  if (!num_.admissible(t)) {
    // Reflexive statements such as cong a b a b hold trivially.
    Atom c = canonical(t);
    switch (t.pred) {
      case Predicate::cong:
      case Predicate::para:
        return c.a[0] == c.a[2] && c.a[1] == c.a[3] && num_.distinct(c.a[0], c.a[1]);
      case Predicate::eqangle:
      case Predicate::eqratio:
        return std::equal(c.a.begin(), c.a.begin() + 4, c.a.begin() + 4) && num_.eval(t);
      default:
        return false;
    }
  }
  rebuild_symbolic();
  return sym_.holds(t);
}

std::optional<FactId> Engine::query(const Atom& goal) {
  if (auto id = find(goal)) return id;
  if (!num_.admissible(goal) || !num_.eval(goal)) return std::nullopt;
  rebuild_symbolic();
  if (!sym_.holds(goal)) return std::nullopt;
  return materialize(goal);
}

std::optional<FactId> Engine::query(const Statement& goal) {
  auto t = to_atom(goal);
  if (!t) return std::nullopt;
  return query(*t);
}

std::vector<Atom> Engine::closure() {
  rebuild_symbolic();
  if (!index_) index_ = pre_identify(num_, true);
  std::vector<Atom> out;
  for (Predicate p : {Predicate::coll, Predicate::para, Predicate::perp, Predicate::cong,
                      Predicate::eqangle, Predicate::eqratio})
    for (const auto& c : index_->of(p))
      if (symbolic_holds(c)) out.push_back(c);
  for (const auto& f : facts_)
    if (f.kind != FactKind::check && num_.admissible(f.atom) && num_.eval(f.atom))
      out.push_back(canonical(f.atom));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::set<std::string> Engine::fact_set() {
  std::set<std::string> out;
  for (const auto& t : closure()) out.insert(to_statement(t).str());
  return out;
}

}  // namespace geodd
