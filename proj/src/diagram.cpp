#include "geodd/diagram.hpp"

#include <algorithm>

#include "geodd/error.hpp"

namespace geodd {

namespace {

bool prerequisite_holds(const Prerequisite& p, const Figure& fig, const Tolerances& tol) {
  if (p.distinct) return dist(fig.point(p.tmpl.args[0]), fig.point(p.tmpl.args[1])) > tol.deg;
  bool v;
  try {
    v = eval_statement(p.tmpl, fig, tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateInput) throw;
    return false;
  }
  return p.negated ? !v : v;
}

std::string prereq_str(const Prerequisite& p) {
  if (p.distinct) return "diff " + p.tmpl.args[0] + " " + p.tmpl.args[1];
  return (p.negated ? "n" : "") + p.tmpl.str();
}

bool all_hold(const PremiseClause& c, const Figure& fig, const Tolerances& tol) {
  for (const auto& s : c.statements) {
    try {
      if (!eval_statement(s.stmt, fig, tol)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

}  // namespace

PrereqCheck check_prerequisites(const Construction& c, const Figure& fig, const Catalog& catalog,
                                const Tolerances& tol) {
  for (const auto& o : c.outs)
    if (fig.has(o)) return {false, "NameCollision"};
  for (const auto& a : c.args)
    if (!fig.has(a)) return {false, "MissingPoint"};
  for (const auto& p : catalog.prerequisites(c))
    if (!prerequisite_holds(p, fig, tol)) return {false, prereq_str(p)};
  return {};
}

std::vector<std::vector<Construction>> script_steps(std::span<const Construction> script) {
  std::vector<std::vector<Construction>> steps;
  for (std::size_t i = 0; i < script.size(); ++i) {
    bool join = i > 0 && script[i].line != 0 && script[i].line == script[i - 1].line;
    if (!join) steps.emplace_back();
    steps.back().push_back(script[i]);
  }
  return steps;
}

PremiseClause clause_for_step(std::span<const Construction> step, const Catalog& catalog,
                              FactId first_id) {
  PremiseClause clause;
  std::vector<Statement> seen;
  for (const auto& c : step) {
    for (const auto& o : c.outs)
      if (std::find(clause.points.begin(), clause.points.end(), o) == clause.points.end())
        clause.points.push_back(o);
    for (const auto& s : catalog.added_statements(c)) {
      Statement key = canonicalize(s);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(key);
      clause.statements.push_back({s, first_id++});
    }
  }
  return clause;
}

bool well_separated(const Figure& fig, double d) {
  const auto& pts = fig.coords();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (dist(pts[i], pts[j]) < d) return false;
  return true;
}

Figure build_figure(std::span<const Construction> script, const Catalog& catalog,
                    const Tolerances& tol, Rng& rng, int max_retries) {
  auto steps = script_steps(script);
  std::size_t failed_step = 0;
  std::string reason;
  for (int attempt = 0; attempt < std::max(1, max_retries); ++attempt) {
    Figure fig;
    FactId next_id = 0;
    std::size_t i = 0;
    try {
      for (; i < steps.size(); ++i) {
        const auto& step = steps[i];
        for (const auto& c : step) {
          if (auto pc = check_prerequisites(c, fig, catalog, tol); !pc)
            throw Error(ErrorCode::NumericallyInfeasible, pc.reason, c.name);
        }
        auto pts = sketch(std::span<const Construction>(step), catalog, fig, rng, tol);
        const auto& outs = step.front().outs;
        for (std::size_t k = 0; k < outs.size(); ++k)
          fig.add_point(outs[k], pts[k], static_cast<int>(i));
        PremiseClause clause = clause_for_step(step, catalog, next_id);
        next_id += static_cast<FactId>(clause.statements.size());
        fig.clauses.push_back(std::move(clause));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NumericallyInfeasible && e.code() != ErrorCode::DegenerateInput)
        throw;
      failed_step = i;
      reason = e.what();
      continue;
    }
    fig.normalize();
    // Rescaling can squeeze points that were placed apart.
    if (!well_separated(fig, tol.deg * 10)) {
      failed_step = steps.size();
      reason = "points too close after normalization";
      continue;
    }
    return fig;
  }
  throw Error(ErrorCode::BuildFailed, "step " + std::to_string(failed_step) + ": " + reason,
              std::to_string(failed_step));
}

Figure extend_figure(const Figure& fig, const PremiseClause& clause, const Tolerances& tol,
                     Rng& rng, int max_retries) {
  std::string reason;
  int clause_index = static_cast<int>(fig.clauses.size());
  for (int attempt = 0; attempt < std::max(1, max_retries); ++attempt) {
    try {
      auto pts = sketch_clause(clause, fig, rng, tol);
      Figure out = fig;
      for (std::size_t k = 0; k < clause.points.size(); ++k)
        out.add_point(clause.points[k], pts[k], clause_index);
      if (!all_hold(clause, out, tol)) {
        reason = "statements fail after placement";
        continue;
      }
      out.clauses.push_back(clause);
      return out;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NumericallyInfeasible && e.code() != ErrorCode::DegenerateInput)
        throw;
      reason = e.what();
    }
  }
  throw Error(ErrorCode::NumericallyInfeasible, reason,
              clause.points.empty() ? "" : clause.points.front());
}

Figure figure_from_problem(const Problem& p, const Tolerances& tol, Rng& rng, int max_retries) {
  std::size_t failed = 0;
  std::string reason;
  for (int attempt = 0; attempt < std::max(1, max_retries); ++attempt) {
    Figure fig;
    std::size_t i = 0;
    try {
      for (; i < p.clauses.size(); ++i) fig = extend_figure(fig, p.clauses[i], tol, rng, 4);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NumericallyInfeasible) throw;
      failed = i;
      reason = e.what();
      continue;
    }
    fig.normalize();
    if (!well_separated(fig, tol.deg * 10)) {
      failed = p.clauses.size();
      reason = "points too close after normalization";
      continue;
    }
    return fig;
  }
  throw Error(ErrorCode::BuildFailed, "clause " + std::to_string(failed) + ": " + reason,
              std::to_string(failed));
}

}  // namespace geodd
