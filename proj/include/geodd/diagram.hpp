#pragma once

#include <span>
#include <string>
#include <vector>

#include "geodd/construction.hpp"
#include "geodd/formal_lang.hpp"
#include "geodd/numeric.hpp"

namespace geodd {

struct PrereqCheck {
  bool ok = true;
  std::string reason;  // "NameCollision", "MissingPoint" or the failing prerequisite

  explicit operator bool() const { return ok; }
};

PrereqCheck check_prerequisites(const Construction& c, const Figure& fig, const Catalog& catalog,
                                const Tolerances& tol = {});

// Groups a script into steps; constructions from one script line share a step.
std::vector<std::vector<Construction>> script_steps(std::span<const Construction> script);

// One premise clause per step, statements numbered densely from `first_id`.
PremiseClause clause_for_step(std::span<const Construction> step, const Catalog& catalog,
                              FactId first_id);

// Every pair of points is at least `d` apart.
bool well_separated(const Figure& fig, double d);

// Builds and normalizes a figure. The whole script is resampled on failure.
// Throws BuildFailed naming the last failing step.
Figure build_figure(std::span<const Construction> script, const Catalog& catalog,
                    const Tolerances& tol, Rng& rng, int max_retries = 16);

// Places the points of a parsed problem clause by clause.
Figure figure_from_problem(const Problem& p, const Tolerances& tol, Rng& rng,
                           int max_retries = 16);

// Adds one clause (already numbered) to a copy of `fig`. Throws
// NumericallyInfeasible when no placement is found within the retries.
Figure extend_figure(const Figure& fig, const PremiseClause& clause, const Tolerances& tol,
                     Rng& rng, int max_retries = 16);

}  // namespace geodd
