#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geodd/engine.hpp"
#include "geodd/formal_lang.hpp"

namespace geodd {

// Facts reachable from a goal through justifications, by engine id.
struct ProofDag {
  FactId goal = 0;
  std::vector<FactId> steps;     // derived facts, dependency order
  std::vector<FactId> premises;  // premise facts used
  std::vector<FactId> checks;    // numerical checks used
};

ProofDag trace(const Engine& eng, FactId goal);

struct AuxSplit {
  std::vector<int> problem;  // clause indices, build order
  std::vector<int> aux;
};

// A used clause is auxiliary unless the goal's points need it, directly or
// through the points its statements mention.
AuxSplit classify_aux(const Figure& fig, const Atom& goal, const ProofDag& dag,
                      const Engine& eng);

// Record with dense ids: problem statements, aux statements, checks, proof.
Record make_record(const Engine& eng, const ProofDag& dag, const AuxSplit& split);
Record make_record(const Engine& eng, FactId goal);

struct ReplayResult {
  bool ok = true;
  std::optional<FactId> step;  // first failing id
  std::string message;

  explicit operator bool() const { return ok; }
};

// Re-derives every proof step on `fig` (which must hold the record's points)
// using exactly the cited rule and dependencies.
ReplayResult replay(const Record& rec, const Figure& fig, std::span<const CompiledRule> rules,
                    const Tolerances& tol = {});

// Sketches the record's premises and aux clauses (several attempts, seeded)
// and replays on the first figure where every numerical check holds.
ReplayResult check_record(const Record& rec, std::span<const CompiledRule> rules,
                          const Tolerances& tol = {}, std::uint64_t seed = 1, int figures = 8);

}  // namespace geodd
