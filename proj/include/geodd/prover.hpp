#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geodd/construction.hpp"
#include "geodd/engine.hpp"
#include "geodd/formal_lang.hpp"
#include "geodd/numeric.hpp"

namespace geodd {

struct ProofState {
  const Problem* problem = nullptr;
  std::vector<PremiseClause> aux;  // applied, in order
  Figure figure;                   // problem points then aux points
  double score = 0;
};

// Candidate aux clause as text: either premise-clause syntax
// (`h : coll a d h , perp a d h e`) or one construction-script line
// (`h = foot h e a d`).
struct Candidate {
  double score = 0;
  std::string clause;
};

class Proposer {
 public:
  virtual ~Proposer() = default;
  // At most k candidates, any order. May throw ProposerUnavailable.
  virtual std::vector<Candidate> propose(const ProofState& s, std::size_t k) = 0;
};

// Catalog constructions over existing points, ranked by how many new
// numerically equal lengths and directions the new point creates.
class EnumerativeProposer : public Proposer {
 public:
  explicit EnumerativeProposer(const Catalog& catalog = default_catalog(),
                               Tolerances tol = {});
  std::vector<Candidate> propose(const ProofState& s, std::size_t k) override;

 private:
  const Catalog& catalog_;
  Tolerances tol_;
};

// Runs `sh -c command` once per call. The state goes to stdin as <problem>
// and <aux> sections, k in the GEODD_PROPOSALS environment variable; each
// stdout line is `score<TAB>clause`. Malformed lines are skipped.
class ExternalProposer : public Proposer {
 public:
  explicit ExternalProposer(std::string command, int timeout_ms = 10000);
  std::vector<Candidate> propose(const ProofState& s, std::size_t k) override;
  std::size_t malformed() const { return malformed_; }

 private:
  std::string command_;
  int timeout_ms_;
  std::size_t malformed_ = 0;
};

// Alternates the ranked lists of two proposers; scores become rank based.
class InterleaveProposer : public Proposer {
 public:
  InterleaveProposer(std::shared_ptr<Proposer> a, std::shared_ptr<Proposer> b);
  std::vector<Candidate> propose(const ProofState& s, std::size_t k) override;

 private:
  std::shared_ptr<Proposer> a_, b_;
};

// Uses `fallback` for good once `primary` reports ProposerUnavailable.
class FallbackProposer : public Proposer {
 public:
  FallbackProposer(std::shared_ptr<Proposer> primary, std::shared_ptr<Proposer> fallback);
  std::vector<Candidate> propose(const ProofState& s, std::size_t k) override;
  bool degraded() const { return degraded_; }

 private:
  std::shared_ptr<Proposer> primary_, fallback_;
  bool degraded_ = false;
};

struct SearchBudget {
  int beam = 4;
  int depth = 2;
  std::size_t proposals = 8;  // per state
  Budget engine{16, 20000, 0};
  long long max_millis = 0;  // whole search; 0: unlimited
};

struct SolveStats {
  int depth = -1;  // where the goal was proved
  std::size_t states = 0;
  std::size_t invalid = 0;  // rejected candidates
  long long millis = 0;
};

struct SolveOptions {
  SearchBudget budget;
  Tolerances tol;
  std::uint64_t seed = 1;
};

// Saturates the problem, then beam-searches over aux clauses. The returned
// record has the problem's clauses and the applied aux clauses.
// Throws BuildFailed when the problem itself cannot be sketched.
std::optional<Record> solve(const Problem& problem, std::span<const CompiledRule> rules,
                            Proposer& proposer, const SolveOptions& opt,
                            SolveStats* stats = nullptr);

// Parses a candidate against the state's points. Throws InvalidProposal.
PremiseClause parse_candidate(const std::string& text, const ProofState& s,
                              const Catalog& catalog = default_catalog());

struct SolveResult {
  std::optional<Record> record;
  SolveStats stats;
  std::string error;
};

// Solves problems on `threads` workers; a worker takes the next pending
// problem as soon as it finishes one. `make_proposer` is called per problem.
std::vector<SolveResult> solve_all(const std::vector<Problem>& problems,
                                   std::span<const CompiledRule> rules,
                                   const std::function<std::unique_ptr<Proposer>()>& make_proposer,
                                   const SolveOptions& opt, int threads);

}  // namespace geodd
