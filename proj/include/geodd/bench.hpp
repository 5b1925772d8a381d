#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geodd/construction.hpp"
#include "geodd/engine.hpp"

namespace geodd {

struct BenchCase {
  std::string name;
  Figure figure;
};

struct BenchRow {
  std::string name;
  std::size_t points = 0;
  std::size_t facts = 0;  // closure size (partial run)
  double naive_ms = 0;
  double partial_ms = 0;
  bool equal = false;
  // Only defined when both runs produced the same closure.
  std::optional<double> speedup() const;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string hardware;

  bool all_equal() const;
  // Geometric mean over rows; none when any row mismatched or the report is empty.
  std::optional<double> geomean_speedup() const;
  std::string table() const;
  // One JSON object per row, for plotting.
  std::string jsonl() const;
};

// Loads every `.script` (construction script) and `.gex` (problem) file in
// `dir`, sorted by name. Figures are built with Rng(seed).
std::vector<BenchCase> load_bench_dir(const std::string& dir, const Catalog& catalog,
                                      const Tolerances& tol, std::uint64_t seed);

// Saturates the figure once per matching mode with the same budget and compares closures.
BenchRow bench_figure(const BenchCase& c, std::span<const CompiledRule> rules, const Budget& budget,
                      const Tolerances& tol);

// Runs the cases on `threads` workers (1: sequential, stable timing).
BenchReport bench_match(const std::vector<BenchCase>& cases, std::span<const CompiledRule> rules,
                        const Budget& budget, const Tolerances& tol, int threads = 1);

// Throws ClosureMismatch naming the first case whose closures differ.
void require_equal(const BenchReport& r);

std::string hardware_summary();

}  // namespace geodd
