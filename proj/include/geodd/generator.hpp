#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "geodd/construction.hpp"
#include "geodd/engine.hpp"
#include "geodd/filter.hpp"
#include "geodd/formal_lang.hpp"
#include "geodd/numeric.hpp"

namespace geodd {

struct SampleConfig {
  int free_min = 0;  // stage 2
  int free_max = 2;
  int steps_min = 2;  // stage 3
  int steps_max = 5;
  double p_intersect = 0.5;
  int retries = 64;  // per step
  Budget budget{16, 20000, 0};
  Tolerances tol;
  std::size_t max_records = 0;  // per seed; 0 keeps all
};

struct Sample {
  std::vector<Construction> script;
  Figure figure;
  int intersect_steps = 0;
  int others_steps = 0;
};

// Three stages: one BASIC, free points, then INTERSECT pairs or OTHERS steps.
// Every step is checked and placed before it is accepted. Throws SamplingStuck.
Sample sample_script(const SampleConfig& cfg, const Catalog& catalog, Rng& rng);

struct SeedResult {
  std::uint64_t seed = 0;
  bool built = false;
  std::string error;
  Sample sample;
  std::vector<Record> records;
  std::vector<long long> millis;  // per record, since the seed started
  std::array<std::size_t, 9> reasons{};  // filter verdict counts by FilterReason
};

SeedResult generate_seed(const SampleConfig& cfg, const Catalog& catalog,
                         std::span<const CompiledRule> rules, std::uint64_t seed);

// Runs seeds [first, first + n) on `threads` workers and hands results to
// `sink` in seed order.
void generate(const SampleConfig& cfg, const Catalog& catalog, std::span<const CompiledRule> rules,
              std::uint64_t first, std::size_t n, int threads,
              const std::function<void(SeedResult&)>& sink);

// Writes records into shards of `per_shard` records plus manifest.jsonl.
class ShardWriter {
 public:
  ShardWriter(std::string dir, std::size_t per_shard = 10000);
  ~ShardWriter();
  void add(const Record& r, long long millis);
  std::size_t written() const { return count_; }

 private:
  void open_next();
  std::string dir_;
  std::size_t per_shard_;
  std::size_t count_ = 0;
  std::size_t in_shard_ = 0;
  std::string shard_name_;
  struct Files;
  Files* files_;
};

std::string point_name(std::size_t i);

}  // namespace geodd
