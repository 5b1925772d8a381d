#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geodd/diagram.hpp"
#include "geodd/generator.hpp"
#include "geodd/traceback.hpp"

using namespace geodd;

TEST_CASE("point names") {
  CHECK(point_name(0) == "a");
  CHECK(point_name(25) == "z");
  CHECK(point_name(26) == "aa");
  CHECK(point_name(27) == "ab");
  CHECK(point_name(52) == "ba");
}

TEST_CASE("sampled scripts follow the three stages") {
  SampleConfig cfg;
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Rng rng(seed);
    try {
      auto s = sample_script(cfg, default_catalog(), rng);
      ++ok;
      REQUIRE_FALSE(s.script.empty());
      CHECK(s.script.front().category == Category::BASIC);
      int steps = s.intersect_steps + s.others_steps;
      CHECK(steps >= cfg.steps_min);
      CHECK(steps <= cfg.steps_max);
      CHECK(s.figure.clauses.size() == script_steps(s.script).size());
      for (const auto& pc : s.figure.clauses)
        for (const auto& ns : pc.statements) CHECK(eval_statement(ns.stmt, s.figure, cfg.tol));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SamplingStuck);
    }
  }
  CHECK(ok >= 36);
}

TEST_CASE("generated records pass check") {
  SampleConfig cfg;
  cfg.max_records = 4;
  std::size_t records = 0;
  generate(cfg, default_catalog(), default_compiled_rules(), 100, 24, 4, [&](SeedResult& r) {
    for (const auto& rec : r.records) {
      ++records;
      auto c = check_record(rec, default_compiled_rules());
      INFO(serialize_record(rec));
      INFO(c.message);
      CHECK(c.ok);
      CHECK(find_dangling_dependency(rec) == std::nullopt);
      CHECK_FALSE(rec.proof.empty());
    }
  });
  CHECK(records > 20);
}

TEST_CASE("generation is deterministic across thread counts") {
  SampleConfig cfg;
  cfg.max_records = 3;
  auto run = [&](int threads) {
    std::string all;
    generate(cfg, default_catalog(), default_compiled_rules(), 7, 12, threads, [&](SeedResult& r) {
      for (const auto& rec : r.records) all += serialize_record(rec) + "\n";
    });
    return all;
  };
  CHECK(run(1) == run(3));
}

TEST_CASE("shard writer splits records and writes a manifest") {
  SampleConfig cfg;
  cfg.max_records = 2;
  auto dir = std::filesystem::temp_directory_path() / "geodd_shards_test";
  std::filesystem::remove_all(dir);
  std::vector<Record> all;
  {
    ShardWriter w(dir.string(), 3);
    generate(cfg, default_catalog(), default_compiled_rules(), 1, 6, 2, [&](SeedResult& r) {
      for (std::size_t i = 0; i < r.records.size(); ++i) {
        w.add(r.records[i], r.millis[i]);
        all.push_back(r.records[i]);
      }
    });
    CHECK(w.written() == all.size());
  }
  REQUIRE(all.size() >= 4);
  std::ifstream man(dir / "manifest.jsonl");
  std::string line;
  std::size_t n = 0;
  while (std::getline(man, line)) {
    auto m = parse_manifest_line(line);
    CHECK(m.index == n % 3);
    std::ifstream in(dir / m.path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto recs = parse_record_stream(ss.str());
    REQUIRE(m.index < recs.size());
    CHECK(serialize_record(recs[m.index]) == serialize_record(all[n]));
    CHECK(m.proof_length == all[n].proof.size());
    ++n;
  }
  CHECK(n == all.size());
  std::filesystem::remove_all(dir);
}
