// geodd command-line entry points.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "geodd/bench.hpp"
#include "geodd/diagram.hpp"
#include "geodd/error.hpp"
#include "geodd/generator.hpp"
#include "geodd/prover.hpp"
#include "geodd/traceback.hpp"

using namespace geodd;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out || !(out << text)) throw Error(ErrorCode::Io, "cannot write", path);
}

struct Globals {
  std::string defs, rules;
  double tol = 0;
  std::uint64_t seed = 1;
  int threads = 1;

  Catalog catalog_storage;
  std::vector<CompiledRule> rules_storage;
  const Catalog* catalog = &default_catalog();
  std::span<const CompiledRule> compiled = default_compiled_rules();
  Tolerances tolerances;

  void load() {
    if (!defs.empty()) {
      catalog_storage = parse_catalog(read_file(defs));
      catalog = &catalog_storage;
    }
    if (!rules.empty()) {
      rules_storage = compile_rules(parse_rules(read_file(rules)));
      compiled = rules_storage;
    }
    if (tol > 0) tolerances.eq = tol;
    if (!tolerances.valid())
      throw Error(ErrorCode::BadLiteral, "tolerance must lie between ang and deg", std::to_string(tol));
    if (threads < 1) threads = 1;
  }
};

Figure load_figure(const std::string& path, const Globals& g) {
  Rng rng(g.seed);
  auto text = read_file(path);
  if (std::filesystem::path(path).extension() == ".script")
    return build_figure(parse_construction_script(text, *g.catalog), *g.catalog, g.tolerances, rng);
  return figure_from_problem(parse_problem(text), g.tolerances, rng);
}

class NoProposer : public Proposer {
 public:
  std::vector<Candidate> propose(const ProofState&, std::size_t) override { return {}; }
};

std::unique_ptr<Proposer> make_proposer(const std::string& spec, const Globals& g, int call_ms) {
  if (spec == "none") return std::make_unique<NoProposer>();
  if (spec == "enum") return std::make_unique<EnumerativeProposer>(*g.catalog, g.tolerances);
  if (spec.rfind("exec:", 0) == 0 && spec.size() > 5)
    return std::make_unique<FallbackProposer>(
        std::make_shared<ExternalProposer>(spec.substr(5), call_ms),
        std::make_shared<EnumerativeProposer>(*g.catalog, g.tolerances));
  throw Error(ErrorCode::Syntax, "expected none, enum or exec:CMD", spec);
}

int cmd_solve(const Globals& g, const std::string& problem_file, const std::string& proposer,
              int beam, int depth, double timeout_s, int call_ms, const std::string& out) {
  Problem p = parse_problem(read_file(problem_file));
  SolveOptions opt;
  opt.budget.beam = beam;
  opt.budget.depth = depth;
  opt.budget.max_millis = static_cast<long long>(timeout_s * 1000);
  opt.tol = g.tolerances;
  opt.seed = g.seed;
  auto prop = make_proposer(proposer, g, call_ms);
  SolveStats st;
  auto rec = solve(p, g.compiled, *prop, opt, &st);
  if (rec) {
    if (out.empty())
      std::cout << serialize_record(*rec) << "\n";
    else
      write_file(out, serialize_record(*rec) + "\n");
  }
  nlohmann::json v = {{"verdict", rec ? "solved" : "unsolved"},
                      {"millis", st.millis},
                      {"aux", rec ? rec->aux.size() : 0},
                      {"depth", st.depth},
                      {"states", st.states},
                      {"invalid", st.invalid}};
  std::cout << v.dump() << "\n";
  return rec ? 0 : 2;
}

int cmd_generate(const Globals& g, std::size_t n, const std::string& out, std::size_t max_records,
                 std::size_t per_shard) {
  SampleConfig cfg;
  cfg.tol = g.tolerances;
  cfg.max_records = max_records;
  ShardWriter w(out, per_shard);
  std::size_t built = 0, inter = 0, others = 0;
  std::array<std::size_t, 9> reasons{};
  generate(cfg, *g.catalog, g.compiled, g.seed, n, g.threads, [&](SeedResult& r) {
    if (!r.built) {
      std::cerr << "seed " << r.seed << ": " << r.error << "\n";
      return;
    }
    ++built;
    inter += static_cast<std::size_t>(r.sample.intersect_steps);
    others += static_cast<std::size_t>(r.sample.others_steps);
    for (std::size_t i = 0; i < reasons.size(); ++i) reasons[i] += r.reasons[i];
    for (std::size_t i = 0; i < r.records.size(); ++i) w.add(r.records[i], r.millis[i]);
  });
  nlohmann::json s = {{"seeds", n},
                      {"built", built},
                      {"records", w.written()},
                      {"others_fraction", inter + others ? double(others) / double(inter + others) : 0.0}};
  for (std::size_t i = 0; i < reasons.size(); ++i)
    s["filter"][std::string(filter_reason_name(static_cast<FilterReason>(i)))] = reasons[i];
  std::cout << s.dump() << "\n";
  return 0;
}

int cmd_check(const Globals& g, const std::string& file) {
  auto recs = parse_record_stream(read_file(file));
  if (recs.empty()) throw Error(ErrorCode::Syntax, "no record in file", file);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (auto d = find_dangling_dependency(recs[i]))
      throw Error(ErrorCode::DanglingDependency, "record " + std::to_string(i), format_id(*d));
    auto r = check_record(recs[i], g.compiled, g.tolerances, g.seed);
    if (!r)
      throw Error(ErrorCode::ReplayFailed, "record " + std::to_string(i) + ": " + r.message,
                  r.step ? format_id(*r.step) : std::string());
  }
  std::cout << "OK " << recs.size() << (recs.size() == 1 ? " record" : " records") << "\n";
  return 0;
}

int cmd_bench(const Globals& g, const std::string& dir, int rounds, std::size_t max_facts,
              const std::string& jsonl) {
  auto cases = load_bench_dir(dir, *g.catalog, g.tolerances, g.seed);
  if (cases.empty()) throw Error(ErrorCode::Io, "no .script or .gex files", dir);
  auto rep = bench_match(cases, g.compiled, Budget{rounds, max_facts, 0}, g.tolerances, g.threads);
  std::cout << rep.table();
  if (!jsonl.empty()) write_file(jsonl, rep.jsonl());
  require_equal(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodd: synthetic geometry deduction"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--defs", g.defs, "construction catalog file")->check(CLI::ExistingFile);
  app.add_option("--rules", g.rules, "rule file")->check(CLI::ExistingFile);
  app.add_option("--tol", g.tol, "numeric equality tolerance");
  app.add_option("--seed", g.seed, "random seed (first seed for generate)");
  app.add_option("--threads", g.threads, "worker threads");

  auto* solve_cmd = app.add_subcommand("solve", "search for aux clauses that prove a problem");
  std::string problem, proposer = "enum", solve_out;
  int beam = 4, depth = 2, call_ms = 10000;
  double timeout = 0;
  solve_cmd->add_option("--problem", problem, "problem file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--proposer", proposer, "none, enum or exec:CMD");
  solve_cmd->add_option("--beam", beam)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--depth", depth)->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--timeout", timeout, "seconds for the whole search; 0: none");
  solve_cmd->add_option("--proposer-timeout", call_ms, "milliseconds per external call");
  solve_cmd->add_option("--out", solve_out, "record file (default: stdout)");

  auto* gen_cmd = app.add_subcommand("generate", "sample figures and write proof records");
  std::size_t n = 100, max_records = 0, per_shard = 10000;
  std::string gen_out;
  gen_cmd->add_option("--n", n, "number of seeds");
  gen_cmd->add_option("--out", gen_out, "output directory")->required();
  gen_cmd->add_option("--max-records", max_records, "records per seed; 0: all");
  gen_cmd->add_option("--per-shard", per_shard, "records per shard file");

  auto* check_cmd = app.add_subcommand("check", "replay every record in a file");
  std::string record_file;
  check_cmd->add_option("file", record_file)->required()->check(CLI::ExistingFile);

  auto* bench_cmd = app.add_subcommand("bench-match", "naive vs partial matching");
  std::string bench_dir, jsonl;
  int rounds = 16;
  std::size_t max_facts = 20000;
  bench_cmd->add_option("dir", bench_dir, "directory of .script/.gex files")->required();
  bench_cmd->add_option("--rounds", rounds);
  bench_cmd->add_option("--max-facts", max_facts);
  bench_cmd->add_option("--jsonl", jsonl, "also write one JSON object per problem");

  auto* dump_cmd = app.add_subcommand("figure-dump", "print point coordinates");
  std::string fig_file;
  dump_cmd->add_option("file", fig_file, ".script or problem file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    g.load();
    if (*solve_cmd)
      return cmd_solve(g, problem, proposer, beam, depth, timeout, call_ms, solve_out);
    if (*gen_cmd) return cmd_generate(g, n, gen_out, max_records, per_shard);
    if (*check_cmd) return cmd_check(g, record_file);
    if (*bench_cmd) return cmd_bench(g, bench_dir, rounds, max_facts, jsonl);
    if (*dump_cmd) {
      std::cout << load_figure(fig_file, g).dump();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error Internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
