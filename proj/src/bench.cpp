#include "geodd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "geodd/diagram.hpp"
#include "geodd/error.hpp"

namespace geodd {

std::optional<double> BenchRow::speedup() const {
  if (!equal || partial_ms <= 0) return std::nullopt;
  return naive_ms / partial_ms;
}

bool BenchReport::all_equal() const {
  return std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.equal; });
}

std::optional<double> BenchReport::geomean_speedup() const {
  if (rows.empty() || !all_equal()) return std::nullopt;
  double log_sum = 0;
  for (const auto& r : rows) {
    auto s = r.speedup();
    if (!s) return std::nullopt;
    log_sum += std::log(*s);
  }
  return std::exp(log_sum / static_cast<double>(rows.size()));
}

std::string BenchReport::table() const {
  std::size_t w = 7;
  for (const auto& r : rows) w = std::max(w, r.name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %6s %8s %12s %12s %9s %6s\n", static_cast<int>(w), "problem",
                "points", "facts", "naive_ms", "partial_ms", "speedup", "equal");
  out += buf;
  for (const auto& r : rows) {
    auto s = r.speedup();
    char sp[32] = "-";
    if (s) std::snprintf(sp, sizeof sp, "%.1fx", *s);
    std::snprintf(buf, sizeof buf, "%-*s %6zu %8zu %12.1f %12.1f %9s %6s\n", static_cast<int>(w),
                  r.name.c_str(), r.points, r.facts, r.naive_ms, r.partial_ms, sp,
                  r.equal ? "yes" : "NO");
    out += buf;
  }
  if (auto g = geomean_speedup()) {
    std::snprintf(buf, sizeof buf, "geometric mean speedup: %.1fx over %zu problems\n", *g, rows.size());
    out += buf;
  } else {
    out += "geometric mean speedup: n/a (closure mismatch or no problems)\n";
  }
  if (!hardware.empty()) out += "hardware: " + hardware + "\n";
  return out;
}

std::string BenchReport::jsonl() const {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::json j = {{"problem", r.name},     {"points", r.points},       {"facts", r.facts},
                        {"naive_ms", r.naive_ms}, {"partial_ms", r.partial_ms}, {"equal", r.equal}};
    if (auto s = r.speedup()) j["speedup"] = *s;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<BenchCase> load_bench_dir(const std::string& dir, const Catalog& catalog,
                                      const Tolerances& tol, std::uint64_t seed) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "not a directory", dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".script" || ext == ".gex")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<BenchCase> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw Error(ErrorCode::Io, "cannot read", f.string());
    std::stringstream ss;
    ss << in.rdbuf();
    Rng rng(seed);
    BenchCase c;
    c.name = f.stem().string();
    if (f.extension() == ".script") {
      auto script = parse_construction_script(ss.str(), catalog);
      c.figure = build_figure(script, catalog, tol, rng);
    } else {
      c.figure = figure_from_problem(parse_problem(ss.str()), tol, rng);
    }
    out.push_back(std::move(c));
  }
  return out;
}

BenchRow bench_figure(const BenchCase& c, std::span<const CompiledRule> rules, const Budget& budget,
                      const Tolerances& tol) {
  BenchRow row;
  row.name = c.name;
  row.points = c.figure.size();
  auto run = [&](MatchMode mode, double& ms) {
    EngineOptions opt;
    opt.mode = mode;
    opt.budget = budget;
    opt.tol = tol;
    auto t0 = std::chrono::steady_clock::now();
    Engine eng(c.figure, rules, opt);
    eng.saturate();
    auto closure = eng.closure();
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return closure;
  };
  auto fast = run(MatchMode::partial, row.partial_ms);
  auto slow = run(MatchMode::naive, row.naive_ms);
  row.facts = fast.size();
  row.equal = fast == slow;
  return row;
}

BenchReport bench_match(const std::vector<BenchCase>& cases, std::span<const CompiledRule> rules,
                        const Budget& budget, const Tolerances& tol, int threads) {
  BenchReport rep;
  rep.hardware = hardware_summary();
  rep.rows.resize(cases.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto work = [&] {
    for (std::size_t i; (i = next++) < cases.size();) {
      try {
        rep.rows[i] = bench_figure(cases[i], rules, budget, tol);
      } catch (...) {
        std::lock_guard lk(m);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rep;
}

void require_equal(const BenchReport& r) {
  for (const auto& row : r.rows)
    if (!row.equal) throw Error(ErrorCode::ClosureMismatch, "naive and partial closures differ", row.name);
}

std::string hardware_summary() {
  std::string model;
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);)
    if (line.rfind("model name", 0) == 0) {
      auto p = line.find(':');
      if (p != std::string::npos) model = line.substr(p + 2);
      break;
    }
  if (model.empty()) model = "unknown cpu";
  return model + ", " + std::to_string(std::thread::hardware_concurrency()) + " hw threads";
}

}  // namespace geodd
