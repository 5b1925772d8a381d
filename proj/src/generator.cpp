#include "geodd/generator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "geodd/diagram.hpp"
#include "geodd/error.hpp"
#include "geodd/traceback.hpp"

namespace geodd {

std::string point_name(std::size_t i) {
  std::string s(1, static_cast<char>('a' + i % 26));
  for (i /= 26; i > 0; i /= 26) s.insert(s.begin(), static_cast<char>('a' + (i - 1) % 26));
  return s;
}

namespace {

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)); }

int pick_int(Rng& rng, int lo, int hi) { return lo + static_cast<int>(pick(rng, static_cast<std::size_t>(hi - lo + 1))); }

std::vector<std::string> pick_args(Rng& rng, const Figure& fig, std::size_t k) {
  std::vector<std::string> names = fig.names();
  for (std::size_t i = 0; i < k; ++i) std::swap(names[i], names[i + pick(rng, names.size() - i)]);
  names.resize(k);
  return names;
}

Construction apply(const ConstructionDef& d, std::vector<std::string> outs,
                   std::vector<std::string> args, std::size_t line) {
  Construction c;
  c.name = d.name;
  c.outs = std::move(outs);
  c.args = std::move(args);
  c.category = d.category;
  c.line = line;
  return c;
}

}  // namespace

Sample sample_script(const SampleConfig& cfg, const Catalog& catalog, Rng& rng) {
  Sample s;
  Figure& fig = s.figure;
  FactId next_id = 0;
  std::size_t line = 0;

  // Checks and places one step; false leaves the figure untouched.
  auto place = [&](std::vector<Construction> step) {
    for (const auto& c : step)
      if (!check_prerequisites(c, fig, catalog, cfg.tol)) return false;
    std::vector<Point> pts;
    try {
      pts = sketch(std::span<const Construction>(step), catalog, fig, rng, cfg.tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NumericallyInfeasible && e.code() != ErrorCode::DegenerateInput)
        throw;
      return false;
    }
    int clause = static_cast<int>(fig.clauses.size());
    const auto& outs = step.front().outs;
    for (std::size_t k = 0; k < outs.size(); ++k) fig.add_point(outs[k], pts[k], clause);
    PremiseClause pc = clause_for_step(step, catalog, next_id);
    next_id += static_cast<FactId>(pc.statements.size());
    fig.clauses.push_back(std::move(pc));
    s.script.insert(s.script.end(), step.begin(), step.end());
    ++line;
    return true;
  };
  auto fresh = [&](std::size_t k) {
    std::vector<std::string> outs;
    for (std::size_t i = 0; i < k; ++i) outs.push_back(point_name(fig.size() + i));
    return outs;
  };
  auto stuck = [&](const std::string& what) {
    return Error(ErrorCode::SamplingStuck, what + " after " + std::to_string(cfg.retries) + " tries",
                 std::to_string(line));
  };

  auto basics = catalog.of_category(Category::BASIC);
  auto frees = catalog.of_category(Category::BASIC_FREE);
  auto inters = catalog.of_category(Category::INTERSECT);
  auto others = catalog.of_category(Category::OTHERS);
  if (basics.empty() || inters.empty() || others.empty())
    throw Error(ErrorCode::SamplingStuck, "catalog lacks a category");

  {
    const auto* d = basics[pick(rng, basics.size())];
    bool ok = false;
    for (int t = 0; t < cfg.retries && !ok; ++t) ok = place({apply(*d, fresh(d->out_arity()), {}, line)});
    if (!ok) throw stuck(d->name);
  }
  int nfree = frees.empty() ? 0 : pick_int(rng, cfg.free_min, cfg.free_max);
  for (int i = 0; i < nfree; ++i) {
    const auto* d = frees[pick(rng, frees.size())];
    if (!place({apply(*d, fresh(1), {}, line)})) throw stuck(d->name);
  }

  int nsteps = pick_int(rng, cfg.steps_min, cfg.steps_max);
  for (int i = 0; i < nsteps; ++i) {
    // The kind is fixed before retrying so that rejections do not skew the mix.
    bool intersect = uniform01(rng) < cfg.p_intersect;
    bool ok = false;
    for (int t = 0; t < cfg.retries && !ok; ++t) {
      auto out = fresh(1);
      std::vector<Construction> step;
      if (intersect) {
        for (int k = 0; k < 2; ++k) {
          const auto* d = inters[pick(rng, inters.size())];
          if (d->in_arity() > fig.size()) break;
          step.push_back(apply(*d, out, pick_args(rng, fig, d->in_arity()), line));
        }
        if (step.size() != 2 || step[0] == step[1]) continue;
      } else {
        const auto* d = others[pick(rng, others.size())];
        if (d->in_arity() > fig.size()) continue;
        step.push_back(apply(*d, out, pick_args(rng, fig, d->in_arity()), line));
      }
      ok = place(std::move(step));
    }
    if (!ok) throw stuck(intersect ? "intersection" : "construction");
    ++(intersect ? s.intersect_steps : s.others_steps);
  }
  fig.normalize();
  if (!well_separated(fig, cfg.tol.deg * 10))
    throw Error(ErrorCode::SamplingStuck, "points too close after normalization");
  return s;
}

SeedResult generate_seed(const SampleConfig& cfg, const Catalog& catalog,
                         std::span<const CompiledRule> rules, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  SeedResult out;
  out.seed = seed;
  Rng rng(seed);
  try {
    out.sample = sample_script(cfg, catalog, rng);
  } catch (const Error& e) {
    out.error = e.what();
    return out;
  }
  out.built = true;

  EngineOptions opt;
  opt.budget = cfg.budget;
  opt.tol = cfg.tol;
  Engine eng(out.sample.figure, rules, opt);
  eng.saturate();

  std::vector<Atom> kept;
  for (const Atom& t : eng.closure()) {
    auto v = judge(t, eng);
    ++out.reasons[static_cast<std::size_t>(v.reason)];
    if (v.keep()) kept.push_back(t);
  }
  std::size_t before = kept.size();
  kept = dedupe(std::move(kept), eng.numeric());
  out.reasons[static_cast<std::size_t>(FilterReason::EquivalentDuplicate)] += before - kept.size();
  out.reasons[static_cast<std::size_t>(FilterReason::Keep)] -= before - kept.size();

  if (cfg.max_records) std::shuffle(kept.begin(), kept.end(), rng);
  for (const Atom& goal : kept) {
    if (cfg.max_records && out.records.size() >= cfg.max_records) break;
    if (auto id = eng.find(goal); id && eng.fact(*id).kind == FactKind::premise) continue;
    auto id = eng.query(goal);
    if (!id) continue;
    ProofDag dag = trace(eng, *id);
    if (dag.premises.empty()) continue;
    Record rec = make_record(eng, dag, classify_aux(eng.figure(), eng.fact(*id).atom, dag, eng));
    if (!replay(rec, eng.figure(), rules, cfg.tol)) continue;
    out.records.push_back(std::move(rec));
    out.millis.push_back(std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count());
  }
  return out;
}

void generate(const SampleConfig& cfg, const Catalog& catalog, std::span<const CompiledRule> rules,
              std::uint64_t first, std::size_t n, int threads,
              const std::function<void(SeedResult&)>& sink) {
  const std::size_t nt = static_cast<std::size_t>(std::max(1, threads));
  // Batches keep memory bounded while the sink sees seeds in order.
  const std::size_t batch = nt * 8;
  for (std::size_t lo = 0; lo < n; lo += batch) {
    std::size_t hi = std::min(n, lo + batch);
    std::vector<SeedResult> results(hi - lo);
    std::atomic<std::size_t> next{lo};
    std::exception_ptr failure;
    std::mutex m;
    auto work = [&] {
      for (std::size_t i; (i = next++) < hi;) {
        try {
          results[i - lo] = generate_seed(cfg, catalog, rules, first + i);
        } catch (...) {
          std::lock_guard lk(m);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    for (auto& r : results) sink(r);
  }
}

struct ShardWriter::Files {
  std::ofstream shard;
  std::ofstream manifest;
};

ShardWriter::ShardWriter(std::string dir, std::size_t per_shard)
    : dir_(std::move(dir)), per_shard_(std::max<std::size_t>(1, per_shard)), files_(new Files) {
  std::filesystem::create_directories(dir_);
  files_->manifest.open(std::filesystem::path(dir_) / "manifest.jsonl");
  if (!files_->manifest) throw Error(ErrorCode::Io, "cannot write manifest in " + dir_);
}

ShardWriter::~ShardWriter() { delete files_; }

void ShardWriter::open_next() {
  char name[32];
  std::snprintf(name, sizeof name, "shard-%05zu.txt", count_ / per_shard_);
  shard_name_ = name;
  files_->shard.close();
  files_->shard.open(std::filesystem::path(dir_) / shard_name_);
  if (!files_->shard) throw Error(ErrorCode::Io, "cannot write " + shard_name_);
  in_shard_ = 0;
}

void ShardWriter::add(const Record& r, long long millis) {
  if (count_ % per_shard_ == 0) open_next();
  if (in_shard_) files_->shard << '\n';
  files_->shard << serialize_record(r);
  RecordMeta m;
  m.path = shard_name_;
  m.index = in_shard_;
  m.goal_predicate = std::string(predicate_name(r.problem.goal.pred));
  std::size_t pts = 0;
  for (const auto& c : r.problem.clauses) pts += c.points.size();
  for (const auto& c : r.aux) pts += c.points.size();
  m.points = pts;
  m.aux_clauses = r.aux.size();
  m.proof_length = r.proof.size();
  m.millis = millis;
  files_->manifest << manifest_line(m) << '\n';
  files_->shard.flush();
  files_->manifest.flush();
  ++in_shard_;
  ++count_;
}

}  // namespace geodd
