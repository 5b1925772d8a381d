#include "geodd/prover.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <set>
#include <thread>

#include "geodd/diagram.hpp"
#include "geodd/error.hpp"
#include "geodd/generator.hpp"
#include "geodd/traceback.hpp"

namespace geodd {

namespace {

std::string next_name(const Figure& fig) {
  for (std::size_t i = fig.size();; ++i)
    if (!fig.has(point_name(i))) return point_name(i);
}

bool mentions(const Statement& s, const std::vector<std::string>& pts) {
  for (const auto& a : s.args)
    if (std::find(pts.begin(), pts.end(), a) != pts.end()) return true;
  return false;
}

}  // namespace

EnumerativeProposer::EnumerativeProposer(const Catalog& catalog, Tolerances tol)
    : catalog_(catalog), tol_(tol) {}

std::vector<Candidate> EnumerativeProposer::propose(const ProofState& s, std::size_t k) {
  const Figure& fig = s.figure;
  const int n = static_cast<int>(fig.size());
  const auto& P = fig.coords();
  const std::string out = next_name(fig);

  struct Seg {
    int i, j;
    double len, dir;
  };
  std::vector<Seg> segs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      segs.push_back({i, j, std::hypot(P[j].x - P[i].x, P[j].y - P[i].y),
                      std::atan2(P[j].y - P[i].y, P[j].x - P[i].x)});
  const double eq = tol_.eq * 10;

  std::vector<std::string> goal_pts = s.problem->goal.args;
  std::vector<Construction> menu;
  auto add = [&](const char* name, std::vector<int> args) {
    const ConstructionDef* d = catalog_.find(name);
    if (!d || d->in_arity() != args.size()) return;
    Construction c;
    c.name = name;
    c.category = d->category;
    c.outs = {out};
    for (int a : args) c.args.push_back(fig.name(a));
    menu.push_back(std::move(c));
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      if (a < b) add("midpoint", {a, b});
      add("mirror", {a, b});
      for (int c = b + 1; c < n; ++c) {
        if (c == a) continue;
        add("foot", {a, b, c});
        if (a < b) {
          add("circumcenter", {a, b, c});
          add("orthocenter", {a, b, c});
        }
      }
    }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = a + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d)
          if (c != b && d != b) add("intersection_ll", {a, b, c, d});

  struct Scored {
    double score;
    std::string text;
    Point p;
  };
  std::vector<Scored> all;
  for (const auto& c : menu) {
    if (!check_prerequisites(c, fig, catalog_, tol_)) continue;
    Rng rng(1);
    Point q;
    try {
      q = sketch(c, catalog_, fig, rng, tol_).front();
    } catch (const Error&) {
      continue;
    }
    // One point per kind of relation (equal length, parallel, perpendicular)
    // between a new segment and an existing one. Relations among the
    // construction's own arguments hold by definition and do not count.
    std::vector<char> is_arg(static_cast<std::size_t>(n), 0);
    for (const auto& a : c.args) is_arg[static_cast<std::size_t>(*fig.index_of(a))] = 1;
    double score = 0;
    for (int i = 0; i < n; ++i) {
      Point d{P[i].x - q.x, P[i].y - q.y};
      double len = std::hypot(d.x, d.y);
      double t = std::atan2(d.y, d.x);
      bool eq_len = false, par = false, per = false;
      // On an existing line through p_i, q only inherits that line's relations.
      bool on_line = false;
      for (const auto& sg : segs)
        if ((sg.i == i || sg.j == i) && std::abs(angle_diff(sg.dir, t)) < eq) on_line = true;
      for (const auto& sg : segs) {
        if (is_arg[static_cast<std::size_t>(i)] && is_arg[static_cast<std::size_t>(sg.i)] &&
            is_arg[static_cast<std::size_t>(sg.j)])
          continue;
        if (sg.i == i || sg.j == i) {
          // Parallel to a segment through p_i just says q is on that line.
          eq_len |= std::abs(sg.len - len) < eq;
          per |= std::abs(angle_diff(sg.dir, t + std::numbers::pi / 2)) < eq;
          continue;
        }
        eq_len |= std::abs(sg.len - len) < eq;
        par |= std::abs(angle_diff(sg.dir, t)) < eq;
        per |= std::abs(angle_diff(sg.dir, t + std::numbers::pi / 2)) < eq;
      }
      score += eq_len + (on_line ? 0 : par + per);
    }
    // Small preference for constructions on the goal's points.
    for (const auto& a : c.args)
      if (std::find(goal_pts.begin(), goal_pts.end(), a) != goal_pts.end()) score += 0.25;
    all.push_back({score, serialize_construction_line({c}), q});
  }
  std::stable_sort(all.begin(), all.end(), [](const Scored& x, const Scored& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.text < y.text;
  });
  // One candidate per new location.
  std::vector<Candidate> res;
  std::vector<Point> taken;
  for (const auto& c : all) {
    if (res.size() >= k) break;
    bool dup = std::any_of(taken.begin(), taken.end(), [&](Point p) {
      return std::hypot(p.x - c.p.x, p.y - c.p.y) < tol_.eq;
    });
    if (dup) continue;
    taken.push_back(c.p);
    res.push_back({c.score, c.text});
  }
  return res;
}

ExternalProposer::ExternalProposer(std::string command, int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {}

std::vector<Candidate> ExternalProposer::propose(const ProofState& s, std::size_t k) {
  std::string input = serialize_problem(*s.problem) + "<aux>\n";
  for (const auto& c : s.aux) input += serialize_clause(c) + " ;\n";
  input += "</aux>\n";

  int in[2], out[2];
  if (pipe(in) != 0) throw Error(ErrorCode::ProposerUnavailable, "pipe failed");
  if (pipe(out) != 0) {
    close(in[0]), close(in[1]);
    throw Error(ErrorCode::ProposerUnavailable, "pipe failed");
  }
  std::string kval = std::to_string(k);
  pid_t pid = fork();
  if (pid < 0) {
    close(in[0]), close(in[1]), close(out[0]), close(out[1]);
    throw Error(ErrorCode::ProposerUnavailable, "fork failed");
  }
  if (pid == 0) {
    dup2(in[0], 0);
    dup2(out[1], 1);
    close(in[0]), close(in[1]), close(out[0]), close(out[1]);
    setenv("GEODD_PROPOSALS", kval.c_str(), 1);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in[0]);
  close(out[1]);

  // The child may exit without reading; keep EPIPE from killing us.
  struct sigaction ign{}, old{};
  ign.sa_handler = SIG_IGN;
  sigaction(SIGPIPE, &ign, &old);
  std::size_t off = 0;
  while (off < input.size()) {
    ssize_t w = write(in[1], input.data() + off, input.size() - off);
    if (w <= 0) break;
    off += static_cast<std::size_t>(w);
  }
  close(in[1]);
  sigaction(SIGPIPE, &old, nullptr);

  std::string reply;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);
  bool timed_out = false;
  char buf[4096];
  while (true) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{out[0], POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(left));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) {
      timed_out = r == 0;
      break;
    }
    ssize_t got = read(out[0], buf, sizeof buf);
    if (got <= 0) break;
    reply.append(buf, static_cast<std::size_t>(got));
  }
  close(out[0]);
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  if (timed_out) return {};
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
    throw Error(ErrorCode::ProposerUnavailable, "cannot run proposer", command_);

  std::vector<Candidate> res;
  std::size_t pos = 0;
  while (pos < reply.size() && res.size() < k) {
    std::size_t end = reply.find('\n', pos);
    if (end == std::string::npos) end = reply.size();
    std::string line = reply.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    double score = 0;
    if (tab == std::string::npos) {
      ++malformed_;
      continue;
    }
    auto [p, ec] = std::from_chars(line.data(), line.data() + tab, score);
    if (ec != std::errc() || p != line.data() + tab || !std::isfinite(score)) {
      ++malformed_;
      continue;
    }
    res.push_back({score, line.substr(tab + 1)});
  }
  return res;
}

InterleaveProposer::InterleaveProposer(std::shared_ptr<Proposer> a, std::shared_ptr<Proposer> b)
    : a_(std::move(a)), b_(std::move(b)) {}

std::vector<Candidate> InterleaveProposer::propose(const ProofState& s, std::size_t k) {
  auto ranked = [&](Proposer& p) {
    auto v = p.propose(s, k);
    std::stable_sort(v.begin(), v.end(),
                     [](const Candidate& x, const Candidate& y) { return x.score > y.score; });
    return v;
  };
  auto x = ranked(*a_), y = ranked(*b_);
  std::vector<Candidate> res;
  std::set<std::string> seen;
  for (std::size_t i = 0; res.size() < k && (i < x.size() || i < y.size()); ++i)
    for (const auto* v : {&x, &y})
      if (i < v->size() && res.size() < k && seen.insert((*v)[i].clause).second)
        res.push_back({static_cast<double>(k - res.size()), (*v)[i].clause});
  return res;
}

FallbackProposer::FallbackProposer(std::shared_ptr<Proposer> primary,
                                   std::shared_ptr<Proposer> fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

std::vector<Candidate> FallbackProposer::propose(const ProofState& s, std::size_t k) {
  if (!degraded_) {
    try {
      return primary_->propose(s, k);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ProposerUnavailable) throw;
      std::fprintf(stderr, "warning: %s; using fallback proposer\n", e.what());
      degraded_ = true;
    }
  }
  return fallback_->propose(s, k);
}

PremiseClause parse_candidate(const std::string& text, const ProofState& s,
                              const Catalog& catalog) {
  const Figure& fig = s.figure;
  PremiseClause pc;
  try {
    if (text.find('=') != std::string::npos) {
      auto script = parse_construction_script(text, catalog);
      auto steps = script_steps(script);
      if (steps.size() != 1) throw Error(ErrorCode::InvalidProposal, "expected one step", text);
      for (const auto& c : steps[0])
        if (auto pr = check_prerequisites(c, fig, catalog); !pr)
          throw Error(ErrorCode::InvalidProposal, pr.reason, text);
      pc = clause_for_step(steps[0], catalog, 0);
    } else {
      pc = parse_clause(text, fig.names());
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidProposal) throw;
    throw Error(ErrorCode::InvalidProposal, e.what(), text);
  }
  if (pc.points.empty()) throw Error(ErrorCode::InvalidProposal, "no new point", text);
  for (const auto& p : pc.points)
    if (fig.has(p)) throw Error(ErrorCode::InvalidProposal, "point exists", p);
  for (const auto& ns : pc.statements) {
    // A statement only about old points would be an unproved premise.
    if (!mentions(ns.stmt, pc.points)) throw Error(ErrorCode::InvalidProposal, "statement about old points", text);
    if (ns.stmt.pred == Predicate::sameclock)
      throw Error(ErrorCode::InvalidProposal, "sameclock in aux", text);
    for (const auto& a : ns.stmt.args)
      if (!fig.has(a) && std::find(pc.points.begin(), pc.points.end(), a) == pc.points.end())
        throw Error(ErrorCode::InvalidProposal, "unknown point", a);
  }
  pc.label.clear();
  return pc;
}

namespace {

struct Node {
  ProofState state;
  std::string key;  // aux clause texts, for ties and duplicates
};

}  // namespace

std::optional<Record> solve(const Problem& problem, std::span<const CompiledRule> rules,
                            Proposer& proposer, const SolveOptions& opt, SolveStats* stats) {
  auto t0 = std::chrono::steady_clock::now();
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  st = {};
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  auto out_of_time = [&] { return opt.budget.max_millis > 0 && elapsed() >= opt.budget.max_millis; };

  Rng rng(opt.seed);
  Node root;
  root.state.problem = &problem;
  root.state.figure = figure_from_problem(problem, opt.tol, rng);
  const std::size_t nclauses = problem.clauses.size();

  EngineOptions eo;
  eo.budget = opt.budget.engine;
  eo.tol = opt.tol;
  // Saturates the state's figure and returns a record if the goal follows.
  auto attempt = [&](const ProofState& s) -> std::optional<Record> {
    ++st.states;
    Engine eng(s.figure, rules, eo);
    eng.saturate();
    auto id = eng.query(problem.goal);
    if (!id) return std::nullopt;
    ProofDag dag = trace(eng, *id);
    AuxSplit split;
    for (std::size_t c = 0; c < s.figure.clauses.size(); ++c)
      (c < nclauses ? split.problem : split.aux).push_back(static_cast<int>(c));
    Record rec = make_record(eng, dag, split);
    rec.problem.goal = problem.goal;
    if (!replay(rec, s.figure, rules, opt.tol)) return std::nullopt;
    return rec;
  };
  auto finish = [&](std::optional<Record> r, int depth) {
    st.millis = elapsed();
    if (r) st.depth = depth;
    return r;
  };

  if (auto r = attempt(root.state)) return finish(r, 0);

  std::vector<Node> beam{root};
  std::set<std::string> seen;
  std::uint64_t child_seed = opt.seed;
  for (int depth = 1; depth <= opt.budget.depth; ++depth) {
    std::vector<Node> children;
    for (const Node& parent : beam) {
      if (out_of_time()) return finish(std::nullopt, -1);
      std::vector<Candidate> cands;
      try {
        cands = proposer.propose(parent.state, opt.budget.proposals);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ProposerUnavailable) throw;
        std::fprintf(stderr, "warning: %s\n", e.what());
        return finish(std::nullopt, -1);
      }
      if (cands.size() > opt.budget.proposals) cands.resize(opt.budget.proposals);
      for (const auto& cand : cands) {
        if (out_of_time()) return finish(std::nullopt, -1);
        if (!std::isfinite(cand.score)) {
          ++st.invalid;
          continue;
        }
        Node child;
        child.state.problem = &problem;
        child.state.aux = parent.state.aux;
        child.state.score = parent.state.score + cand.score;
        PremiseClause pc;
        try {
          pc = parse_candidate(cand.clause, parent.state);
          FactId next = 0;
          for (const auto& c : parent.state.figure.clauses)
            next += static_cast<FactId>(c.statements.size());
          for (auto& ns : pc.statements) ns.id = next++;
          Rng crng(++child_seed * 0x9e3779b97f4a7c15ULL);
          child.state.figure = extend_figure(parent.state.figure, pc, opt.tol, crng, 8);
        } catch (const Error& e) {
          ++st.invalid;
          continue;
        }
        child.state.aux.push_back(pc);
        child.key = parent.key + serialize_clause(pc) + ";";
        if (!seen.insert(child.key).second) continue;
        if (auto r = attempt(child.state)) return finish(r, depth);
        children.push_back(std::move(child));
      }
    }
    std::stable_sort(children.begin(), children.end(), [](const Node& x, const Node& y) {
      if (x.state.score != y.state.score) return x.state.score > y.state.score;
      if (x.state.aux.size() != y.state.aux.size()) return x.state.aux.size() < y.state.aux.size();
      return x.key < y.key;
    });
    if (children.size() > static_cast<std::size_t>(std::max(1, opt.budget.beam)))
      children.resize(static_cast<std::size_t>(std::max(1, opt.budget.beam)));
    beam = std::move(children);
    if (beam.empty()) break;
  }
  return finish(std::nullopt, -1);
}

std::vector<SolveResult> solve_all(const std::vector<Problem>& problems,
                                   std::span<const CompiledRule> rules,
                                   const std::function<std::unique_ptr<Proposer>()>& make_proposer,
                                   const SolveOptions& opt, int threads) {
  std::vector<SolveResult> out(problems.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < problems.size();) {
      try {
        auto proposer = make_proposer();
        out[i].record = solve(problems[i], rules, *proposer, opt, &out[i].stats);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::max(1, threads); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace geodd
