#include "geodd/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "geodd/error.hpp"

namespace geodd {

namespace {

constexpr double kPi = std::numbers::pi;

double mod_pi(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0) r += kPi;
  if (r >= kPi) r -= kPi;
  return r;
}

double theta(Point a, Point b, const Tolerances& tol) { return line_angle(a, b, tol).value; }

double seg_len(Point a, Point b, const Tolerances& tol) {
  double d = dist(a, b);
  if (d < tol.deg) throw Error(ErrorCode::DegenerateInput, "coincident segment endpoints");
  return d;
}

double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

bool triangle_ok(Point a, Point b, Point c, const Tolerances& tol) {
  double longest = std::max({dist(a, b), dist(b, c), dist(c, a)});
  return longest > tol.deg && std::abs(orient(a, b, c)) / longest > tol.eq;
}

bool similar(std::span<const Point> p, bool reverse, bool congruent, const Tolerances& tol) {
  if (!triangle_ok(p[0], p[1], p[2], tol) || !triangle_ok(p[3], p[4], p[5], tol)) return false;
  std::array<double, 3> r;
  std::array<std::pair<int, int>, 3> sides = {{{0, 1}, {1, 2}, {2, 0}}};
  for (int k = 0; k < 3; ++k) {
    auto [i, j] = sides[k];
    double l1 = seg_len(p[i], p[j], tol);
    double l2 = seg_len(p[3 + i], p[3 + j], tol);
    if (congruent && std::abs(l1 - l2) >= tol.eq) return false;
    r[k] = std::log(l1 / l2);
  }
  auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  if (*hi - *lo >= tol.eq) return false;
  bool same = (orient(p[0], p[1], p[2]) > 0) == (orient(p[3], p[4], p[5]) > 0);
  return reverse ? !same : same;
}

bool near_existing(Point p, const Figure& fig, double sep) {
  for (const auto& q : fig.coords())
    if (dist(p, q) < sep) return true;
  return false;
}

Point free_point(Rng& rng) {
  while (true) {
    Point p{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    if (dot(p, p) <= 1) return p;
  }
}

Point unit(Point v) { return v * (1.0 / norm(v)); }
Point dir_of(double th) { return {std::cos(th), std::sin(th)}; }

std::optional<CircleLocus> circle_through(Point a, Point b, Point c, const Tolerances& tol) {
  double d = 2 * orient(a, b, c);
  if (std::abs(d) < tol.eq) return std::nullopt;
  double a2 = dot(a, a), b2 = dot(b, b), c2 = dot(c, c);
  Point o{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
          (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
  return CircleLocus{o, dist(o, a)};
}

// Complex helpers for similarity placement.
Point cmul(Point a, Point b) { return {a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x}; }
Point cdiv(Point a, Point b) {
  double n = dot(b, b);
  return {(a.x * b.x + a.y * b.y) / n, (a.y * b.x - a.x * b.y) / n};
}
Point conj(Point a) { return {a.x, -a.y}; }

// Collects coefficients for lines (or segments) given as point pairs.
// Returns false when a pair has the unknown at both ends.
bool collect(const std::vector<std::pair<std::string, std::string>>& pairs,
             const std::vector<int>& coeffs, const std::string& unknown, const Figure& fig,
             const Tolerances& tol, bool lengths, double& constant,
             std::map<std::string, int>& anchors) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    bool ua = a == unknown, ub = b == unknown;
    if (ua && ub) return false;
    if (ua || ub) {
      anchors[ua ? b : a] += coeffs[i];
      continue;
    }
    Point pa = fig.point(a), pb = fig.point(b);
    double v = lengths ? std::log(seg_len(pa, pb, tol)) : theta(pa, pb, tol);
    constant += coeffs[i] * v;
  }
  for (auto it = anchors.begin(); it != anchors.end();) {
    if (it->second == 0)
      it = anchors.erase(it);
    else
      ++it;
  }
  return true;
}

std::vector<Locus> angle_loci(const std::vector<std::pair<std::string, std::string>>& lines,
                              const std::vector<int>& coeffs, double k0,
                              const std::string& unknown, const Figure& fig,
                              const Tolerances& tol) {
  double k = k0;
  std::map<std::string, int> anchors;
  if (!collect(lines, coeffs, unknown, fig, tol, false, k, anchors)) return {};
  std::vector<Locus> out;
  if (anchors.size() == 1) {
    auto [name, c] = *anchors.begin();
    Point p = fig.point(name);
    int m = std::abs(c);
    double base = -k / c;
    for (int j = 0; j < m; ++j) out.push_back(LineLocus{p, dir_of(mod_pi(base + j * kPi / m))});
    return out;
  }
  if (anchors.size() == 2) {
    auto it = anchors.begin();
    auto [n1, c1] = *it++;
    auto [n2, c2] = *it;
    if (std::abs(c1) != 1 || c1 != -c2) return {};
    // c1*th(X,P) - c1*th(X,Q) + k = 0  =>  th(XQ) = th(XP) + k / c1.
    Point p = fig.point(n1), q = fig.point(n2);
    double shift = mod_pi(k / c1);
    double pq = theta(p, q, tol);
    if (std::min(shift, kPi - shift) < tol.eq) return {LineLocus{p, dir_of(pq)}};
    for (double off : {kPi / 3, kPi / 5, 2 * kPi / 7}) {
      LineLocus lp{p, dir_of(pq + off)};
      LineLocus lq{q, dir_of(pq + off + shift)};
      auto ts = intersect(lp, lq, tol);
      if (ts.empty()) continue;
      if (auto circ = circle_through(p, q, ts.front(), tol)) return {*circ};
    }
    return {};
  }
  return {};
}

std::vector<Locus> length_loci(const std::vector<std::pair<std::string, std::string>>& segs,
                               const std::vector<int>& coeffs, double k0,
                               const std::string& unknown, const Figure& fig,
                               const Tolerances& tol) {
  double k = k0;
  std::map<std::string, int> anchors;
  if (!collect(segs, coeffs, unknown, fig, tol, true, k, anchors)) return {};
  if (anchors.size() == 1) {
    auto [name, c] = *anchors.begin();
    return {CircleLocus{fig.point(name), std::exp(-k / c)}};
  }
  if (anchors.size() == 2) {
    auto it = anchors.begin();
    auto [n1, c1] = *it++;
    auto [n2, c2] = *it;
    if (std::abs(c1) != 1 || c1 != -c2) return {};
    // |XP| / |XQ| = ratio.
    double ratio = std::exp(-k / c1);
    Point p = fig.point(n1), q = fig.point(n2);
    if (dist(p, q) < tol.deg) return {};
    if (std::abs(ratio - 1) < 1e-12) return {LineLocus{(p + q) * 0.5, unit(rot90(q - p))}};
    double r2 = ratio * ratio;
    Point c = (p - q * r2) * (1.0 / (1 - r2));
    return {CircleLocus{c, ratio * dist(p, q) / std::abs(1 - r2)}};
  }
  return {};
}

std::vector<std::pair<std::string, std::string>> pairs_of(const std::vector<std::string>& a,
                                                          std::size_t n) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(a[2 * i], a[2 * i + 1]);
  return out;
}

Point random_on(const Locus& l, Rng& rng) {
  if (auto p = std::get_if<Point>(&l)) return *p;
  if (auto ln = std::get_if<LineLocus>(&l)) return ln->p + ln->d * uniform(rng, -1.2, 1.2);
  const auto& c = std::get<CircleLocus>(l);
  return c.c + dir_of(uniform(rng, 0, 2 * kPi)) * c.r;
}

std::vector<Point> place_single(const std::string& name, const std::vector<Statement>& stmts,
                                const Figure& fig, Rng& rng, const Tolerances& tol) {
  std::vector<std::vector<Locus>> constraints;
  for (const auto& s : stmts) {
    if (s.pred == Predicate::sameclock) continue;
    std::vector<Locus> alts;
    try {
      alts = loci_for(s, name, fig, tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput) throw;
      throw Error(ErrorCode::NumericallyInfeasible, "degenerate input for " + s.str());
    }
    if (alts.empty())
      throw Error(ErrorCode::NumericallyInfeasible, "no solvable locus for " + s.str(), name);
    constraints.push_back(std::move(alts));
  }

  std::vector<Point> candidates;
  for (const auto& alts : constraints)
    for (const auto& l : alts)
      if (auto p = std::get_if<Point>(&l)) candidates.push_back(*p);
  if (candidates.empty()) {
    if (constraints.empty()) {
      candidates.push_back(free_point(rng));
    } else if (constraints.size() == 1) {
      const auto& alts = constraints.front();
      candidates.push_back(random_on(alts[rng() % alts.size()], rng));
    } else {
      for (const auto& a : constraints[0])
        for (const auto& b : constraints[1])
          for (const auto& p : intersect(a, b, tol)) candidates.push_back(p);
    }
  }

  std::vector<Point> valid;
  for (const auto& p : candidates) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
    if (near_existing(p, fig, tol.deg * 10)) continue;
    Figure f = fig;
    f.add_point(name, p);
    bool ok = true;
    for (const auto& s : stmts) {
      try {
        if (!eval_statement(s, f, tol)) ok = false;
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) break;
    }
    if (ok) valid.push_back(p);
  }
  if (valid.empty())
    throw Error(ErrorCode::NumericallyInfeasible, "no real placement satisfies the clause", name);
  return {valid[rng() % valid.size()]};
}

double min_angle(Point a, Point b, Point c) {
  auto ang = [](Point v, Point w) {
    return std::acos(std::clamp(dot(v, w) / (norm(v) * norm(w)), -1.0, 1.0));
  };
  return std::min({ang(b - a, c - a), ang(a - b, c - b), ang(a - c, b - c)});
}

std::vector<Point> generic_triangle(Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Point a = free_point(rng), b = free_point(rng),
          c = free_point(rng);
    if (std::min({dist(a, b), dist(b, c), dist(c, a)}) < 0.3) continue;
    if (min_angle(a, b, c) < 0.25) continue;
    return {a, b, c};
  }
  throw Error(ErrorCode::NumericallyInfeasible, "could not sample a triangle");
}

std::vector<Point> run_recipe(const std::string& recipe, std::span<const Point> args, Rng& rng) {
  auto two_apart = [&] {
    while (true) {
      Point a = free_point(rng), b = free_point(rng);
      if (dist(a, b) > 0.5) return std::pair{a, b};
    }
  };
  if (recipe == "free") return {free_point(rng)};
  if (recipe == "segment") {
    auto [a, b] = two_apart();
    return {a, b};
  }
  if (recipe == "triangle") return generic_triangle(rng);
  if (recipe == "quadrangle") {
    auto t = generic_triangle(rng);
    while (true) {
      Point d = free_point(rng);
      bool far = std::all_of(t.begin(), t.end(), [&](Point q) { return dist(q, d) > 0.3; });
      bool generic = std::abs(orient(t[0], t[1], d)) > 0.05 &&
                     std::abs(orient(t[1], t[2], d)) > 0.05 &&
                     std::abs(orient(t[0], t[2], d)) > 0.05;
      if (far && generic) return {t[0], t[1], t[2], d};
    }
  }
  if (recipe == "iso_triangle") {
    auto [a, b] = two_apart();
    double ang = uniform(rng, 0.5, 2.6) * (uniform01(rng) < 0.5 ? -1 : 1);
    Point v = b - a;
    Point c = a + Point{v.x * std::cos(ang) - v.y * std::sin(ang),
                        v.x * std::sin(ang) + v.y * std::cos(ang)};
    return {a, b, c};
  }
  if (recipe == "r_triangle") {
    auto [a, b] = two_apart();
    double s = uniform(rng, 0.5, 1.5) * (uniform01(rng) < 0.5 ? -1 : 1);
    return {a, b, a + rot90(b - a) * s};
  }
  if (recipe == "rectangle") {
    auto [a, b] = two_apart();
    double s = uniform(rng, 0.5, 1.5) * (uniform01(rng) < 0.5 ? -1 : 1);
    Point h = rot90(b - a) * s;
    return {a, b, b + h, a + h};
  }
  if (recipe == "incenter") {
    Point a = args[0], b = args[1], c = args[2];
    double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
    double p = la + lb + lc;
    return {(a * la + b * lb + c * lc) * (1.0 / p)};
  }
  if (recipe == "eq_triangle") {
    Point a = args[0], b = args[1];
    Point v = b - a;
    double c = 0.5, s = std::sqrt(3.0) / 2;
    return {a + Point{v.x * c - v.y * s, v.x * s + v.y * c}};
  }
  throw Error(ErrorCode::NumericallyInfeasible, "unknown sketch recipe", recipe);
}

}  // namespace

AngleValue line_angle(Point a, Point b, const Tolerances& tol) {
  Point d = b - a;
  if (norm(d) < tol.deg) throw Error(ErrorCode::DegenerateInput, "coincident line points");
  return {mod_pi(std::atan2(d.y, d.x))};
}

double angle_diff(double a, double b) {
  double d = a - b;
  d -= kPi * std::floor((d + kPi / 2) / kPi);
  return d;
}

std::optional<int> Figure::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Point Figure::point(std::string_view name) const {
  auto i = index_of(name);
  if (!i) throw Error(ErrorCode::UndeclaredPoint, "", std::string(name));
  return coords_[static_cast<std::size_t>(*i)];
}

int Figure::add_point(const std::string& name, Point p, int clause) {
  if (index_.count(name)) throw Error(ErrorCode::DuplicatePoint, "", name);
  int i = static_cast<int>(names_.size());
  names_.push_back(name);
  coords_.push_back(p);
  clause_of_.push_back(clause);
  index_[name] = i;
  return i;
}

void Figure::normalize() {
  if (coords_.empty()) return;
  Point c{0, 0};
  for (const auto& p : coords_) c = c + p;
  c = c * (1.0 / static_cast<double>(coords_.size()));
  double r = 0;
  for (auto& p : coords_) {
    p = p - c;
    r = std::max(r, norm(p));
  }
  if (r > 0)
    for (auto& p : coords_) p = p * (1.0 / r);
}

std::string Figure::dump() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < names_.size(); ++i)
    os << names_[i] << ' ' << coords_[i].x << ' ' << coords_[i].y << '\n';
  return os.str();
}

bool holds(Predicate pred, std::span<const Point> p, Rational lit, const Tolerances& tol) {
  switch (pred) {
    case Predicate::coll: {
      double longest = std::max({dist(p[0], p[1]), dist(p[1], p[2]), dist(p[2], p[0])});
      if (longest < tol.deg) return true;
      return std::abs(orient(p[0], p[1], p[2])) / longest < tol.eq;
    }
    case Predicate::para:
      return std::abs(angle_diff(theta(p[0], p[1], tol), theta(p[2], p[3], tol))) < tol.eq;
    case Predicate::perp:
      return std::abs(angle_diff(theta(p[2], p[3], tol) - theta(p[0], p[1], tol), kPi / 2)) <
             tol.eq;
    case Predicate::cong:
      return std::abs(seg_len(p[0], p[1], tol) - seg_len(p[2], p[3], tol)) < tol.eq;
    case Predicate::midp:
      seg_len(p[1], p[2], tol);
      return dist(p[0], (p[1] + p[2]) * 0.5) < tol.eq;
    case Predicate::cyclic: {
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) seg_len(p[i], p[j], tol);
      // Circle through the best-conditioned triple, test the remaining point.
      int skip = 0;
      double best = -1;
      for (int s = 0; s < 4; ++s) {
        std::array<Point, 3> t;
        for (int i = 0, k = 0; i < 4; ++i)
          if (i != s) t[k++] = p[i];
        double a = std::abs(orient(t[0], t[1], t[2]));
        if (a > best) {
          best = a;
          skip = s;
        }
      }
      std::array<Point, 3> t;
      for (int i = 0, k = 0; i < 4; ++i)
        if (i != skip) t[k++] = p[i];
      auto circ = circle_through(t[0], t[1], t[2], tol);
      if (!circ) return false;
      return std::abs(dist(circ->c, p[skip]) - circ->r) < tol.eq;
    }
    case Predicate::eqangle: {
      double a1 = theta(p[2], p[3], tol) - theta(p[0], p[1], tol);
      double a2 = theta(p[6], p[7], tol) - theta(p[4], p[5], tol);
      return std::abs(angle_diff(a1, a2)) < tol.eq;
    }
    case Predicate::eqratio: {
      double r1 = std::log(seg_len(p[0], p[1], tol) / seg_len(p[2], p[3], tol));
      double r2 = std::log(seg_len(p[4], p[5], tol) / seg_len(p[6], p[7], tol));
      return std::abs(r1 - r2) < tol.eq;
    }
    case Predicate::aconst: {
      double a = theta(p[2], p[3], tol) - theta(p[0], p[1], tol);
      return std::abs(angle_diff(a, lit.to_double() * kPi / 180.0)) < tol.eq;
    }
    case Predicate::rconst: {
      double r = std::log(seg_len(p[0], p[1], tol) / seg_len(p[2], p[3], tol));
      return std::abs(r - std::log(lit.to_double())) < tol.eq;
    }
    case Predicate::simtri:
      return similar(p, false, false, tol);
    case Predicate::simtrir:
      return similar(p, true, false, tol);
    case Predicate::contri:
      return similar(p, false, true, tol);
    case Predicate::contrir:
      return similar(p, true, true, tol);
    case Predicate::sameclock: {
      double o1 = orient(p[0], p[1], p[2]), o2 = orient(p[3], p[4], p[5]);
      if (std::abs(o1) < tol.eq || std::abs(o2) < tol.eq)
        throw Error(ErrorCode::DegenerateInput, "flat triangle in sameclock");
      return (o1 > 0) == (o2 > 0);
    }
  }
  return false;
}

bool eval_statement(const Statement& s, const Figure& fig, const Tolerances& tol) {
  if (s.args.size() != arity(s.pred))
    throw Error(ErrorCode::ArityMismatch, "", std::string(predicate_name(s.pred)));
  std::array<Point, kMaxArity> pts;
  for (std::size_t i = 0; i < s.args.size(); ++i) pts[i] = fig.point(s.args[i]);
  return holds(s.pred, std::span<const Point>(pts.data(), s.args.size()), s.literal, tol);
}

std::vector<Point> intersect(const Locus& a, const Locus& b, const Tolerances& tol) {
  auto on = [&](Point p, const Locus& l) {
    if (auto q = std::get_if<Point>(&l)) return dist(p, *q) < tol.eq;
    if (auto ln = std::get_if<LineLocus>(&l)) return std::abs(cross(ln->d, p - ln->p)) < tol.eq;
    const auto& c = std::get<CircleLocus>(l);
    return std::abs(dist(p, c.c) - c.r) < tol.eq;
  };
  if (auto p = std::get_if<Point>(&a)) return on(*p, b) ? std::vector<Point>{*p} : std::vector<Point>{};
  if (auto p = std::get_if<Point>(&b)) return on(*p, a) ? std::vector<Point>{*p} : std::vector<Point>{};

  auto line_circle = [&](const LineLocus& l, const CircleLocus& c) {
    Point f = l.p + l.d * dot(c.c - l.p, l.d);
    double h = dist(f, c.c);
    std::vector<Point> out;
    if (h > c.r + tol.eq) return out;
    double t = std::sqrt(std::max(0.0, c.r * c.r - h * h));
    if (t < tol.eq) return std::vector<Point>{f};
    return std::vector<Point>{f + l.d * t, f - l.d * t};
  };

  if (auto l1 = std::get_if<LineLocus>(&a)) {
    if (auto l2 = std::get_if<LineLocus>(&b)) {
      double den = cross(l1->d, l2->d);
      if (std::abs(den) < tol.eq) return {};
      double t = cross(l2->p - l1->p, l2->d) / den;
      return {l1->p + l1->d * t};
    }
    return line_circle(*l1, std::get<CircleLocus>(b));
  }
  const auto& c1 = std::get<CircleLocus>(a);
  if (auto l2 = std::get_if<LineLocus>(&b)) return line_circle(*l2, c1);
  const auto& c2 = std::get<CircleLocus>(b);
  double d = dist(c1.c, c2.c);
  if (d < tol.deg) return {};
  if (d > c1.r + c2.r + tol.eq || d < std::abs(c1.r - c2.r) - tol.eq) return {};
  double x = (d * d + c1.r * c1.r - c2.r * c2.r) / (2 * d);
  double h = std::sqrt(std::max(0.0, c1.r * c1.r - x * x));
  Point u = (c2.c - c1.c) * (1.0 / d);
  Point m = c1.c + u * x;
  if (h < tol.eq) return {m};
  return {m + rot90(u) * h, m - rot90(u) * h};
}

std::vector<Locus> loci_for(const Statement& s, const std::string& unknown, const Figure& fig,
                            const Tolerances& tol) {
  std::size_t uses = 0;
  for (const auto& a : s.args) {
    if (a == unknown)
      ++uses;
    else if (!fig.has(a))
      return {};
  }
  if (uses == 0) return {};
  const auto& A = s.args;
  switch (s.pred) {
    case Predicate::coll: {
      if (uses != 1) return {};
      std::vector<std::string> known;
      for (const auto& a : A)
        if (a != unknown) known.push_back(a);
      Point p = fig.point(known[0]), q = fig.point(known[1]);
      if (dist(p, q) < tol.deg) return {};
      return {LineLocus{p, unit(q - p)}};
    }
    case Predicate::para:
      return angle_loci(pairs_of(A, 2), {-1, 1}, 0, unknown, fig, tol);
    case Predicate::perp:
      return angle_loci(pairs_of(A, 2), {-1, 1}, -kPi / 2, unknown, fig, tol);
    case Predicate::aconst:
      return angle_loci(pairs_of(A, 2), {-1, 1}, -s.literal.to_double() * kPi / 180, unknown,
                        fig, tol);
    case Predicate::eqangle:
      return angle_loci(pairs_of(A, 4), {-1, 1, 1, -1}, 0, unknown, fig, tol);
    case Predicate::cong:
      return length_loci(pairs_of(A, 2), {1, -1}, 0, unknown, fig, tol);
    case Predicate::eqratio:
      return length_loci(pairs_of(A, 4), {1, -1, -1, 1}, 0, unknown, fig, tol);
    case Predicate::rconst:
      return length_loci(pairs_of(A, 2), {1, -1}, -std::log(s.literal.to_double()), unknown,
                         fig, tol);
    case Predicate::midp: {
      if (uses != 1) return {};
      if (A[0] == unknown) return {(fig.point(A[1]) + fig.point(A[2])) * 0.5};
      Point m = fig.point(A[0]);
      Point other = fig.point(A[1] == unknown ? A[2] : A[1]);
      return {m * 2.0 - other};
    }
    case Predicate::cyclic: {
      if (uses != 1) return {};
      std::vector<Point> known;
      for (const auto& a : A)
        if (a != unknown) known.push_back(fig.point(a));
      if (auto c = circle_through(known[0], known[1], known[2], tol)) return {*c};
      return {};
    }
    case Predicate::simtri:
    case Predicate::simtrir:
    case Predicate::contri:
    case Predicate::contrir: {
      if (uses != 1) return {};
      bool reverse = s.pred == Predicate::simtrir || s.pred == Predicate::contrir;
      for (const auto& [v, lit] : statement_variants<std::string>(s.pred, A, s.literal)) {
        (void)lit;
        if (v[5] != unknown) continue;
        Point a = fig.point(v[0]), b = fig.point(v[1]), c = fig.point(v[2]);
        Point p = fig.point(v[3]), q = fig.point(v[4]);
        if (dist(a, b) < tol.deg) return {};
        Point z = cdiv(c - a, b - a);
        if (reverse) z = conj(z);
        return {p + cmul(q - p, z)};
      }
      return {};
    }
    case Predicate::sameclock:
      return {};
  }
  return {};
}

std::vector<Point> sketch_clause(const PremiseClause& clause, const Figure& fig, Rng& rng,
                                 const Tolerances& tol) {
  if (clause.statements.empty()) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < clause.points.size(); ++i) {
      Point p;
      int tries = 0;
      do {
        p = free_point(rng);
      } while ((near_existing(p, fig, 0.05) ||
                std::any_of(out.begin(), out.end(), [&](Point q) { return dist(p, q) < 0.05; })) &&
               ++tries < 100);
      out.push_back(p);
    }
    return out;
  }
  if (clause.points.size() == 1) {
    std::vector<Statement> stmts;
    for (const auto& ns : clause.statements) stmts.push_back(ns.stmt);
    return place_single(clause.points.front(), stmts, fig, rng, tol);
  }
  // Several points: place them in order, each under the statements that
  // become fully placed with it.
  Figure f = fig;
  std::vector<Point> out;
  for (const auto& name : clause.points) {
    std::vector<Statement> stmts;
    for (const auto& ns : clause.statements) {
      const auto& args = ns.stmt.args;
      bool mentions = std::find(args.begin(), args.end(), name) != args.end();
      bool placed = std::all_of(args.begin(), args.end(),
                                [&](const std::string& a) { return a == name || f.has(a); });
      if (mentions && placed) stmts.push_back(ns.stmt);
    }
    Point p;
    if (stmts.empty()) {
      PremiseClause one{"", {name}, {}};
      p = sketch_clause(one, f, rng, tol).front();
    } else {
      p = place_single(name, stmts, f, rng, tol).front();
    }
    f.add_point(name, p);
    out.push_back(p);
  }
  return out;
}

std::vector<Point> sketch(std::span<const Construction> step, const Catalog& catalog,
                          const Figure& fig, Rng& rng, const Tolerances& tol) {
  if (step.empty()) return {};
  const Construction& head = step.front();
  const ConstructionDef* def = catalog.find(head.name);
  if (!def) throw Error(ErrorCode::UnknownConstruction, "", head.name);

  std::vector<Statement> added;
  for (const auto& c : step) {
    auto s = catalog.added_statements(c);
    added.insert(added.end(), s.begin(), s.end());
  }
  if (def->recipe == "locus") {
    if (head.outs.size() != 1)
      throw Error(ErrorCode::NumericallyInfeasible, "locus recipe needs one output", head.name);
    return place_single(head.outs.front(), added, fig, rng, tol);
  }
  std::vector<Point> args;
  for (const auto& a : head.args) args.push_back(fig.point(a));
  std::vector<Point> out = run_recipe(def->recipe, args, rng);

  Figure f = fig;
  for (std::size_t i = 0; i < head.outs.size(); ++i) {
    if (near_existing(out[i], f, tol.deg * 10))
      throw Error(ErrorCode::NumericallyInfeasible, "output coincides with a point",
                  head.outs[i]);
    f.add_point(head.outs[i], out[i]);
  }
  for (const auto& s : added) {
    bool ok = false;
    try {
      ok = eval_statement(s, f, tol);
    } catch (const Error&) {
    }
    if (!ok) throw Error(ErrorCode::NumericallyInfeasible, "recipe broke " + s.str(), head.name);
  }
  return out;
}

}  // namespace geodd
