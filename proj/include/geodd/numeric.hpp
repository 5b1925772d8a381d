#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "geodd/construction.hpp"
#include "geodd/formal_lang.hpp"
#include "geodd/statement.hpp"

namespace geodd {

using Rng = std::mt19937_64;

// Platform-independent uniform draw in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

struct Point {
  double x = 0;
  double y = 0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
  friend Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return norm(a - b); }
inline Point rot90(Point a) { return {-a.y, a.x}; }

struct Tolerances {
  double eq = 1e-6;   // predicate equality
  double ang = 1e-7;  // angle bucket width (radians)
  double deg = 1e-4;  // degeneracy threshold

  bool valid() const { return 0 < ang && ang < eq && eq < deg; }
};

// Direction of a line modulo pi, in [0, pi).
struct AngleValue {
  double value = 0;
  std::int64_t bucket(double width) const { return std::llround(value / width); }
};

// Direction angle of the line through a and b, in [0, pi).
// Throws DegenerateInput when the points coincide within tol.deg.
AngleValue line_angle(Point a, Point b, const Tolerances& tol);

// Signed difference of two mod-pi angles reduced to [-pi/2, pi/2).
double angle_diff(double a, double b);

class Figure {
 public:
  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  bool has(std::string_view name) const { return index_.count(std::string(name)) != 0; }
  std::optional<int> index_of(std::string_view name) const;
  const std::string& name(int i) const { return names_[static_cast<std::size_t>(i)]; }
  const std::vector<std::string>& names() const { return names_; }
  Point point(int i) const { return coords_[static_cast<std::size_t>(i)]; }
  Point point(std::string_view name) const;
  const std::vector<Point>& coords() const { return coords_; }

  int add_point(const std::string& name, Point p, int clause = -1);
  // Clause that introduced a point, or -1.
  int clause_of(int i) const { return clause_of_[static_cast<std::size_t>(i)]; }

  // Centroid to origin, max radius 1.
  void normalize();

  // Premise clauses with their numbered statements, in build order.
  std::vector<PremiseClause> clauses;

  // "name x y" per line.
  std::string dump() const;

 private:
  std::vector<std::string> names_;
  std::vector<Point> coords_;
  std::vector<int> clause_of_;
  std::unordered_map<std::string, int> index_;
};

// Core numeric test on coordinates. `pts` has arity(pred) entries.
// Throws DegenerateInput where a line or ratio needs distinct points.
bool holds(Predicate pred, std::span<const Point> pts, Rational literal, const Tolerances& tol);

bool eval_statement(const Statement& s, const Figure& fig, const Tolerances& tol);

// Loci used to place points.
struct LineLocus {
  Point p;
  Point d;  // unit direction
};
struct CircleLocus {
  Point c;
  double r = 0;
};
using Locus = std::variant<Point, LineLocus, CircleLocus>;

std::vector<Point> intersect(const Locus& a, const Locus& b, const Tolerances& tol);

// Alternative loci for `unknown` implied by a statement whose other points are
// placed in `fig`. Empty when the statement constrains nothing we can solve
// (sameclock, or shapes beyond lines and circles).
std::vector<Locus> loci_for(const Statement& s, const std::string& unknown, const Figure& fig,
                            const Tolerances& tol);

// Places a clause's new points so that its statements hold. Clauses without
// statements get free points; a single-point clause uses locus intersection.
// Throws NumericallyInfeasible.
std::vector<Point> sketch_clause(const PremiseClause& clause, const Figure& fig, Rng& rng,
                                 const Tolerances& tol);

// Coordinates for the outputs of one script step (one construction, or an
// INTERSECT pair sharing its output). Throws NumericallyInfeasible.
std::vector<Point> sketch(std::span<const Construction> step, const Catalog& catalog,
                          const Figure& fig, Rng& rng, const Tolerances& tol);
inline std::vector<Point> sketch(const Construction& c, const Catalog& catalog,
                                 const Figure& fig, Rng& rng, const Tolerances& tol) {
  return sketch(std::span<const Construction>(&c, 1), catalog, fig, rng, tol);
}

}  // namespace geodd
