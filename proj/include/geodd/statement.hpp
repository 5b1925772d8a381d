#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geodd/rational.hpp"

namespace geodd {

enum class Predicate : std::uint8_t {
  coll,
  para,
  perp,
  cong,
  midp,
  cyclic,
  eqangle,
  eqratio,
  aconst,
  rconst,
  simtri,
  simtrir,
  contri,
  contrir,
  sameclock,
};

inline constexpr std::size_t kPredicateCount = 15;
inline constexpr std::size_t kMaxArity = 8;

std::string_view predicate_name(Predicate p);
std::optional<Predicate> predicate_from_name(std::string_view name);
// Number of point arguments (the literal of aconst/rconst is not counted).
std::size_t arity(Predicate p);
inline bool has_literal(Predicate p) { return p == Predicate::aconst || p == Predicate::rconst; }
inline bool is_triangle_pred(Predicate p) {
  return p == Predicate::simtri || p == Predicate::simtrir || p == Predicate::contri ||
         p == Predicate::contrir;
}

// How an argument permutation acts on the literal of aconst/rconst.
enum class LiteralOp : std::uint8_t { keep, negate_angle, invert_ratio };

struct Symmetry {
  std::array<std::uint8_t, kMaxArity> perm{};  // variant[i] = original[perm[i]]
  LiteralOp op = LiteralOp::keep;
};

// The symmetry group of a predicate's argument list (includes identity first).
const std::vector<Symmetry>& symmetries(Predicate p);

// aconst literals are degrees mod 180; rconst literals are positive ratios.
Rational apply_literal_op(LiteralOp op, Rational lit);

// A predicate instance over named points.
struct Statement {
  Predicate pred = Predicate::coll;
  std::vector<std::string> args;
  Rational literal{};  // meaningful only for aconst / rconst

  friend bool operator==(const Statement&, const Statement&) = default;
  friend bool operator<(const Statement& a, const Statement& b) {
    if (a.pred != b.pred) return a.pred < b.pred;
    if (a.args != b.args) return a.args < b.args;
    return a.literal < b.literal;
  }

  // "pred a b c" with the literal appended when present.
  std::string str() const;
};

// All distinct argument orderings denoting the same statement.
template <class T>
std::vector<std::pair<std::vector<T>, Rational>> statement_variants(Predicate p,
                                                                    std::span<const T> args,
                                                                    Rational lit) {
  std::vector<std::pair<std::vector<T>, Rational>> out;
  const auto& syms = symmetries(p);
  out.reserve(syms.size());
  for (const auto& s : syms) {
    std::vector<T> v(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) v[i] = args[s.perm[i]];
    std::pair<std::vector<T>, Rational> cand{std::move(v), apply_literal_op(s.op, lit)};
    if (std::find(out.begin(), out.end(), cand) == out.end()) out.push_back(std::move(cand));
  }
  return out;
}

// Lexicographically least variant of the argument list.
template <class T>
std::pair<std::vector<T>, Rational> canonical_args(Predicate p, std::span<const T> args,
                                                   Rational lit) {
  std::pair<std::vector<T>, Rational> best{std::vector<T>(args.begin(), args.end()), lit};
  std::vector<T> v(args.size());
  for (const auto& s : symmetries(p)) {
    for (std::size_t i = 0; i < args.size(); ++i) v[i] = args[s.perm[i]];
    Rational l = apply_literal_op(s.op, lit);
    if (v < best.first || (v == best.first && l < best.second)) {
      best.first = v;
      best.second = l;
    }
  }
  return best;
}

Statement canonicalize(const Statement& s);

}  // namespace geodd
