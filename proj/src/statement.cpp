#include "geodd/statement.hpp"

#include <numeric>
#include <set>

namespace geodd {

namespace {

constexpr std::array<std::string_view, kPredicateCount> kNames = {
    "coll",    "para",    "perp",   "cong",   "midp",    "cyclic",  "eqangle",  "eqratio",
    "aconst",  "rconst",  "simtri", "simtrir", "contri", "contrir", "sameclock",
};

constexpr std::array<std::size_t, kPredicateCount> kArity = {3, 4, 4, 4, 3, 4, 8, 8,
                                                            4, 4, 6, 6, 6, 6, 6};

using Perm = std::vector<std::uint8_t>;

Symmetry make(const Perm& p, LiteralOp op = LiteralOp::keep) {
  Symmetry s;
  for (std::size_t i = 0; i < p.size(); ++i) s.perm[i] = p[i];
  s.op = op;
  return s;
}

std::vector<Perm> all_perms(std::size_t n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Perm> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Compose: result[i] = base[inner[i]].
Perm compose(const Perm& base, const Perm& inner) {
  Perm r(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) r[i] = base[inner[i]];
  return r;
}

std::vector<Symmetry> two_pairs(bool literal_flips, LiteralOp flip_op) {
  std::vector<Symmetry> out;
  for (int pair_swap = 0; pair_swap < 2; ++pair_swap)
    for (int s0 = 0; s0 < 2; ++s0)
      for (int s1 = 0; s1 < 2; ++s1) {
        Perm first = s0 ? Perm{1, 0} : Perm{0, 1};
        Perm second = s1 ? Perm{3, 2} : Perm{2, 3};
        Perm p = pair_swap ? Perm{second[0], second[1], first[0], first[1]}
                           : Perm{first[0], first[1], second[0], second[1]};
        out.push_back(make(p, pair_swap && literal_flips ? flip_op : LiteralOp::keep));
      }
  return out;
}

std::vector<Symmetry> four_pairs() {
  // Pair-level group: identity, swap the two sides, reverse both sides, both.
  const std::vector<std::array<int, 4>> pair_level = {
      {0, 1, 2, 3}, {2, 3, 0, 1}, {1, 0, 3, 2}, {3, 2, 1, 0}};
  std::vector<Symmetry> out;
  for (const auto& pl : pair_level)
    for (int mask = 0; mask < 16; ++mask) {
      Perm p(8);
      for (int k = 0; k < 4; ++k) {
        int src = pl[k];
        bool flip = (mask >> k) & 1;
        p[2 * k] = static_cast<std::uint8_t>(2 * src + (flip ? 1 : 0));
        p[2 * k + 1] = static_cast<std::uint8_t>(2 * src + (flip ? 0 : 1));
      }
      out.push_back(make(p));
    }
  return out;
}

std::vector<Symmetry> triangle_pairs() {
  std::vector<Symmetry> out;
  for (const auto& s : all_perms(3)) {
    Perm p{s[0], s[1], s[2], static_cast<std::uint8_t>(3 + s[0]),
           static_cast<std::uint8_t>(3 + s[1]), static_cast<std::uint8_t>(3 + s[2])};
    out.push_back(make(p));
    out.push_back(make(compose(p, Perm{3, 4, 5, 0, 1, 2})));
  }
  return out;
}

std::vector<Symmetry> sameclock_group() {
  const std::vector<Perm> rot = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  std::vector<Symmetry> out;
  for (int rev = 0; rev < 2; ++rev)
    for (const auto& r1 : rot)
      for (const auto& r2 : rot)
        for (int swap = 0; swap < 2; ++swap) {
          Perm t1 = rev ? compose(r1, Perm{0, 2, 1}) : r1;
          Perm t2 = rev ? compose(r2, Perm{0, 2, 1}) : r2;
          Perm p{t1[0], t1[1], t1[2], static_cast<std::uint8_t>(3 + t2[0]),
                 static_cast<std::uint8_t>(3 + t2[1]), static_cast<std::uint8_t>(3 + t2[2])};
          if (swap) p = compose(p, Perm{3, 4, 5, 0, 1, 2});
          out.push_back(make(p));
        }
  return out;
}

std::vector<Symmetry> build(Predicate p) {
  std::vector<Symmetry> out;
  switch (p) {
    case Predicate::coll:
      for (const auto& q : all_perms(3)) out.push_back(make(q));
      break;
    case Predicate::para:
    case Predicate::perp:
    case Predicate::cong:
      out = two_pairs(false, LiteralOp::keep);
      break;
    case Predicate::aconst:
      out = two_pairs(true, LiteralOp::negate_angle);
      break;
    case Predicate::rconst:
      out = two_pairs(true, LiteralOp::invert_ratio);
      break;
    case Predicate::midp:
      out = {make({0, 1, 2}), make({0, 2, 1})};
      break;
    case Predicate::cyclic:
      for (const auto& q : all_perms(4)) out.push_back(make(q));
      break;
    case Predicate::eqangle:
    case Predicate::eqratio:
      out = four_pairs();
      break;
    case Predicate::simtri:
    case Predicate::simtrir:
    case Predicate::contri:
    case Predicate::contrir:
      out = triangle_pairs();
      break;
    case Predicate::sameclock:
      out = sameclock_group();
      break;
  }
  // Identity first, duplicates removed.
  std::vector<Symmetry> uniq;
  std::set<std::pair<std::array<std::uint8_t, kMaxArity>, LiteralOp>> seen;
  for (const auto& s : out)
    if (seen.insert({s.perm, s.op}).second) uniq.push_back(s);
  return uniq;
}

}  // namespace

std::string_view predicate_name(Predicate p) { return kNames[static_cast<std::size_t>(p)]; }

std::optional<Predicate> predicate_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<Predicate>(i);
  return std::nullopt;
}

std::size_t arity(Predicate p) { return kArity[static_cast<std::size_t>(p)]; }

const std::vector<Symmetry>& symmetries(Predicate p) {
  static const auto table = [] {
    std::array<std::vector<Symmetry>, kPredicateCount> t;
    for (std::size_t i = 0; i < kPredicateCount; ++i) t[i] = build(static_cast<Predicate>(i));
    return t;
  }();
  return table[static_cast<std::size_t>(p)];
}

Rational apply_literal_op(LiteralOp op, Rational lit) {
  switch (op) {
    case LiteralOp::keep:
      return lit;
    case LiteralOp::negate_angle:
      return (-lit).mod(Rational(180));
    case LiteralOp::invert_ratio:
      return lit.is_zero() ? lit : Rational(1) / lit;
  }
  return lit;
}

std::string Statement::str() const {
  std::string out(predicate_name(pred));
  for (const auto& a : args) {
    out += ' ';
    out += a;
  }
  if (has_literal(pred)) {
    out += ' ';
    out += literal.str();
  }
  return out;
}

Statement canonicalize(const Statement& s) {
  auto [args, lit] = canonical_args<std::string>(s.pred, s.args, s.literal);
  return Statement{s.pred, std::move(args), lit};
}

}  // namespace geodd
