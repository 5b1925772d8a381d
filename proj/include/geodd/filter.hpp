#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "geodd/engine.hpp"

namespace geodd {

enum class FilterReason {
  Keep,
  TrivialSelf,
  ReducibleToPara,
  ReducibleToCong,
  ReducibleToPerp,
  ReducibleToColl,
  ReducibleToSimilarity,
  SameclockExcluded,
  EquivalentDuplicate,
};

std::string_view filter_reason_name(FilterReason r);

struct FilterVerdict {
  FilterReason reason = FilterReason::Keep;
  bool keep() const { return reason == FilterReason::Keep; }
};

// `similar` holds the simtri/simtrir/contri/contrir facts known for the figure.
FilterVerdict judge(const Atom& t, const NumericTable& num, std::span<const Atom> similar);
// Uses the engine's stored triangle facts.
FilterVerdict judge(const Atom& t, const Engine& eng);

// One representative (least canonical form) per class of eqangle statements
// with pairwise parallel lines and eqratio statements with pairwise congruent
// segments. Other predicates pass through. Output is sorted.
std::vector<Atom> dedupe(std::vector<Atom> kept, const NumericTable& num);

// Angle equalities that a triangle fact implies directly.
std::vector<Atom> induced_angles(const Atom& tri);

}  // namespace geodd
