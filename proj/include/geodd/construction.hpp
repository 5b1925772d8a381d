#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "geodd/statement.hpp"

namespace geodd {

enum class Category { BASIC, BASIC_FREE, INTERSECT, OTHERS };

std::string_view category_name(Category c);

// Prerequisite over argument points: a statement template that must hold, or
// (negated) must not hold. `diff a b` is the distinct-points test.
struct Prerequisite {
  bool negated = false;
  bool distinct = false;  // `diff a b`
  Statement tmpl;
};

struct ConstructionDef {
  std::string name;
  Category category = Category::OTHERS;
  std::vector<std::string> outs;  // formal output names
  std::vector<std::string> ins;   // formal argument names
  std::vector<Prerequisite> prerequisites;
  std::vector<Statement> added;  // templates over outs + ins
  std::string recipe;            // sketch recipe id

  std::size_t out_arity() const { return outs.size(); }
  std::size_t in_arity() const { return ins.size(); }
};

// One applied construction, e.g. `x = orthocenter x a b c`.
struct Construction {
  std::string name;
  std::vector<std::string> outs;
  std::vector<std::string> args;
  Category category = Category::OTHERS;
  std::size_t line = 0;  // constructions on one script line share a step

  friend bool operator==(const Construction&, const Construction&) = default;
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<ConstructionDef> defs);

  const ConstructionDef* find(std::string_view name) const;
  const std::vector<ConstructionDef>& defs() const { return defs_; }
  std::vector<const ConstructionDef*> of_category(Category c) const;

  // Instantiates a def's added predicates for a concrete construction.
  std::vector<Statement> added_statements(const Construction& c) const;
  std::vector<Prerequisite> prerequisites(const Construction& c) const;

 private:
  std::vector<ConstructionDef> defs_;
};

// Definitions file: one def per line,
//   name outs... : ins... | CATEGORY | prereq , ... => added , ... | recipe
Catalog parse_catalog(std::string_view text);
const Catalog& default_catalog();

// Script lines `outs... = name outs... args... [, name outs... args...]`.
std::vector<Construction> parse_construction_script(std::string_view text,
                                                    const Catalog& catalog);
std::string serialize_construction_line(const std::vector<Construction>& step);

}  // namespace geodd
