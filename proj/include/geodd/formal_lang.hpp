#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geodd/error.hpp"
#include "geodd/statement.hpp"

namespace geodd {

using FactId = int;

struct NumberedStatement {
  Statement stmt;
  std::optional<FactId> id;

  friend bool operator==(const NumberedStatement&, const NumberedStatement&) = default;
};

// One `name... : stmt [id] stmt [id]` clause. Aux clauses carry a label such
// as "x00"; problem clauses leave it empty.
struct PremiseClause {
  std::string label;
  std::vector<std::string> points;
  std::vector<NumberedStatement> statements;

  friend bool operator==(const PremiseClause&, const PremiseClause&) = default;
};

struct Problem {
  std::vector<PremiseClause> clauses;
  Statement goal;

  friend bool operator==(const Problem&, const Problem&) = default;
  std::vector<std::string> points() const;
};

struct ProofStep {
  Statement conclusion;
  FactId id = 0;
  std::string rule;
  std::vector<FactId> deps;

  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct Record {
  Problem problem;
  std::vector<PremiseClause> aux;
  std::vector<NumberedStatement> numerical_checks;
  std::vector<ProofStep> proof;

  friend bool operator==(const Record&, const Record&) = default;
};

// Horn rule over statement templates whose arguments are variable names.
// sameclock premises are kept apart as numeric guards.
struct Rule {
  std::string name;
  std::vector<Statement> premises;
  std::vector<Statement> numeric_guards;
  std::vector<Statement> conclusions;

  std::vector<std::string> variables() const;  // first-occurrence order
};

Problem parse_problem(std::string_view text);
std::vector<Rule> parse_rules(std::string_view text);

// Parses one tagged-section record.
Record parse_record(std::string_view text);
// Parses a stream of records separated by blank lines.
std::vector<Record> parse_record_stream(std::string_view text);

// Parses a single premise clause such as "h : coll a d h , perp a d h e".
// `known` lists points declared before the clause.
PremiseClause parse_clause(std::string_view text, const std::vector<std::string>& known);

std::string serialize_problem(const Problem& p);
std::string serialize_clause(const PremiseClause& c);
std::string serialize_record(const Record& r);
std::string format_id(FactId id);

// Returns the first dependency id that is not defined before its use, if any.
std::optional<FactId> find_dangling_dependency(const Record& r);

// Descriptor for one record in a dataset shard; one JSON object per line.
struct RecordMeta {
  std::string path;
  std::size_t index = 0;  // position of the record inside the shard
  std::string goal_predicate;
  std::size_t points = 0;
  std::size_t aux_clauses = 0;
  std::size_t proof_length = 0;
  long long millis = 0;

  friend bool operator==(const RecordMeta&, const RecordMeta&) = default;
};

std::string manifest_line(const RecordMeta& m);
RecordMeta parse_manifest_line(std::string_view line);

}  // namespace geodd
