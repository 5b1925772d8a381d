#include "geodd/formal_lang.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace geodd {

namespace {

struct Token {
  std::string text;
  std::size_t offset = 0;
};

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool is_ident(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

bool is_number_like(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
}

// Splits text into identifiers, numbers, bracketed ids and the punctuation
// tokens ; , : ? => . Offsets are absolute (base + position).
std::vector<Token> tokenize(std::string_view text, std::size_t base) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (c == ';' || c == ',' || c == ':' || c == '?') {
      out.push_back({std::string(1, c), base + i});
      ++i;
    } else if (c == '=' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({"=>", base + i});
      i += 2;
    } else if (c == '[') {
      std::size_t j = text.find(']', i);
      if (j == std::string_view::npos)
        throw Error(ErrorCode::Syntax, "unterminated fact id", std::string(text.substr(i)),
                    base + i);
      out.push_back({std::string(text.substr(i, j - i + 1)), base + i});
      i = j + 1;
    } else {
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
             text[i] != ';' && text[i] != ',' && text[i] != ':' && text[i] != '?' &&
             text[i] != '[')
        ++i;
      if (i == start) {
        throw Error(ErrorCode::Syntax, "unexpected character", std::string(1, c), base + i);
      }
      out.push_back({std::string(text.substr(start, i - start)), base + start});
    }
  }
  return out;
}

class Cursor {
 public:
  Cursor(std::vector<Token> toks, std::size_t end_offset)
      : toks_(std::move(toks)), end_offset_(end_offset) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead >= toks_.size() ? nullptr : &toks_[pos_ + ahead];
  }
  bool peek_is(std::string_view s) const { return !done() && toks_[pos_].text == s; }
  Token next() {
    if (done()) throw Error(ErrorCode::Syntax, "unexpected end of input", "", end_offset_);
    return toks_[pos_++];
  }
  void expect(std::string_view s) {
    Token t = next();
    if (t.text != s)
      throw Error(ErrorCode::Syntax, "expected '" + std::string(s) + "'", t.text, t.offset);
  }
  std::size_t end_offset() const { return end_offset_; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t end_offset_;
};

bool is_delim(const Token* t) {
  if (!t) return true;
  const auto& s = t->text;
  return s == ";" || s == "," || s == ":" || s == "?" || s == "=>" || (!s.empty() && s[0] == '[');
}

std::optional<FactId> parse_id_token(const Token& t) {
  const auto& s = t.text;
  if (s.size() < 3 || s.front() != '[' || s.back() != ']') return std::nullopt;
  FactId v = 0;
  auto body = std::string_view(s).substr(1, s.size() - 2);
  auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
  if (ec != std::errc() || p != body.data() + body.size() || v < 0)
    throw Error(ErrorCode::Syntax, "bad fact id", s, t.offset);
  return v;
}

// Reads `pred arg... [literal]`. Argument tokens must be identifiers that are
// not predicate names.
Statement parse_statement(Cursor& c, std::vector<std::size_t>* offsets = nullptr) {
  Token head = c.next();
  auto pred = predicate_from_name(head.text);
  if (!pred) {
    if (is_ident(head.text))
      throw Error(ErrorCode::UnknownPredicate, "", head.text, head.offset);
    throw Error(ErrorCode::Syntax, "expected a predicate", head.text, head.offset);
  }
  Statement s;
  s.pred = *pred;
  const std::size_t n = arity(*pred);
  for (std::size_t k = 0; k < n; ++k) {
    const Token* t = c.peek();
    if (is_delim(t) || predicate_from_name(t->text) || !is_ident(t->text)) {
      throw Error(ErrorCode::ArityMismatch,
                  std::string(predicate_name(*pred)) + " takes " + std::to_string(n) +
                      " points, got " + std::to_string(k),
                  head.text, head.offset);
    }
    if (offsets) offsets->push_back(t->offset);
    s.args.push_back(c.next().text);
  }
  if (has_literal(*pred)) {
    const Token* t = c.peek();
    if (!t || !is_number_like(t->text))
      throw Error(ErrorCode::BadLiteral, "missing literal", t ? t->text : "",
                  t ? t->offset : c.end_offset());
    Token lt = c.next();
    try {
      Rational r = Rational::parse(lt.text);
      if (*pred == Predicate::aconst) r = r.mod(Rational(180));
      if (*pred == Predicate::rconst && r <= Rational(0))
        throw Error(ErrorCode::BadLiteral, "ratio must be positive", lt.text, lt.offset);
      s.literal = r;
    } catch (const std::invalid_argument&) {
      throw Error(ErrorCode::BadLiteral, "", lt.text, lt.offset);
    }
  }
  const Token* t = c.peek();
  if (t && !is_delim(t) && !predicate_from_name(t->text) && is_ident(t->text)) {
    throw Error(ErrorCode::ArityMismatch,
                std::string(predicate_name(*pred)) + " takes " + std::to_string(n) + " points",
                t->text, t->offset);
  }
  return s;
}

std::optional<FactId> maybe_id(Cursor& c) {
  const Token* t = c.peek();
  if (t && !t->text.empty() && t->text[0] == '[') return parse_id_token(c.next());
  return std::nullopt;
}

void check_declared(const Statement& s, const std::unordered_set<std::string>& known,
                    const std::vector<std::size_t>& offsets) {
  for (std::size_t i = 0; i < s.args.size(); ++i)
    if (!known.count(s.args[i]))
      throw Error(ErrorCode::UndeclaredPoint, "", s.args[i], offsets[i]);
}

bool is_label(std::string_view s) {
  return s.size() >= 2 && s[0] == 'x' &&
         std::all_of(s.begin() + 1, s.end(), [](char ch) { return std::isdigit((unsigned char)ch); });
}

// Parses clauses until '?' or end. Each clause: [label] names ':' statements.
std::vector<PremiseClause> parse_clauses(Cursor& c, std::unordered_set<std::string>& known,
                                         bool allow_labels) {
  std::vector<PremiseClause> clauses;
  while (!c.done() && !c.peek_is("?")) {
    if (c.peek_is(";")) {
      c.next();
      continue;
    }
    PremiseClause clause;
    Token first = *c.peek();
    if (allow_labels && is_label(first.text) && c.peek(1) && c.peek(1)->text != ":") {
      clause.label = c.next().text;
    }
    std::vector<Token> name_toks;
    while (!c.done() && !c.peek_is(":")) {
      Token t = c.next();
      if (!is_ident(t.text) || predicate_from_name(t.text))
        throw Error(ErrorCode::Syntax, "expected a point name", t.text, t.offset);
      name_toks.push_back(t);
    }
    c.expect(":");
    if (name_toks.empty())
      throw Error(ErrorCode::Syntax, "clause declares no points", first.text, first.offset);
    for (const auto& t : name_toks) {
      if (known.count(t.text) ||
          std::count(clause.points.begin(), clause.points.end(), t.text))
        throw Error(ErrorCode::DuplicatePoint, "", t.text, t.offset);
      clause.points.push_back(t.text);
    }
    for (const auto& p : clause.points) known.insert(p);
    while (!c.done() && !c.peek_is(";") && !c.peek_is("?")) {
      if (c.peek_is(",")) {
        c.next();
        continue;
      }
      std::vector<std::size_t> at;
      Statement s = parse_statement(c, &at);
      check_declared(s, known, at);
      clause.statements.push_back({std::move(s), maybe_id(c)});
    }
    clauses.push_back(std::move(clause));
  }
  return clauses;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Locates `<tag>...</tag>` and returns the body and its absolute offset.
struct Section {
  std::string_view body;
  std::size_t offset = 0;
  std::size_t end = 0;  // one past the closing tag
};

std::optional<Section> find_section(std::string_view text, std::string_view tag,
                                    std::size_t from = 0) {
  std::string open = "<" + std::string(tag) + ">";
  std::string close = "</" + std::string(tag) + ">";
  auto a = text.find(open, from);
  if (a == std::string_view::npos) return std::nullopt;
  auto b = text.find(close, a + open.size());
  if (b == std::string_view::npos)
    throw Error(ErrorCode::Syntax, "missing closing tag", close, a);
  return Section{text.substr(a + open.size(), b - a - open.size()), a + open.size(),
                 b + close.size()};
}

Problem parse_problem_at(std::string_view text, std::size_t base) {
  Cursor c(tokenize(text, base), base + text.size());
  std::unordered_set<std::string> known;
  Problem p;
  p.clauses = parse_clauses(c, known, false);
  if (!c.peek_is("?")) throw Error(ErrorCode::Syntax, "missing goal '?'", "", c.end_offset());
  Token q = c.next();
  if (c.done()) throw Error(ErrorCode::Syntax, "missing goal statement", "?", q.offset);
  std::vector<std::size_t> at;
  p.goal = parse_statement(c, &at);
  check_declared(p.goal, known, at);
  if (!c.done()) {
    Token t = c.next();
    throw Error(ErrorCode::Syntax, "trailing input after goal", t.text, t.offset);
  }
  return p;
}

}  // namespace

std::vector<std::string> Problem::points() const {
  std::vector<std::string> out;
  for (const auto& c : clauses) out.insert(out.end(), c.points.begin(), c.points.end());
  return out;
}

std::vector<std::string> Rule::variables() const {
  std::vector<std::string> out;
  auto add = [&](const std::vector<Statement>& v) {
    for (const auto& s : v)
      for (const auto& a : s.args)
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  };
  add(premises);
  add(numeric_guards);
  add(conclusions);
  return out;
}

Problem parse_problem(std::string_view text) {
  if (auto sec = find_section(text, "problem")) return parse_problem_at(sec->body, sec->offset);
  return parse_problem_at(text, 0);
}

PremiseClause parse_clause(std::string_view text, const std::vector<std::string>& known_pts) {
  Cursor c(tokenize(text, 0), text.size());
  std::unordered_set<std::string> known(known_pts.begin(), known_pts.end());
  auto clauses = parse_clauses(c, known, true);
  if (!c.done()) {
    Token t = c.next();
    throw Error(ErrorCode::Syntax, "unexpected token", t.text, t.offset);
  }
  if (clauses.size() != 1)
    throw Error(ErrorCode::Syntax, "expected exactly one clause", "", 0);
  return clauses.front();
}

std::vector<Rule> parse_rules(std::string_view text) {
  std::vector<Rule> rules;
  std::unordered_set<std::string> names;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    std::size_t base = line_start;
    line_start = line_end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (strip(line).empty()) {
      if (line_end == text.size()) break;
      continue;
    }
    Cursor c(tokenize(line, base), base + line.size());
    Token name = c.next();
    if (!is_ident(name.text))
      throw Error(ErrorCode::Syntax, "expected a rule name", name.text, name.offset);
    if (!names.insert(name.text).second)
      throw Error(ErrorCode::DuplicateRuleName, "", name.text, name.offset);
    c.expect(":");
    Rule r;
    r.name = name.text;
    auto read_templates = [&](std::vector<Statement>& out, bool stop_at_arrow) {
      while (!c.done() && !(stop_at_arrow && c.peek_is("=>"))) {
        if (c.peek_is(",")) {
          c.next();
          continue;
        }
        Token at = *c.peek();
        Statement s = parse_statement(c);
        for (const auto& a : s.args)
          if (!std::isupper(static_cast<unsigned char>(a[0])))
            throw Error(ErrorCode::Syntax, "rule arguments must be uppercase variables", a,
                        at.offset);
        out.push_back(std::move(s));
      }
    };
    std::vector<Statement> premises;
    read_templates(premises, true);
    c.expect("=>");
    read_templates(r.conclusions, false);
    for (auto& p : premises)
      (p.pred == Predicate::sameclock ? r.numeric_guards : r.premises).push_back(std::move(p));
    if (r.premises.empty())
      throw Error(ErrorCode::Syntax, "rule needs at least one premise", name.text, name.offset);
    if (r.conclusions.empty())
      throw Error(ErrorCode::Syntax, "rule needs at least one conclusion", name.text, name.offset);
    std::unordered_set<std::string> bound;
    for (const auto& p : r.premises) bound.insert(p.args.begin(), p.args.end());
    for (const auto* group : {&r.numeric_guards, &r.conclusions})
      for (const auto& s : *group)
        for (const auto& a : s.args)
          if (!bound.count(a))
            throw Error(ErrorCode::UnboundConclusionVariable, "in rule " + r.name, a,
                        name.offset);
    rules.push_back(std::move(r));
    if (line_end == text.size()) break;
  }
  return rules;
}

Record parse_record(std::string_view text) {
  if (strip(text).empty()) throw Error(ErrorCode::Syntax, "empty record", "", 0);
  Record r;
  auto prob = find_section(text, "problem");
  if (!prob) throw Error(ErrorCode::Syntax, "missing <problem> section", "", 0);
  r.problem = parse_problem_at(prob->body, prob->offset);

  std::unordered_set<std::string> known;
  for (const auto& p : r.problem.points()) known.insert(p);

  if (auto aux = find_section(text, "aux", prob->end)) {
    Cursor c(tokenize(aux->body, aux->offset), aux->offset + aux->body.size());
    r.aux = parse_clauses(c, known, true);
    if (!c.done()) {
      Token t = c.next();
      throw Error(ErrorCode::Syntax, "unexpected token in <aux>", t.text, t.offset);
    }
  }
  if (auto nc = find_section(text, "numerical_check", prob->end)) {
    Cursor c(tokenize(nc->body, nc->offset), nc->offset + nc->body.size());
    while (!c.done()) {
      if (c.peek_is(";")) {
        c.next();
        continue;
      }
      std::vector<std::size_t> at;
      Statement s = parse_statement(c, &at);
      check_declared(s, known, at);
      r.numerical_checks.push_back({std::move(s), maybe_id(c)});
    }
  }
  if (auto pf = find_section(text, "proof", prob->end)) {
    Cursor c(tokenize(pf->body, pf->offset), pf->offset + pf->body.size());
    while (!c.done()) {
      if (c.peek_is(";")) {
        c.next();
        continue;
      }
      Token at = *c.peek();
      ProofStep step;
      std::vector<std::size_t> arg_at;
      step.conclusion = parse_statement(c, &arg_at);
      check_declared(step.conclusion, known, arg_at);
      auto id = maybe_id(c);
      if (!id) throw Error(ErrorCode::Syntax, "proof step without id", at.text, at.offset);
      step.id = *id;
      Token rule = c.next();
      if (!is_ident(rule.text))
        throw Error(ErrorCode::Syntax, "expected a rule name", rule.text, rule.offset);
      step.rule = rule.text;
      while (auto dep = maybe_id(c)) step.deps.push_back(*dep);
      r.proof.push_back(std::move(step));
    }
  }
  return r;
}

std::vector<Record> parse_record_stream(std::string_view text) {
  std::vector<Record> out;
  std::size_t pos = 0;
  while (true) {
    auto a = text.find("<problem>", pos);
    if (a == std::string_view::npos) break;
    auto b = text.find("<problem>", a + 1);
    std::string_view chunk = text.substr(a, b == std::string_view::npos ? text.size() - a : b - a);
    try {
      out.push_back(parse_record(chunk));
    } catch (const Error& e) {
      std::size_t off = e.offset() == Error::npos ? Error::npos : e.offset() + a;
      throw Error(e.code(), "in record " + std::to_string(out.size()), e.token(), off);
    }
    if (b == std::string_view::npos) break;
    pos = b;
  }
  return out;
}

std::string format_id(FactId id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "[%03d]", id);
  return buf;
}

std::string serialize_clause(const PremiseClause& c) {
  std::string out;
  if (!c.label.empty()) out += c.label + " ";
  for (const auto& p : c.points) out += p + " ";
  out += ":";
  for (const auto& s : c.statements) {
    out += " " + s.stmt.str();
    if (s.id) out += " " + format_id(*s.id);
  }
  return out;
}

std::string serialize_problem(const Problem& p) {
  std::string out = "<problem>\n";
  for (std::size_t i = 0; i < p.clauses.size(); ++i) {
    out += serialize_clause(p.clauses[i]);
    out += i + 1 < p.clauses.size() ? " ;\n" : "\n";
  }
  out += "? " + p.goal.str() + "\n</problem>\n";
  return out;
}

std::optional<FactId> find_dangling_dependency(const Record& r) {
  std::unordered_set<FactId> defined;
  for (const auto& c : r.problem.clauses)
    for (const auto& s : c.statements)
      if (s.id) defined.insert(*s.id);
  for (const auto& c : r.aux)
    for (const auto& s : c.statements)
      if (s.id) defined.insert(*s.id);
  for (const auto& s : r.numerical_checks)
    if (s.id) defined.insert(*s.id);
  for (const auto& step : r.proof) {
    for (FactId d : step.deps)
      if (!defined.count(d)) return d;
    defined.insert(step.id);
  }
  return std::nullopt;
}

std::string serialize_record(const Record& r) {
  if (auto bad = find_dangling_dependency(r))
    throw Error(ErrorCode::DanglingDependency, "", std::to_string(*bad));
  std::string out = serialize_problem(r.problem);
  out += "<aux>\n";
  for (const auto& c : r.aux) out += serialize_clause(c) + " ;\n";
  out += "</aux>\n<numerical_check>\n";
  for (const auto& s : r.numerical_checks) {
    out += s.stmt.str();
    if (s.id) out += " " + format_id(*s.id);
    out += " ;\n";
  }
  out += "</numerical_check>\n<proof>\n";
  for (const auto& step : r.proof) {
    out += step.conclusion.str() + " " + format_id(step.id) + " " + step.rule;
    for (FactId d : step.deps) out += " " + format_id(d);
    out += " ;\n";
  }
  out += "</proof>\n";
  return out;
}

std::string manifest_line(const RecordMeta& m) {
  nlohmann::json j = {{"path", m.path},
                      {"index", m.index},
                      {"goal", m.goal_predicate},
                      {"points", m.points},
                      {"aux", m.aux_clauses},
                      {"proof_len", m.proof_length},
                      {"millis", m.millis}};
  return j.dump();
}

RecordMeta parse_manifest_line(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    RecordMeta m;
    m.path = j.at("path").get<std::string>();
    m.index = j.at("index").get<std::size_t>();
    m.goal_predicate = j.at("goal").get<std::string>();
    m.points = j.at("points").get<std::size_t>();
    m.aux_clauses = j.at("aux").get<std::size_t>();
    m.proof_length = j.at("proof_len").get<std::size_t>();
    m.millis = j.at("millis").get<long long>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Syntax, e.what(), std::string(line.substr(0, 40)), 0);
  }
}

}  // namespace geodd
