#include "geodd/construction.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "geodd/error.hpp"
#include "geodd_data.hpp"

namespace geodd {

namespace {

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Statement parse_template(const std::vector<std::string>& w, const std::string& line) {
  auto pred = predicate_from_name(w[0]);
  if (!pred) throw Error(ErrorCode::UnknownPredicate, line, w[0]);
  Statement s{*pred, {}, {}};
  std::size_t n = arity(*pred);
  std::size_t want = n + (has_literal(*pred) ? 1 : 0);
  if (w.size() - 1 != want) throw Error(ErrorCode::ArityMismatch, line, w[0]);
  s.args.assign(w.begin() + 1, w.begin() + 1 + static_cast<std::ptrdiff_t>(n));
  if (has_literal(*pred)) {
    try {
      s.literal = Rational::parse(w.back());
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadLiteral, line, w.back());
    }
  }
  return s;
}

Prerequisite parse_prereq(const std::vector<std::string>& w, const std::string& line) {
  Prerequisite p;
  if (w[0] == "diff") {
    if (w.size() != 3) throw Error(ErrorCode::ArityMismatch, line, "diff");
    p.distinct = true;
    p.tmpl.args = {w[1], w[2]};
    return p;
  }
  std::vector<std::string> v = w;
  if (!predicate_from_name(v[0]) && v[0].size() > 1 && v[0][0] == 'n') {
    p.negated = true;
    v[0] = v[0].substr(1);
  }
  p.tmpl = parse_template(v, line);
  return p;
}

Category parse_category(std::string_view s, const std::string& line) {
  for (Category c : {Category::BASIC, Category::BASIC_FREE, Category::INTERSECT, Category::OTHERS})
    if (category_name(c) == s) return c;
  throw Error(ErrorCode::Syntax, "unknown category in " + line, std::string(s));
}

std::vector<std::string> substitute(const std::vector<std::string>& args,
                                    const std::map<std::string, std::string>& m) {
  std::vector<std::string> out;
  out.reserve(args.size());
  for (const auto& a : args) {
    auto it = m.find(a);
    out.push_back(it == m.end() ? a : it->second);
  }
  return out;
}

std::map<std::string, std::string> binding(const ConstructionDef& d, const Construction& c) {
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < d.outs.size() && i < c.outs.size(); ++i) m[d.outs[i]] = c.outs[i];
  for (std::size_t i = 0; i < d.ins.size() && i < c.args.size(); ++i) m[d.ins[i]] = c.args[i];
  return m;
}

}  // namespace

std::string_view category_name(Category c) {
  switch (c) {
    case Category::BASIC: return "BASIC";
    case Category::BASIC_FREE: return "BASIC_FREE";
    case Category::INTERSECT: return "INTERSECT";
    case Category::OTHERS: return "OTHERS";
  }
  return "?";
}

Catalog::Catalog(std::vector<ConstructionDef> defs) : defs_(std::move(defs)) {}

const ConstructionDef* Catalog::find(std::string_view name) const {
  for (const auto& d : defs_)
    if (d.name == name) return &d;
  return nullptr;
}

std::vector<const ConstructionDef*> Catalog::of_category(Category c) const {
  std::vector<const ConstructionDef*> out;
  for (const auto& d : defs_)
    if (d.category == c) out.push_back(&d);
  return out;
}

std::vector<Statement> Catalog::added_statements(const Construction& c) const {
  const ConstructionDef* d = find(c.name);
  if (!d) throw Error(ErrorCode::UnknownConstruction, "", c.name);
  auto m = binding(*d, c);
  std::vector<Statement> out;
  for (const auto& t : d->added) out.push_back({t.pred, substitute(t.args, m), t.literal});
  return out;
}

std::vector<Prerequisite> Catalog::prerequisites(const Construction& c) const {
  const ConstructionDef* d = find(c.name);
  if (!d) throw Error(ErrorCode::UnknownConstruction, "", c.name);
  auto m = binding(*d, c);
  std::vector<Prerequisite> out;
  for (auto p : d->prerequisites) {
    p.tmpl.args = substitute(p.tmpl.args, m);
    out.push_back(std::move(p));
  }
  return out;
}

Catalog parse_catalog(std::string_view text) {
  std::vector<ConstructionDef> defs;
  for (auto raw : split(text, '\n')) {
    std::string line(raw.substr(0, raw.find('#')));
    if (words(line).empty()) continue;
    auto fields = split(line, '|');
    if (fields.size() != 4) throw Error(ErrorCode::Syntax, "expected 4 fields: " + line);
    ConstructionDef d;
    auto head = split(fields[0], ':');
    if (head.size() != 2) throw Error(ErrorCode::Syntax, "missing ':' in " + line);
    auto hw = words(head[0]);
    if (hw.size() < 2) throw Error(ErrorCode::Syntax, "missing outputs in " + line);
    d.name = hw[0];
    d.outs.assign(hw.begin() + 1, hw.end());
    d.ins = words(head[1]);
    auto cat = words(fields[1]);
    if (cat.size() != 1) throw Error(ErrorCode::Syntax, "bad category in " + line);
    d.category = parse_category(cat[0], line);

    std::string_view body = fields[2];
    auto arrow = body.find("=>");
    if (arrow == std::string_view::npos) throw Error(ErrorCode::Syntax, "missing '=>' in " + line);
    for (auto part : split(body.substr(0, arrow), ',')) {
      auto w = words(part);
      if (!w.empty()) d.prerequisites.push_back(parse_prereq(w, line));
    }
    for (auto part : split(body.substr(arrow + 2), ',')) {
      auto w = words(part);
      if (!w.empty()) d.added.push_back(parse_template(w, line));
    }
    auto rw = words(fields[3]);
    if (rw.size() != 1) throw Error(ErrorCode::Syntax, "bad recipe in " + line);
    d.recipe = rw[0];
    for (const auto& s : d.added)
      for (const auto& a : s.args)
        if (std::find(d.outs.begin(), d.outs.end(), a) == d.outs.end() &&
            std::find(d.ins.begin(), d.ins.end(), a) == d.ins.end())
          throw Error(ErrorCode::UnboundConclusionVariable, line, a);
    if (std::any_of(defs.begin(), defs.end(), [&](const auto& o) { return o.name == d.name; }))
      throw Error(ErrorCode::DuplicateRuleName, line, d.name);
    defs.push_back(std::move(d));
  }
  return Catalog(std::move(defs));
}

const Catalog& default_catalog() {
  static const Catalog catalog = parse_catalog(data::kDefaultDefs);
  return catalog;
}

std::vector<Construction> parse_construction_script(std::string_view text,
                                                    const Catalog& catalog) {
  std::vector<Construction> out;
  std::size_t lineno = 0;
  std::size_t base = 0;
  for (auto raw : split(text, '\n')) {
    ++lineno;
    std::size_t line_base = base;
    base += raw.size() + 1;
    std::string line(raw.substr(0, raw.find('#')));
    if (words(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::Syntax, "missing '='", line, line_base);
    auto declared = words(line.substr(0, eq));
    if (declared.empty()) throw Error(ErrorCode::Syntax, "no outputs", line, line_base);
    std::vector<std::string> seen;
    for (auto part : split(std::string_view(line).substr(eq + 1), ',')) {
      auto w = words(part);
      if (w.empty()) throw Error(ErrorCode::Syntax, "empty construction", line, line_base);
      const ConstructionDef* d = catalog.find(w[0]);
      if (!d) throw Error(ErrorCode::UnknownConstruction, "", w[0], line_base);
      if (w.size() - 1 != d->outs.size() + d->ins.size())
        throw Error(ErrorCode::WrongArgCount,
                    "expected " + std::to_string(d->outs.size() + d->ins.size()) + " points",
                    w[0], line_base);
      Construction c;
      c.name = d->name;
      c.category = d->category;
      c.line = lineno;
      c.outs.assign(w.begin() + 1, w.begin() + 1 + static_cast<std::ptrdiff_t>(d->outs.size()));
      c.args.assign(w.begin() + 1 + static_cast<std::ptrdiff_t>(d->outs.size()), w.end());
      for (const auto& o : c.outs)
        if (std::find(declared.begin(), declared.end(), o) == declared.end())
          throw Error(ErrorCode::Syntax, "output not declared on the left", o, line_base);
      for (const auto& o : c.outs)
        if (std::find(seen.begin(), seen.end(), o) == seen.end()) seen.push_back(o);
      out.push_back(std::move(c));
    }
    if (seen.size() != declared.size())
      throw Error(ErrorCode::Syntax, "outputs do not match declaration", line, line_base);
  }
  return out;
}

std::string serialize_construction_line(const std::vector<Construction>& step) {
  if (step.empty()) return {};
  std::string s;
  for (std::size_t i = 0; i < step.front().outs.size(); ++i)
    s += (i ? " " : "") + step.front().outs[i];
  s += " =";
  for (std::size_t k = 0; k < step.size(); ++k) {
    if (k) s += ",";
    s += " " + step[k].name;
    for (const auto& o : step[k].outs) s += " " + o;
    for (const auto& a : step[k].args) s += " " + a;
  }
  return s;
}

}  // namespace geodd
