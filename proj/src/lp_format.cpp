#include "fogcache/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fogcache/numeric.hpp"

namespace fogcache::milp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool legal_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         c == '(' || c == ')' || c == ',' || c == '.';
}

std::string expr_string(const MilpProblem& p, const std::vector<Term>& terms) {
  // Merge duplicates, drop zeros, order by (sanitized) variable name.
  std::map<std::string, double> merged;
  for (const Term& t : terms) {
    merged[sanitize_lp_name(p.variables[t.var].name)] += t.coeff;
  }
  std::string out;
  bool first = true;
  for (const auto& [name, c] : merged) {
    if (c == 0.0) continue;
    if (first) {
      out += format_double(c) + " " + name;
      first = false;
    } else {
      out += (c < 0 ? " - " : " + ") + format_double(std::fabs(c)) + " " + name;
    }
  }
  return out;
}

const char* rel_token(Relation r) {
  switch (r) {
    case Relation::Le: return "<=";
    case Relation::Ge: return ">=";
    default: return "=";
  }
}

}  // namespace

std::string sanitize_lp_name(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (legal_name_char(c)) {
      out += c;
    } else {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "_x%02X_",
                    static_cast<unsigned char>(c));
      out += buf;
    }
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) ||
      out[0] == '.')
    out = "v_" + out;
  return out;
}

std::string write_lp_string(const MilpProblem& p) {
  validate(p);
  // Sanitized names must stay unique or the file would be ambiguous.
  std::set<std::string> used;
  std::vector<std::string> var_names(p.variables.size());
  for (size_t i = 0; i < p.variables.size(); ++i) {
    var_names[i] = sanitize_lp_name(p.variables[i].name);
    if (!used.insert(var_names[i]).second)
      throw std::invalid_argument("lp export: name collision after escaping: " +
                                  var_names[i]);
  }

  std::string out;
  out += "Minimize\n obj: " + expr_string(p, p.objective) + "\n";
  out += "Subject To\n";
  for (const auto& c : p.constraints) {
    std::string expr = expr_string(p, c.terms);
    if (expr.empty())
      throw std::invalid_argument("lp export: constraint '" + c.name +
                                  "' has no terms");
    out += " " + sanitize_lp_name(c.name) + ": " + expr + " " +
           rel_token(c.rel) + " " + format_double(c.rhs) + "\n";
  }
  out += "Bounds\n";
  std::vector<int> order(p.variables.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return var_names[a] < var_names[b];
  });
  for (int i : order) {
    const Variable& v = p.variables[i];
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out += " " + var_names[i] + " free\n";
    } else {
      out += " " + format_double(v.lower) + " <= " + var_names[i] +
             " <= " + format_double(v.upper) + "\n";
    }
  }
  bool any_int = false;
  for (const auto& v : p.variables) any_int |= v.kind == VarKind::Integer;
  if (any_int) {
    out += "Generals\n";
    for (int i : order)
      if (p.variables[i].kind == VarKind::Integer)
        out += " " + var_names[i] + "\n";
  }
  out += "End\n";
  return out;
}

void export_lp(const MilpProblem& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write LP file: " + path);
  f << write_lp_string(p);
  if (!f) throw std::runtime_error("I/O error while writing: " + path);
}

namespace {

struct Parser {
  std::istringstream in;
  int lineno = 0;
  std::string line;
  bool line_valid = false;

  explicit Parser(const std::string& text) : in(text) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("lp parse: line " + std::to_string(lineno) +
                             ": " + msg);
  }

  // Next non-empty line with comments stripped; returns false at EOF.
  bool next_line() {
    while (std::getline(in, line)) {
      ++lineno;
      auto bs = line.find('\\');
      if (bs != std::string::npos) line.erase(bs);
      bool blank = true;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
      if (!blank) {
        line_valid = true;
        return true;
      }
    }
    line_valid = false;
    return false;
  }

  static std::vector<std::string> tokens_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ls(s);
    std::string t;
    while (ls >> t) out.push_back(t);
    return out;
  }
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Section keyword for a line, or empty when it is not a section header.
std::string section_of(const std::vector<std::string>& toks) {
  if (toks.empty()) return {};
  std::string first = lower(toks[0]);
  if (toks.size() == 1) {
    if (first == "minimize" || first == "min") return "minimize";
    if (first == "maximize" || first == "max") return "maximize";
    if (first == "bounds" || first == "bound") return "bounds";
    if (first == "general" || first == "generals" || first == "gen")
      return "generals";
    if (first == "binary" || first == "binaries" || first == "bin")
      return "binaries";
    if (first == "end") return "end";
    if (first == "st" || first == "s.t." || first == "st.") return "subject";
    if (first == "ranges" || first == "sos" || first == "semi-continuous" ||
        first == "semis")
      return "unsupported:" + toks[0];
  }
  if (toks.size() == 2 && first == "subject" && lower(toks[1]) == "to")
    return "subject";
  if (toks.size() == 2 && first == "such" && lower(toks[1]) == "that")
    return "subject";
  return {};
}

struct RawTerm {
  std::string name;
  double coeff;
};

}  // namespace

MilpProblem parse_lp_string(const std::string& text) {
  Parser ps(text);

  struct RawConstraint {
    std::string name;
    std::vector<RawTerm> terms;
    Relation rel;
    double rhs;
  };
  std::vector<RawTerm> objective;
  std::vector<RawConstraint> constraints;
  std::map<std::string, std::pair<double, double>> bounds;  // explicit only
  std::set<std::string> integers, binaries, seen_names;

  auto note_name = [&](const std::string& n) { seen_names.insert(n); };

  // label: splits "name:" from an expression line; the colon may be glued.
  auto split_label = [&](const std::string& l, std::string& name,
                         std::string& rest) {
    auto pos = l.find(':');
    if (pos == std::string::npos) return false;
    name = l.substr(0, pos);
    rest = l.substr(pos + 1);
    // trim the name
    auto b = name.find_first_not_of(" \t");
    auto e = name.find_last_not_of(" \t");
    if (b == std::string::npos) return false;
    name = name.substr(b, e - b + 1);
    if (name.find(' ') != std::string::npos ||
        name.find('\t') != std::string::npos)
      return false;
    return true;
  };

  // Parses "c1 v1 + c2 v2 ..." tokens; stops at a relation token and returns
  // its index, or consumes everything when no relation is present (objective).
  auto parse_expr = [&](const std::vector<std::string>& toks, size_t start,
                        std::vector<RawTerm>& out) -> size_t {
    size_t i = start;
    double sign = 1.0;
    bool have_sign = false;
    while (i < toks.size()) {
      const std::string& t = toks[i];
      if (t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>" ||
          t == "<" || t == ">")
        break;
      if (t == "+" || t == "-") {
        if (have_sign) ps.fail("two consecutive signs");
        sign = t == "-" ? -1.0 : 1.0;
        have_sign = true;
        ++i;
        continue;
      }
      double c;
      if (parse_double(t, c)) {
        ++i;
        if (i >= toks.size() || toks[i] == "<=" || toks[i] == ">=" ||
            toks[i] == "=" || toks[i] == "=<" || toks[i] == "=>" ||
            toks[i] == "<" || toks[i] == ">")
          ps.fail("constant terms are unsupported");
        const std::string& n = toks[i];
        double dummy;
        if (parse_double(n, dummy)) ps.fail("constant terms are unsupported");
        if (n == "+" || n == "-") ps.fail("coefficient without a variable");
        out.push_back({n, sign * c});
        note_name(n);
        ++i;
      } else {
        out.push_back({t, sign});
        note_name(t);
        ++i;
      }
      sign = 1.0;
      have_sign = false;
    }
    if (have_sign) ps.fail("dangling sign at end of expression");
    return i;
  };

  if (!ps.next_line()) throw std::runtime_error("lp parse: empty file");
  auto toks = Parser::tokens_of(ps.line);
  std::string sec = section_of(toks);
  if (sec == "maximize")
    ps.fail("unsupported: Maximize (only minimize problems are handled)");
  if (sec != "minimize") ps.fail("expected 'Minimize'");

  // Objective line.
  if (!ps.next_line()) ps.fail("missing objective row");
  {
    std::string name, rest;
    if (!split_label(ps.line, name, rest)) ps.fail("expected 'obj: ...'");
    auto etoks = Parser::tokens_of(rest);
    size_t stop = parse_expr(etoks, 0, objective);
    if (stop != etoks.size()) ps.fail("relation not allowed in the objective");
  }

  if (!ps.next_line()) ps.fail("missing 'Subject To'");
  if (section_of(Parser::tokens_of(ps.line)) != "subject")
    ps.fail("expected 'Subject To'");

  std::string pending_section = "";
  while (ps.next_line()) {
    auto t = Parser::tokens_of(ps.line);
    std::string s = section_of(t);
    if (!s.empty()) {
      pending_section = s;
      break;
    }
    std::string name, rest;
    if (!split_label(ps.line, name, rest))
      ps.fail("expected 'name: expression relation rhs'");
    RawConstraint rc;
    rc.name = name;
    auto etoks = Parser::tokens_of(rest);
    size_t i = parse_expr(etoks, 0, rc.terms);
    if (rc.terms.empty()) ps.fail("constraint has no terms");
    if (i >= etoks.size()) ps.fail("missing relation (<=, >=, =)");
    const std::string& rt = etoks[i];
    if (rt == "<=" || rt == "=<" || rt == "<")
      rc.rel = Relation::Le;
    else if (rt == ">=" || rt == "=>" || rt == ">")
      rc.rel = Relation::Ge;
    else if (rt == "=")
      rc.rel = Relation::Eq;
    else
      ps.fail("malformed relation token '" + rt + "'");
    ++i;
    if (i >= etoks.size()) ps.fail("missing right-hand side");
    if (!parse_double(etoks[i], rc.rhs))
      ps.fail("bad right-hand side '" + etoks[i] + "'");
    if (++i != etoks.size()) ps.fail("trailing tokens after the rhs");
    constraints.push_back(std::move(rc));
  }

  // Remaining sections in any order.
  while (ps.line_valid) {
    std::string sec_now = pending_section;
    if (sec_now.rfind("unsupported:", 0) == 0)
      ps.fail("unsupported section '" + sec_now.substr(12) + "'");
    if (sec_now == "end") break;
    if (sec_now == "maximize") ps.fail("unsupported: Maximize");
    if (sec_now != "bounds" && sec_now != "generals" && sec_now != "binaries")
      ps.fail("unexpected content outside a section");
    pending_section.clear();
    bool got_next = false;
    while ((got_next = ps.next_line())) {
      auto t = Parser::tokens_of(ps.line);
      std::string s = section_of(t);
      if (!s.empty()) {
        pending_section = s;
        break;
      }
      if (sec_now == "bounds") {
        // forms: "lb <= name <= ub" | "name free" | "name <= ub" |
        //        "name >= lb" | "name = v"
        auto is_rel = [](const std::string& x) {
          return x == "<=" || x == ">=" || x == "=" || x == "=<" || x == "=>";
        };
        if (t.size() == 2 && lower(t[1]) == "free") {
          bounds[t[0]] = {-kInf, kInf};
          note_name(t[0]);
        } else if (t.size() == 5 && is_rel(t[1]) && is_rel(t[3])) {
          double lb, ub;
          if (!parse_double(t[0], lb) || !parse_double(t[4], ub))
            ps.fail("bad bound value");
          if (t[1] == ">=" || t[1] == "=>" || t[3] == ">=" || t[3] == "=>")
            ps.fail("bounds must use '<=' in the two-sided form");
          bounds[t[2]] = {lb, ub};
          note_name(t[2]);
        } else if (t.size() == 3 && is_rel(t[1])) {
          double v;
          if (!parse_double(t[2], v)) ps.fail("bad bound value");
          auto& [lb, ub] = bounds.emplace(t[0], std::pair(0.0, kInf)).first->second;
          if (t[1] == "<=" || t[1] == "=<")
            ub = v;
          else if (t[1] == ">=" || t[1] == "=>")
            lb = v;
          else {
            lb = ub = v;
          }
          note_name(t[0]);
        } else {
          ps.fail("malformed bounds line");
        }
      } else {  // generals / binaries
        for (const auto& n : t) {
          double dummy;
          if (parse_double(n, dummy)) ps.fail("number in a variable section");
          (sec_now == "generals" ? integers : binaries).insert(n);
          note_name(n);
        }
      }
    }
    if (!got_next && pending_section.empty())
      ps.fail("missing 'End'");
  }
  if (!ps.line_valid) throw std::runtime_error("lp parse: missing 'End'");

  // Assemble, variables ordered by name.
  MilpProblem p;
  for (const auto& n : seen_names) {
    VarKind kind = (integers.count(n) || binaries.count(n))
                       ? VarKind::Integer
                       : VarKind::Continuous;
    double lb = 0.0, ub = kInf;
    if (auto it = bounds.find(n); it != bounds.end()) {
      lb = it->second.first;
      ub = it->second.second;
    }
    if (binaries.count(n)) {
      lb = std::max(lb, 0.0);
      ub = std::min(ub, 1.0);
    }
    p.add_variable(n, kind, lb, ub);
  }
  auto to_terms = [&](const std::vector<RawTerm>& raw) {
    std::vector<Term> out;
    out.reserve(raw.size());
    for (const auto& rt : raw) out.push_back({p.find_variable(rt.name), rt.coeff});
    return out;
  };
  p.objective = to_terms(objective);
  for (auto& rc : constraints)
    p.add_constraint(rc.name, to_terms(rc.terms), rc.rel, rc.rhs);
  validate(p);
  return p;
}

MilpProblem parse_lp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open LP file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_lp_string(ss.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace fogcache::milp
