#include "problem_file.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "invpop/instances.hpp"

namespace invpop::cli {

ParseError::ParseError(const std::string& msg, size_t pos, int line)
    : std::runtime_error((line > 0 ? "line " + std::to_string(line) + ", " : std::string()) + "column " +
                         std::to_string(pos + 1) + ": " + msg),
      detail_(msg),
      pos_(pos),
      line_(line) {}

namespace {

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

  Polynomiald parse() {
    Polynomiald p = expr();
    skip();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return p;
  }

 private:
  int n() const { return std::max<int>(1, static_cast<int>(vars_.size())); }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomiald expr() {
    bool neg = eat('-');
    Polynomiald p = term();
    if (neg) p = -p;
    for (;;) {
      if (eat('+')) p += term();
      else if (eat('-')) p -= term();
      else return p;
    }
  }

  Polynomiald term() {
    Polynomiald p = factor();
    while (eat('*')) p = p * factor();
    return p;
  }

  Polynomiald factor() {
    Polynomiald b = base();
    if (!eat('^')) return b;
    skip();
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) {
      if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '.')) fail("exponent must be a nonnegative integer");
      fail("malformed exponent");
    }
    if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
      fail("non-integer exponent");
    const std::string digits(src_.substr(start, pos_ - start));
    if (digits.size() > 3) fail("exponent too large");
    return b.pow(std::stoi(digits));
  }

  double unsigned_number() {
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && src_[start] == '.')) {
      pos_ = start;
      fail("expected a number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      size_t ds = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (ds == pos_) pos_ = save;  // "2e" without digits: leave the 'e' for the caller
    }
    return std::stod(std::string(src_.substr(start, pos_ - start)));
  }

  Polynomiald base() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomiald p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = unsigned_number();
      // A rational literal p/q.
      skip();
      if (pos_ < src_.size() && src_[pos_] == '/') {
        ++pos_;
        skip();
        double q = unsigned_number();
        if (q == 0.0) fail("division by zero in rational literal");
        v /= q;
      }
      return Polynomiald::constant(n(), v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      std::string name(src_.substr(start, pos_ - start));
      auto it = std::find(vars_.begin(), vars_.end(), name);
      if (it == vars_.end()) {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      return Polynomiald::variable(n(), static_cast<int>(it - vars_.begin()));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view src_;
  const std::vector<std::string>& vars_;
  size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_bool(const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

int parse_int(const std::string& v, const std::string& what) {
  size_t used = 0;
  int r = 0;
  try {
    r = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument(what + ": expected an integer, got '" + v + "'");
  return r;
}

void add_constraint(ProblemFile& pf, const std::string& text) {
  static const char* ops[] = {">=", "<=", "=="};
  size_t at = std::string::npos;
  std::string op;
  for (const char* o : ops) {
    size_t k = text.find(o);
    if (k != std::string::npos && (at == std::string::npos || k < at)) {
      at = k;
      op = o;
    }
  }
  if (at == std::string::npos) throw ParseError("constraint needs '>=', '<=' or '=='", 0);
  Polynomiald lhs = parse_polynomial(text.substr(0, at), pf.vars), rhs;
  try {
    rhs = parse_polynomial(text.substr(at + 2), pf.vars);
  } catch (const ParseError& e) {
    throw ParseError(e.detail() + " (right-hand side)", at + 2 + e.position());
  }
  if (op == ">=") pf.problem.K.add_inequality(lhs - rhs);
  else if (op == "<=") pf.problem.K.add_inequality(rhs - lhs);
  else pf.problem.K.add_equality(lhs - rhs);
}

}  // namespace

Polynomiald parse_polynomial(std::string_view src, const std::vector<std::string>& vars) {
  return Parser(src, vars).parse();
}

double parse_constant(std::string_view src) {
  static const std::vector<std::string> none;
  Polynomiald p = parse_polynomial(src, none);
  return p.constant_term();
}

MultiIndex parse_monomial(std::string_view src, const std::vector<std::string>& vars) {
  Polynomiald p = parse_polynomial(src, vars);
  if (p.num_terms() != 1 || p.terms().begin()->second != 1.0)
    throw ParseError("'" + std::string(src) + "' is not a monomial", 0);
  return p.terms().begin()->first;
}

Norm parse_norm(const std::string& s) {
  if (s == "l1" || s == "1") return Norm::l1;
  if (s == "l2" || s == "2") return Norm::l2;
  if (s == "linf" || s == "inf") return Norm::linf;
  throw std::invalid_argument("unknown norm '" + s + "' (use l1, l2 or linf)");
}

void apply_option(ProblemFile& pf, const std::string& name, const std::string& value) {
  InverseProblem& p = pf.problem;
  const int n = static_cast<int>(pf.vars.size());
  if (name == "d") {
    p.d = parse_int(value, "d");
  } else if (name == "norm") {
    p.norm = parse_norm(value);
  } else if (name == "epsilon") {
    p.epsilon = parse_constant(value);
  } else if (name == "assume_box") {
    p.assume_box = parse_bool(value);
  } else if (name == "convex") {
    p.require_convex = parse_bool(value);
  } else if (name == "target_degree") {
    p.target_degree = parse_int(value, "target_degree");
  } else if (name == "frame") {
    if (value == "original") p.frame = Frame::original;
    else if (value == "centered") p.frame = Frame::centered;
    else throw std::invalid_argument("frame must be 'original' or 'centered'");
  } else if (name == "structural") {
    p.structural.clear();
    if (value == "quadratic-form") {
      if (n == 0) throw std::invalid_argument("structural: declare vars first");
      instances::pin_quadratic_form(p);
    } else if (!value.empty() && value != "none") {
      for (const auto& m : split(value, ',')) p.structural.insert(parse_monomial(m, pf.vars));
    }
  } else if (name == "box") {
    auto parts = split(value, ',');
    if (static_cast<int>(parts.size()) != n)
      throw std::invalid_argument("box needs one 'lower upper' pair per variable");
    Box b;
    for (const auto& part : parts) {
      std::istringstream in(part);
      std::string lo, hi, extra;
      if (!(in >> lo >> hi) || (in >> extra)) throw std::invalid_argument("box entry '" + part + "' is not 'lower upper'");
      b.lower.push_back(parse_constant(lo));
      b.upper.push_back(parse_constant(hi));
    }
    p.box = b;
  } else if (name == "method") {
    if (value != "general" && value != "canonical" && value != "zero-one")
      throw std::invalid_argument("method must be general, canonical or zero-one");
    pf.method = value;
  } else {
    throw std::invalid_argument("unknown option '" + name + "'");
  }
  pf.options[name] = value;
}

ProblemFile parse_problem(std::string_view text) {
  ProblemFile pf;
  bool have_objective = false, have_point = false;
  std::vector<std::pair<int, std::string>> constraints, options;
  std::string objective, point;
  int obj_line = 0, point_line = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  // First pass collects the lines; vars must be known before expressions parse.
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.rfind("option", 0) == 0 && (s.size() == 6 || std::isspace(static_cast<unsigned char>(s[6])))) {
      options.emplace_back(line, trim(s.substr(6)));
      continue;
    }
    size_t colon = s.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'key: value'", 0, line);
    std::string key = trim(s.substr(0, colon)), val = trim(s.substr(colon + 1));
    if (key == "vars") {
      if (!pf.vars.empty()) throw ParseError("vars declared twice", 0, line);
      for (auto& v : split(val, ' ')) {
        for (auto& w : split(v, ',')) {
          if (w.empty()) continue;
          if (!(std::isalpha(static_cast<unsigned char>(w[0])) || w[0] == '_'))
            throw ParseError("bad variable name '" + w + "'", 0, line);
          if (std::find(pf.vars.begin(), pf.vars.end(), w) != pf.vars.end())
            throw ParseError("duplicate variable '" + w + "'", 0, line);
          pf.vars.push_back(w);
        }
      }
    } else if (key == "objective") {
      objective = val;
      obj_line = line;
      have_objective = true;
    } else if (key == "constraint") {
      constraints.emplace_back(line, val);
    } else if (key == "point") {
      point = val;
      point_line = line;
      have_point = true;
    } else {
      throw ParseError("unknown key '" + key + "'", 0, line);
    }
  }
  if (pf.vars.empty()) throw ParseError("missing 'vars:' line", 0, 0);
  if (!have_objective) throw ParseError("missing 'objective:' line", 0, 0);
  if (!have_point) throw ParseError("missing 'point:' line", 0, 0);
  const int n = static_cast<int>(pf.vars.size());
  InverseProblem& p = pf.problem;
  try {
    p.f = parse_polynomial(objective, pf.vars);
  } catch (const ParseError& e) {
    throw e.at_line(obj_line);
  }
  p.K = FeasibleSet(n);
  for (const auto& [ln, c] : constraints) {
    try {
      add_constraint(pf, c);
    } catch (const ParseError& e) {
      throw e.at_line(ln);
    }
  }
  auto coords = split(point, ',');
  if (coords.size() == 1 && n > 1) coords = split(point, ' ');
  if (static_cast<int>(coords.size()) != n)
    throw ParseError("point has " + std::to_string(coords.size()) + " entries, expected " + std::to_string(n), 0,
                     point_line);
  p.y = Point(n);
  for (int i = 0; i < n; ++i) {
    try {
      p.y(i) = parse_constant(coords[static_cast<size_t>(i)]);
    } catch (const ParseError& e) {
      throw e.at_line(point_line);
    }
  }
  for (const auto& [ln, o] : options) {
    size_t eq = o.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'option name = value'", 0, ln);
    try {
      apply_option(pf, trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
    } catch (const ParseError& e) {
      throw e.at_line(ln);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), 0, ln);
    }
  }
  return pf;
}

ProblemFile read_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

}  // namespace invpop::cli
