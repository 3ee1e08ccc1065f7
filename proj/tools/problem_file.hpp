#pragma once

// Polynomial expression parser and the line-oriented problem file.
//
//   expr   := ['-'] term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' uint)?
//   base   := number | var | '(' expr ')'
//
// Numbers are integers, decimals (optional exponent) or rationals p/q.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "invpop/inverse.hpp"

namespace invpop::cli {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t pos, int line = 0);
  size_t position() const { return pos_; }
  int line() const { return line_; }
  /// The message without the location prefix.
  const std::string& detail() const { return detail_; }
  ParseError at_line(int line) const { return ParseError(detail_, pos_, line); }

 private:
  std::string detail_;
  size_t pos_;
  int line_;
};

Polynomiald parse_polynomial(std::string_view src, const std::vector<std::string>& vars);

/// A constant expression (no variables), e.g. "-1/0.63".
double parse_constant(std::string_view src);

/// "x1*x2^2" as a single monomial.
MultiIndex parse_monomial(std::string_view src, const std::vector<std::string>& vars);

struct ProblemFile {
  std::vector<std::string> vars;
  InverseProblem problem;
  /// Raw option values as written, for reporting.
  std::map<std::string, std::string> options;
  /// "general", "canonical" or "zero-one".
  std::string method = "general";
};

/// Parses the text of a problem file. Structural checks on the resulting
/// InverseProblem are left to InverseProblem::validate.
ProblemFile parse_problem(std::string_view text);
ProblemFile read_problem(const std::string& path);

/// Applies one option (from a file line or a command-line flag).
void apply_option(ProblemFile& pf, const std::string& name, const std::string& value);

Norm parse_norm(const std::string& s);

}  // namespace invpop::cli
