#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "sai/encoding.hpp"

namespace sai {

/// Syntax or semantic error at a 1-based line and column of the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// Parses a problem file:
///
///     vars: x, y
///     params: a
///     field: x' = -2*y; y' = x^2
///     domain: -x - y^2 >= 0
///     init: (x = -1 & y = 0.5) | (x = -0.5 & y = -0.6)
///     invariant: a*y*(x - y) >= 0
///
/// `params:` and `domain:` are optional; `#` starts a comment.
Problem parse_problem(std::string_view text);

/// Formula or polynomial over the variables (and parameters) of `ctx`.
Formula parse_formula(std::string_view text, const ContextPtr& ctx);
Polynomial parse_polynomial(std::string_view text, const ContextPtr& ctx);

/// Re-parseable rendering of a problem.
std::string print_problem(const Problem& prob);

/// Same context names, field, domain, init and candidate.
bool same_problem(const Problem& a, const Problem& b);

}  // namespace sai
