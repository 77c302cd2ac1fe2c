#pragma once

#include <string>

#include "aot/ast.hpp"

namespace aot {

struct ParseError : std::runtime_error {
  int pos;  // 0-based offset into the input
  ParseError(int pos_, const std::string& msg)
      : std::runtime_error("at " + std::to_string(pos_) + ": " + msg), pos(pos_) {}
};

// Parses the concrete grammar. Binder sorts and relation arities are
// inferred from usage; conflicting usage is a sort error. The result is
// alpha-normalized: bound names clashing with free names or enclosing
// binders get primes appended.
FormulaPtr parse_formula(const std::string& text);

// Parses a standalone term ([\x. ...], (the y. ...), or a variable read as
// an individual).
TermPtr parse_term(const std::string& text);

}  // namespace aot
