#pragma once

#include <string>

#include "aot/ast.hpp"

namespace aot {

// Concrete syntax, re-parsable: parse(print(a)) is alpha-equivalent to a.
std::string print(const FormulaPtr& f);
std::string print(const TermPtr& t);

}  // namespace aot
