#pragma once

#include <string>

#include "rcir/ir.hpp"

namespace rcir {

// Canonical text: fixed two-space indentation, one instruction per line.
// parse_program(print_program(p)) is structurally equal to p.
std::string print_program(const Program& p);
std::string print_fn(const Const& name, const Fn& fn);
std::string print_expr(const Expr& e);

// Renames every '%'-prefixed variable per function to %0, %1, ... in order of
// first occurrence, so outputs that differ only in fresh-name choices compare
// equal. Used by golden tests.
Program normalize_fresh_names(const Program& p);

}  // namespace rcir
