#pragma once

#include <cstdint>

#include "rcir/ir.hpp"

namespace rcir {

struct GenConfig {
  std::uint64_t seed = 0;
  int max_fns = 4;         // auxiliary functions in addition to main
  int max_body_len = 12;   // instruction budget per function body
  int max_ctor_arity = 3;
};

// A well-formed, terminating pure-dialect program with a nullary main.
// Recursive calls are restricted to strict subterms of a designated
// parameter, so every generated program evaluates in finitely many steps.
Program gen_program(const GenConfig& cfg);

}  // namespace rcir
