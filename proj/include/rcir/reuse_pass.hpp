#pragma once

#include "rcir/ir.hpp"

namespace rcir {

// Fresh token names are "%w<counter>"; the counter is global to one pass run
// and seeded past any existing %w names, so introduced names never collide.
struct FreshNames {
  std::uint64_t counter = 0;
  std::string peek() const { return "%w" + std::to_string(counter); }
  void commit() { ++counter; }
};

// Rewrites the first let-bound plain constructor of arity n on each control
// path into a reuse of w. Returns the input body (same pointer) when nothing
// matched.
Body reuse_S(const Var& w, int n, const Body& b);

// Walks to the first point where z is dead, then inserts `let w = reset z`
// if a matching constructor exists downstream. Arms of nested cases are
// handled independently.
Body reuse_D(const Var& z, int n, const Body& b, FreshNames& fresh);

// Applies D for every case scrutinee, innermost cases first.
Body reuse_R(const Body& b, FreshNames& fresh);

// The whole pass: every body replaced by R(body).
Program insert_reset_reuse(const Program& p);

// Drops every `let w = reset x` and turns every reuse back into a plain
// constructor. Inverse of the pass on bodies without inc/dec.
Program erase_reset_reuse(const Program& p);

}  // namespace rcir
