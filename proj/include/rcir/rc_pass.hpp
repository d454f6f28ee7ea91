#pragma once

#include <map>

#include "rcir/borrow_pass.hpp"
#include "rcir/ir.hpp"

namespace rcir {

// Borrow status of local variables; entries default to owned.
using LocalBorrowMap = std::map<Var, Ownership>;

Ownership local_borrow(const LocalBorrowMap& bl, const Var& x);

// inc x before use in an owned context unless x is owned and dead afterwards
// (live_after is the set of variables still needed).
Body o_plus(const Var& x, const std::set<Var>& live_after, Body b, const LocalBorrowMap& bl);

// dec x before b iff x is owned and dead in b.
Body o_minus_one(const Var& x, Body b, const LocalBorrowMap& bl);
Body o_minus(const std::vector<Var>& xs, Body b, const LocalBorrowMap& bl);

// Application argument handling: owned positions are inc'd unless the
// argument moves its last token; borrowed positions get a dec after the call
// when the argument was owned and is dead.
Body rc_C_app(const std::vector<Var>& args, const std::vector<Ownership>& bs, const Var& binder,
              const Expr& e, SourcePos pos, Body compiled_rest, const LocalBorrowMap& bl);

Body rc_C(const Body& b, LocalBorrowMap bl, const BorrowSig& beta);

// Every body becomes O-(params, C(body)); the resulting program records beta
// in its borrow annotations.
Program insert_rc(const Program& p, const BorrowSig& beta);

// Drops every inc and dec instruction.
Program strip_inc_dec(const Program& p);

}  // namespace rcir
