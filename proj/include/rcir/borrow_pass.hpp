#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "rcir/ir.hpp"

namespace rcir {

// Per-constant parameter markers.
using BorrowSig = std::map<Const, std::vector<Ownership>>;

struct BorrowError : std::runtime_error {
  explicit BorrowError(const std::string& msg) : std::runtime_error(msg) {}
};

// Variables that must not be marked borrowed: reset targets, owned call
// arguments, variable-application operands, arguments of partially applied
// owned wrappers, and proj sources whose result lands in the set.
std::set<Var> collect_owned(const Body& b, const Program& p, const BorrowSig& beta);

struct InferOptions {
  bool tail_refine = true;
};

// Least fixpoint starting from all-borrowed. '@'-annotated parameters are user
// assertions: they stay borrowed, and inference fails with a diagnostic if one
// of them would have to be owned for reset safety.
BorrowSig infer_borrow(const Program& p, const InferOptions& opts = {});

// All parameters owned except manual '@' annotations.
BorrowSig all_owned_signature(const Program& p);

// For every constant with a borrowed parameter that is partially applied,
// adds a forwarding constant "%own_<c>" with an all-owned signature and
// retargets the pap sites.
std::pair<Program, BorrowSig> make_owned_wrappers(const Program& p, BorrowSig beta);

bool is_owned_wrapper_name(const Const& c);

// Parameters that reach a reset directly or through proj chains.
std::set<Var> reset_roots(const Body& b);

}  // namespace rcir
