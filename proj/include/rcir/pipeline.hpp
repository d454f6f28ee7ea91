#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rcir/borrow_pass.hpp"
#include "rcir/check.hpp"
#include "rcir/ir.hpp"

namespace rcir {

struct CompileError : std::runtime_error {
  CompileError(std::string msg, std::vector<Violation> vs = {})
      : std::runtime_error(std::move(msg)), violations(std::move(vs)) {}
  std::vector<Violation> violations;
};

// Ordered subset of the three passes. Skipping borrow inference while still
// inserting counts uses an all-owned signature that honors '@' annotations.
struct PipelineConfig {
  bool reuse = true;
  bool borrow = true;
  bool rc = true;
  bool tail_refine = true;
};

struct PipelineResult {
  Program program;
  BorrowSig beta;
};

// Input must be well-formed pure when the reuse pass runs, well-formed RC
// otherwise (pure programs are valid RC programs unchanged).
PipelineResult run_pipeline(const Program& input, const PipelineConfig& cfg = {});

}  // namespace rcir
