#pragma once

#include <optional>
#include <string>

#include "rcir/ir.hpp"

namespace rcir {

enum class FailClass {
  None,
  CompileError,
  ValueMismatch,
  RuntimeError,
  Leak,
  StepLimit,
};

const char* fail_class_name(FailClass c);

struct DiffVerdict {
  bool pass = false;
  FailClass cls = FailClass::None;
  std::string detail;
  std::optional<Program> minimized;  // present on failure, best-effort greedy
};

// Compiles p with the full pipeline, runs both evaluators on `entry`, and
// passes iff the values match structurally, no interpreter error occurred and
// the final heap is empty.
DiffVerdict differential_check(const Program& p, const Const& entry = "main",
                               std::uint64_t step_limit = 2'000'000);

}  // namespace rcir
