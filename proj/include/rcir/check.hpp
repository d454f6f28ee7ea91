#pragma once

#include <string>
#include <vector>

#include "rcir/ir.hpp"

namespace rcir {

enum class Dialect { Pure, RC };

enum class ViolationKind {
  DuplicateName,
  UnboundVar,
  UnknownConst,
  CallArity,
  PapArity,
  RcOpInPure,
  DeadLet,
  ResetTokenMisuse,
  ResetTokenMultiUse,
  EmptyCase,
  BadIndex,
  BorrowArity,
};

struct Violation {
  ViolationKind kind;
  Const fn;
  SourcePos pos;
  std::string message;
};

std::string violation_to_string(const Violation& v);

// Empty result iff the program is well-formed in the given dialect.
std::vector<Violation> check_wellformed(const Program& p, Dialect dialect);

}  // namespace rcir
