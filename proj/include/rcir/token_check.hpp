#pragma once

#include <string>
#include <vector>

#include "rcir/ir.hpp"

namespace rcir {

struct TokenViolation {
  Const fn;
  SourcePos pos;
  std::string message;
};

// Path-enumerating ownership check over a compiled RC program (borrow
// signatures are read from the definitions). Along every control path each
// owned token must be consumed exactly once: consumption is dec, a
// constructor/reuse argument, an owned call position, a variable-application
// operand, a pap argument, or being returned. Borrowed parameters must end
// with net zero tokens.
std::vector<TokenViolation> check_token_balance(const Program& p);

// After the full pipeline every pure-dialect tail call must remain `let r =
// call c ...; ret r` with nothing in between. `rc` is matched against `pure`
// modulo inserted inc/dec/reset instructions, reuse for ctor, and owned
// wrapper retargeting of paps.
bool tail_calls_preserved(const Program& pure, const Program& rc,
                          std::vector<std::string>* diagnostics = nullptr);

}  // namespace rcir
