#pragma once

#include <stdexcept>
#include <string>

#include "rcir/ir.hpp"

namespace rcir {

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int col)
      : std::runtime_error(std::move(msg)), line(line), col(col) {}
  int line;
  int col;
};

struct ParseOptions {
  // Source files may not use '%'-prefixed names; compiler output (RC dialect)
  // may, so the CLI relaxes this when reading compiled programs back in.
  bool allow_internal_names = false;
};

Program parse_program(const std::string& text, const ParseOptions& opts = {});

}  // namespace rcir
