#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rcir/ir.hpp"

namespace rcir {

struct UnguardedSite {
  Const fn;
  SourcePos pos;
  int ctor_index;
  std::size_t arity;
};

struct ReuseGuardReport {
  std::vector<UnguardedSite> sites;                 // in definition/body order
  std::map<Const, std::size_t> unguarded_per_fn;    // every function appears
  std::size_t total() const { return sites.size(); }
};

// Lists every let-bound constructor that is not produced by a reuse.
ReuseGuardReport analyze_reuse_guards(const Program& p);

std::string report_to_text(const ReuseGuardReport& r, const Program& p);

}  // namespace rcir
