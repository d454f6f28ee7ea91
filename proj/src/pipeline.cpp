#include "rcir/pipeline.hpp"

#include "rcir/reuse_pass.hpp"
#include "rcir/rc_pass.hpp"

namespace rcir {

PipelineResult run_pipeline(const Program& input, const PipelineConfig& cfg) {
  Program p = input;
  if (cfg.reuse) {
    auto vs = check_wellformed(p, Dialect::Pure);
    if (!vs.empty()) throw CompileError("input is not well-formed pure IR", std::move(vs));
    p = insert_reset_reuse(p);
  } else {
    auto vs = check_wellformed(p, Dialect::RC);
    if (!vs.empty()) throw CompileError("input is not well-formed RC IR", std::move(vs));
  }

  BorrowSig beta;
  if (cfg.borrow) {
    beta = infer_borrow(p, {cfg.tail_refine});
  } else if (cfg.rc) {
    beta = all_owned_signature(p);
  } else {
    // no borrow stage requested: carry the source annotations through
    for (const auto& [name, fn] : p.defs) beta[name] = fn.borrows;
  }
  if (cfg.borrow || cfg.rc) {
    auto [wrapped, beta2] = make_owned_wrappers(p, std::move(beta));
    p = std::move(wrapped);
    beta = std::move(beta2);
    for (auto& [name, fn] : p.defs) {
      auto it = beta.find(name);
      if (it != beta.end()) fn.borrows = it->second;
    }
  }

  if (cfg.rc) {
    p = insert_rc(p, beta);
    auto vs = check_wellformed(p, Dialect::RC);
    if (!vs.empty())
      throw CompileError("internal error: rc pass produced ill-formed output", std::move(vs));
  }
  return {std::move(p), std::move(beta)};
}

}  // namespace rcir
