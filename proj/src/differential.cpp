#include "rcir/differential.hpp"

#include <functional>
#include <vector>

#include "rcir/check.hpp"
#include "rcir/interp.hpp"
#include "rcir/pipeline.hpp"
#include "rcir/print.hpp"

namespace rcir {

const char* fail_class_name(FailClass c) {
  switch (c) {
    case FailClass::None: return "none";
    case FailClass::CompileError: return "compile-error";
    case FailClass::ValueMismatch: return "value-mismatch";
    case FailClass::RuntimeError: return "runtime-error";
    case FailClass::Leak: return "leak";
    case FailClass::StepLimit: return "step-limit";
  }
  return "?";
}

namespace {

struct Outcome {
  bool pass = false;
  FailClass cls = FailClass::None;
  std::string detail;
};

Outcome run_once(const Program& p, const Const& entry, std::uint64_t step_limit) {
  Program compiled;
  try {
    compiled = run_pipeline(p).program;
  } catch (const std::exception& e) {
    return {false, FailClass::CompileError, e.what()};
  }
  PureValue expected;
  try {
    expected = eval_pure(p, entry, step_limit);
  } catch (const RunError& e) {
    if (e.kind == RunErrorKind::StepLimit)
      return {false, FailClass::StepLimit, std::string("oracle: ") + e.what()};
    return {false, FailClass::RuntimeError, std::string("oracle: ") + e.what()};
  }
  try {
    EvalResult got = eval_rc(compiled, entry, step_limit);
    if (!value_equal(expected, got.value))
      return {false, FailClass::ValueMismatch,
              "expected " + print_value(expected) + ", got " + print_value(got.value)};
  } catch (const RunError& e) {
    if (e.kind == RunErrorKind::Leak) return {false, FailClass::Leak, e.what()};
    if (e.kind == RunErrorKind::StepLimit) return {false, FailClass::StepLimit, e.what()};
    return {false, FailClass::RuntimeError, e.what()};
  }
  return {true, FailClass::None, ""};
}

bool wellformed_pure_with_entry(const Program& p, const Const& entry) {
  const Fn* e = p.find(entry);
  if (!e || !e->params.empty()) return false;
  return check_wellformed(p, Dialect::Pure).empty();
}

// candidate reductions: drop a definition, hoist a case arm, drop a binding
// whose variable is unused afterwards
std::vector<Program> shrink_candidates(const Program& p, const Const& entry) {
  std::vector<Program> out;
  for (size_t i = 0; i < p.defs.size(); ++i) {
    if (p.defs[i].first == entry) continue;
    Program q;
    for (size_t j = 0; j < p.defs.size(); ++j) {
      if (j != i) q.add(p.defs[j].first, p.defs[j].second);
    }
    out.push_back(std::move(q));
  }

  for (size_t d = 0; d < p.defs.size(); ++d) {
    // enumerate body rewrites producing one modified program each
    std::vector<Body> variants;
    std::function<Body(const Body&, size_t&, size_t, bool&)> rewrite =
        [&](const Body& b, size_t& counter, size_t target, bool& hit) -> Body {
      const auto& node = b->node;
      if (std::holds_alternative<Ret>(node)) return b;
      if (const auto* l = std::get_if<Let>(&node)) {
        if (counter++ == target && !occurs(l->var, l->rest)) {
          hit = true;
          return l->rest;
        }
        return make_let(l->var, l->expr, rewrite(l->rest, counter, target, hit), b->pos);
      }
      if (const auto* c = std::get_if<Case>(&node)) {
        if (counter++ == target && c->arms.size() == 1) {
          hit = true;
          return c->arms[0].body;
        }
        std::vector<CaseArm> arms;
        for (const auto& arm : c->arms)
          arms.push_back({arm.arity, rewrite(arm.body, counter, target, hit)});
        return make_case(c->scrutinee, std::move(arms), b->pos);
      }
      if (const auto* i = std::get_if<Inc>(&node))
        return make_inc(i->var, rewrite(i->rest, counter, target, hit), b->pos);
      const auto& dec = std::get<Dec>(node);
      return make_dec(dec.var, rewrite(dec.rest, counter, target, hit), b->pos);
    };
    for (size_t target = 0; target < 64; ++target) {
      size_t counter = 0;
      bool hit = false;
      Body nb = rewrite(p.defs[d].second.body, counter, target, hit);
      if (target >= counter) break;
      if (!hit) continue;
      Program q = p;
      q.defs[d].second.body = nb;
      out.push_back(std::move(q));
    }
  }
  return out;
}

}  // namespace

DiffVerdict differential_check(const Program& p, const Const& entry,
                               std::uint64_t step_limit) {
  Outcome first = run_once(p, entry, step_limit);
  if (first.pass) return {true, FailClass::None, "", std::nullopt};

  // greedy best-effort shrink preserving well-formedness and failure
  Program best = p;
  bool reduced = true;
  int rounds = 0;
  while (reduced && rounds < 64) {
    reduced = false;
    ++rounds;
    for (auto& cand : shrink_candidates(best, entry)) {
      if (!wellformed_pure_with_entry(cand, entry)) continue;
      Outcome o = run_once(cand, entry, step_limit);
      if (!o.pass) {
        best = std::move(cand);
        reduced = true;
        break;
      }
    }
  }
  return {false, first.cls, first.detail, std::move(best)};
}

}  // namespace rcir
