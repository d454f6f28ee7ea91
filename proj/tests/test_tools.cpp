#include <doctest.h>

#include <functional>

#include "rcir/analyze.hpp"
#include "rcir/check.hpp"
#include "rcir/differential.hpp"
#include "rcir/generate.hpp"
#include "rcir/interp.hpp"
#include "rcir/parse.hpp"
#include "rcir/pipeline.hpp"
#include "rcir/print.hpp"
#include "test_util.hpp"

using namespace rcir;
using rcir_test::parse_corpus;
using rcir_test::parse_text;

TEST_CASE("analyzer lists unguarded constructors") {
  Program out = run_pipeline(parse_corpus("map.ir")).program;
  auto report = analyze_reuse_guards(out);
  // the single constructor of map is produced by a reuse
  CHECK(report.unguarded_per_fn.at("map") == 0);

  Program swp = run_pipeline(parse_corpus("swap.ir"), {true, false, false, true}).program;
  CHECK(analyze_reuse_guards(swp).unguarded_per_fn.at("swap") == 0);

  Program naive = run_pipeline(parse_corpus("rbtree_naive.ir")).program;
  Program chained = run_pipeline(parse_corpus("rbtree_chained.ir")).program;
  auto rn = analyze_reuse_guards(naive);
  auto rc = analyze_reuse_guards(chained);
  CHECK(rc.unguarded_per_fn.at("balance1") == 0);
  CHECK(rn.unguarded_per_fn.at("balance1n") > 0);
  CHECK(rc.unguarded_per_fn.at("ins") == 1);  // the leaf constructor
  CHECK(rn.total() > rc.total());
}

TEST_CASE("analyzer and interpreter cohere on unshared runs") {
  // map reports zero unguarded constructors and, on a fully unshared run,
  // allocates no fresh constructor cells beyond what the builders make
  Program full = run_pipeline(parse_corpus("map_map_driver.ir")).program;
  Program build = run_pipeline(parse_corpus("map_map_build.ir")).program;
  CHECK(analyze_reuse_guards(full).unguarded_per_fn.at("map") == 0);
  EvalResult rf = eval_rc(full, "main");
  EvalResult rb = eval_rc(build, "main");
  CHECK(rf.stats.reset_shared_total() == 0);
  CHECK(rf.stats.ctor_allocs_by_arity[2] == rb.stats.ctor_allocs_by_arity[2]);
}

TEST_CASE("differential verdicts") {
  Program ok = parse_text("def main () = let a = ctor 1; ret a");
  CHECK(differential_check(ok).pass);

  for (const char* name :
       {"map_driver.ir", "map_driver_shared.ir", "map_map_driver.ir", "map_map_build.ir",
        "goforward_driver.ir", "goforward_build.ir", "rbtree_chained.ir", "rbtree_naive.ir",
        "rbtree_build.ir", "evenodd.ir", "mkpairof.ir"}) {
    DiffVerdict v = differential_check(parse_corpus(name));
    CHECK_MESSAGE(v.pass, name, " ", v.detail.c_str());
  }
  DiffVerdict up = differential_check(parse_corpus("rbtree_chained.ir"), "mainUp");
  CHECK_MESSAGE(up.pass, "rbtree mainUp ", up.detail.c_str());
}

TEST_CASE("differential catches a hand-broken pipeline") {
  // drop one inc from the compiled output and the harness must notice
  Program pure = parse_corpus("mkpairof.ir");
  Program out = run_pipeline(pure).program;
  // mkPairOf with borrow inference: x is borrowed, body is inc x; ctor; ret
  Fn* mk = out.find("mkPairOf");
  REQUIRE(mk != nullptr);
  REQUIRE(std::holds_alternative<Inc>(mk->body->node));
  mk->body = std::get<Inc>(mk->body->node).rest;
  bool failed = false;
  try {
    eval_rc(out, "main");
  } catch (const RunError& e) {
    failed = true;
    CHECK((e.kind == RunErrorKind::RcUnderflow || e.kind == RunErrorKind::UseAfterFree ||
           e.kind == RunErrorKind::Leak));
  }
  CHECK(failed);
}

TEST_CASE("the harness classifies broken compilations") {
  // a leak: compiled output minus one dec, pushed through the comparison path
  Program pure = parse_corpus("fst.ir");
  Program out = run_pipeline(pure).program;
  Fn* f = out.find("fst");
  REQUIRE(f != nullptr);
  // β(fst) is [B,B] under inference, so the compiled body holds an inc; drop it
  // and the run must end with an error the harness would classify
  Program withdriver = parse_text(
      "def fst (x y) = ret x\n"
      "def main () = let a = ctor 1; let b = ctor 1; let r = call fst a b; ret r");
  Program cc = run_pipeline(withdriver).program;
  // sabotage: remove the first inc or dec found in any body
  bool mutated = false;
  for (auto& [name, fn] : cc.defs) {
    std::function<Body(const Body&)> strip_first = [&](const Body& b) -> Body {
      const auto& node = b->node;
      if (const auto* l = std::get_if<Let>(&node))
        return make_let(l->var, l->expr, strip_first(l->rest), b->pos);
      if (const auto* c = std::get_if<Case>(&node)) {
        std::vector<CaseArm> arms;
        for (const auto& arm : c->arms) arms.push_back({arm.arity, strip_first(arm.body)});
        return make_case(c->scrutinee, std::move(arms), b->pos);
      }
      if (const auto* i = std::get_if<Inc>(&node)) {
        if (!mutated) {
          mutated = true;
          return strip_first(i->rest);
        }
        return make_inc(i->var, strip_first(i->rest), b->pos);
      }
      if (const auto* d = std::get_if<Dec>(&node)) {
        if (!mutated) {
          mutated = true;
          return strip_first(d->rest);
        }
        return make_dec(d->var, strip_first(d->rest), b->pos);
      }
      return b;
    };
    fn.body = strip_first(fn.body);
    if (mutated) break;
  }
  REQUIRE(mutated);
  bool failed = false;
  RunErrorKind kind{};
  try {
    eval_rc(cc, "main");
  } catch (const RunError& e) {
    failed = true;
    kind = e.kind;
  }
  CHECK(failed);
  CHECK((kind == RunErrorKind::Leak || kind == RunErrorKind::RcUnderflow ||
         kind == RunErrorKind::UseAfterFree));
}

TEST_CASE("generator respects the config bounds") {
  GenConfig cfg;
  cfg.seed = 11;
  cfg.max_ctor_arity = 2;
  Program p = gen_program(cfg);
  std::function<void(const Body&)> walk = [&](const Body& b) {
    if (const auto* l = std::get_if<Let>(&b->node)) {
      if (const auto* c = std::get_if<Ctor>(&l->expr)) CHECK(c->args.size() <= 2);
      walk(l->rest);
    } else if (const auto* c = std::get_if<Case>(&b->node)) {
      for (const auto& arm : c->arms) walk(arm.body);
    }
  };
  for (const auto& [name, fn] : p.defs) walk(fn.body);
}

TEST_CASE("generated programs terminate within the step bound") {
  for (std::uint64_t seed = 500; seed < 700; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    Program p = gen_program(cfg);
    CHECK_NOTHROW(eval_pure(p, "main", 2'000'000));
  }
}

TEST_CASE("shrinking returns a well-formed failing program") {
  // an intentionally broken program: the oracle value differs because the
  // entry is fine but we sabotage via an unknown-const compile failure
  Program p = parse_text(
      "def helper (x) = let a = ctor 2 x x; ret a\n"
      "def main () = let b = ctor 1; let c = call helper b; ret c");
  // sabotage: make the pipeline fail by checking a mutant that leaks instead;
  // simplest failure: a program whose compiled form is broken by hand is not
  // reachable through differential_check, so check the minimizer on a
  // step-limit failure instead
  Program loop = parse_text(
      "def spinf (x) = let r = call spinf x; ret r\n"
      "def unused (y) = let a = ctor 1 y; ret a\n"
      "def main () = let a = ctor 1; let r = call spinf a; ret r");
  DiffVerdict v = differential_check(loop, "main", 5000);
  CHECK(!v.pass);
  CHECK(v.cls == FailClass::StepLimit);
  REQUIRE(v.minimized.has_value());
  // the unused helper is shrunk away
  CHECK(!v.minimized->contains("unused"));
  CHECK(check_wellformed(*v.minimized, Dialect::Pure).empty());
}
