#include <doctest.h>

#include "rcir/interp.hpp"
#include "rcir/parse.hpp"
#include "rcir/pipeline.hpp"
#include "test_util.hpp"

using namespace rcir;
using rcir_test::parse_corpus;
using rcir_test::parse_text;

TEST_CASE("trivial main returning one constructor") {
  Program p = parse_text("def main () = let a = ctor 1; ret a");
  EvalResult r = eval_rc(p, "main");
  CHECK(print_value(r.value) == "(C 1)");
  CHECK(r.stats.allocations == 1);
  CHECK(r.stats.final_live == 0);
  CHECK(r.stats.atomic_rc_ops == 0);
}

TEST_CASE("recursive free on dec") {
  RunStats stats;
  Heap h(&stats);
  Loc l1 = h.alloc_ctor(1, {});
  Loc l2 = h.alloc_ctor(2, {l1});
  CHECK(h.size() == 2);
  h.dec(l2, {});
  CHECK(h.size() == 0);
  CHECK(stats.dec_ops == 2);
}

TEST_CASE("reset on a shared cell returns the null token and reuse falls back") {
  RunStats stats;
  Heap h(&stats);
  Loc a = h.alloc_ctor(1, {});
  Loc b = h.alloc_ctor(2, {a});
  h.inc(b, {});
  Loc tok = h.reset(b, "f", "w", {});
  CHECK(tok == kNullTok);
  CHECK(h.cell(b, {}).rc == 1);
  Loc c = h.alloc_ctor(1, {});
  Loc reused = h.reuse(tok, 2, {c}, {});
  CHECK(reused != b);
  CHECK(stats.reuse_fresh == 1);
  CHECK(stats.reset_sites.at({"f", "w"}).shared == 1);
}

TEST_CASE("reset on a unique cell nulls the fields and keeps the location") {
  RunStats stats;
  Heap h(&stats);
  Loc a = h.alloc_ctor(1, {});
  Loc b = h.alloc_ctor(2, {a});
  Loc tok = h.reset(b, "f", "w", {});
  CHECK(tok == b);
  CHECK(h.size() == 1);  // the child was released
  Loc c = h.alloc_ctor(1, {});
  Loc reused = h.reuse(tok, 3, {c}, {});
  CHECK(reused == b);
  CHECK(stats.reuse_uniq == 1);
  const auto& cell = std::get<CtorCell>(h.cell(b, {}).value);
  CHECK(cell.index == 3);
}

TEST_CASE("reuse size mismatch is detected") {
  RunStats stats;
  Heap h(&stats);
  Loc a = h.alloc_ctor(1, {});
  Loc b = h.alloc_ctor(2, {a});
  Loc tok = h.reset(b, "f", "w", {});
  CHECK_THROWS_AS(h.reuse(tok, 2, {}, {}), RunError);
}

TEST_CASE("interpreter error classes") {
  {
    // dec of an absent cell underflows
    Program p = parse_text("def main () = let a = ctor 1; dec a; dec a; ret a", true);
    CHECK_THROWS_WITH_AS(eval_rc(p, "main"), doctest::Contains("RcUnderflow"), RunError);
  }
  {
    // case on a partial application cell
    Program p = parse_text("def g (x y) = ret x\n"
                           "def main () = let a = ctor 1; let h = pap g a; "
                           "case h of | C 1/0 -> ret h");
    CHECK_THROWS_WITH_AS(eval_rc(p, "main"), doctest::Contains("CaseOnPap"), RunError);
  }
  {
    // projection out of range
    Program p = parse_text("def main () = let a = ctor 1; let b = proj 2 a; ret b");
    CHECK_THROWS_WITH_AS(eval_rc(p, "main"), doctest::Contains("ProjOutOfRange"), RunError);
  }
  {
    // leaked cell
    Program p = parse_text("def main () = let a = ctor 1; let b = ctor 1; ret b", true);
    CHECK_THROWS_WITH_AS(eval_rc(p, "main"), doctest::Contains("Leak"), RunError);
  }
  {
    Program p = parse_text("def main () = let a = call nosuch; ret a");
    CHECK_THROWS_WITH_AS(eval_rc(p, "main"), doctest::Contains("UnknownConst"), RunError);
  }
  {
    // reset of a pap cell
    Program p = parse_text("def g (x y) = ret x\n"
                           "def main () = let a = ctor 1; let h = pap g a; "
                           "let w = reset h; dec w; let b = ctor 1; ret b");
    CHECK_THROWS_WITH_AS(eval_rc(p, "main"), doctest::Contains("ResetOnPap"), RunError);
  }
}

TEST_CASE("compiled mkPairOf shares the argument cell") {
  Program p = parse_corpus("mkpairof.ir");
  PipelineConfig cfg;
  cfg.borrow = false;
  Program out = run_pipeline(p, cfg).program;
  EvalResult r = eval_rc(out, "main");
  CHECK(print_value(r.value) == "(C 1 (C 1) (C 1))");
  CHECK(r.value->children[0] == r.value->children[1]);  // same heap cell read out
  CHECK(r.stats.allocations == 2);
  CHECK(r.stats.inc_ops == 1);
  CHECK(r.stats.dec_ops == 3);
  CHECK(r.stats.peak_live == 2);
  CHECK(r.stats.final_live == 0);
}

TEST_CASE("pure evaluator basics") {
  Program p = parse_text("def main () = let a = ctor 1; ret a");
  CHECK(print_value(eval_pure(p, "main")) == "(C 1)");
}

TEST_CASE("pap then vapp equals the direct call") {
  Program p = parse_text(
      "def pairof (x y) = let p = ctor 3 x y; ret p\n"
      "def direct () = let a = ctor 1; let b = ctor 2; let r = call pairof a b; ret r\n"
      "def staged () = let a = ctor 1; let b = ctor 2; let h = pap pairof a; "
      "let r = vapp h b; ret r\n"
      "def staged2 () = let a = ctor 1; let b = ctor 2; let h = pap pairof; "
      "let h2 = vapp h a; let r = vapp h2 b; ret r");
  PureValue direct = eval_pure(p, "direct");
  CHECK(value_equal(direct, eval_pure(p, "staged")));
  CHECK(value_equal(direct, eval_pure(p, "staged2")));
}

TEST_CASE("pap extension matches the oracle through the whole pipeline") {
  Program p = parse_text(
      "def pairof (x y) = let p = ctor 3 x y; ret p\n"
      "def main () = let a = ctor 1; let b = ctor 2; let h = pap pairof; "
      "let h2 = vapp h a; let r = vapp h2 b; ret r");
  PureValue expected = eval_pure(p, "main");
  EvalResult got = eval_rc(run_pipeline(p).program, "main");
  CHECK(value_equal(expected, got.value));
  CHECK(got.stats.final_live == 0);
}

TEST_CASE("oracle equivalence on the pure map example") {
  Program p = parse_corpus("map_map_driver.ir");
  PureValue expected = eval_pure(p, "main");
  EvalResult got = eval_rc(run_pipeline(p).program, "main");
  CHECK(value_equal(expected, got.value));
}

TEST_CASE("token conservation: allocations plus incs equal decs") {
  for (const char* name : {"map_driver.ir", "map_driver_shared.ir", "goforward_driver.ir",
                           "rbtree_chained.ir", "rbtree_naive.ir", "evenodd.ir"}) {
    Program out = run_pipeline(parse_corpus(name)).program;
    EvalResult r = eval_rc(out, "main");
    CHECK_MESSAGE(r.stats.allocations + r.stats.inc_ops == r.stats.dec_ops, name);
    CHECK(r.stats.final_live == 0);
  }
}

TEST_CASE("reuse counters add up to the number of reuse evaluations") {
  Program out = run_pipeline(parse_corpus("goforward_driver.ir")).program;
  EvalResult r = eval_rc(out, "main");
  // each executed reset feeds exactly one reuse in this driver
  CHECK(r.stats.reuse_uniq + r.stats.reuse_fresh ==
        r.stats.reset_uniq_total() + r.stats.reset_shared_total());
}

TEST_CASE("thread tag model") {
  RunStats stats;
  Heap h(&stats);
  Loc l3 = h.alloc_ctor(1, {});
  Loc l2 = h.alloc_ctor(2, {l3});
  Loc l1 = h.alloc_ctor(3, {l2});
  CHECK(h.check_tags().empty());  // all single-threaded

  CHECK(h.mark_mt(l1) == 3);
  CHECK(h.check_tags().empty());
  CHECK(h.mark_mt(l1) == 0);  // already tagged: nothing visited beyond the root

  // rc traffic on multi-threaded cells is counted as atomic
  std::uint64_t before = stats.atomic_rc_ops;
  h.inc(l2, {});
  h.dec(l2, {});
  CHECK(stats.atomic_rc_ops == before + 2);

  // forbidden states are reported
  Heap h2(&stats);
  Loc c = h2.alloc_ctor(1, {});
  Loc p = h2.alloc_ctor(2, {c});
  h2.set_tag(p, ThreadTag::MultiThreaded);
  auto tv = h2.check_tags();
  REQUIRE(tv.size() == 1);
  CHECK(tv[0].parent == p);

  h2.set_tag(p, ThreadTag::Persistent);
  h2.set_tag(c, ThreadTag::MultiThreaded);
  auto tv2 = h2.check_tags();
  REQUIRE(tv2.size() == 1);

  // persistent cells ignore rc updates
  std::uint64_t incs = stats.inc_ops;
  h2.inc(p, {});
  CHECK(stats.inc_ops == incs);
}

TEST_CASE("the heap stays acyclic") {
  RunStats stats;
  Heap h(&stats);
  Loc a = h.alloc_ctor(1, {});
  h.inc(a, {});
  h.inc(a, {});  // three references in total
  Loc b = h.alloc_ctor(2, {a, a});
  Loc c = h.alloc_ctor(2, {b, a});
  CHECK(h.is_acyclic());
  Loc tok = h.reset(c, "f", "w", {});
  Loc f1 = h.alloc_ctor(1, {});
  Loc f2 = h.alloc_ctor(1, {});
  h.reuse(tok, 3, {f1, f2}, {});
  CHECK(h.is_acyclic());
}

TEST_CASE("a three-element unshared list reuses every spine cell") {
  // small version of the map driver pinned from the semantics by hand:
  // three unique conses reset uniquely, none shared
  Program p = parse_text(
      "def keep (x) = ret x\n"
      "def map (f xs) = case xs of | C 1/0 -> ret xs | C 2/2 -> "
      "let x = proj 1 xs; let s = proj 2 xs; let y = vapp f x; "
      "let ys = call map f s; let r = ctor 2 y ys; ret r\n"
      "def main () = let nil = ctor 1; let e1 = ctor 1; let e2 = ctor 1; let e3 = ctor 1; "
      "let c3 = ctor 2 e3 nil; let c2 = ctor 2 e2 c3; let c1 = ctor 2 e1 c2; "
      "let fk = pap keep; let ys = call map fk c1; ret ys");
  EvalResult r = eval_rc(run_pipeline(p).program, "main");
  CHECK(r.stats.reuse_uniq == 3);
  CHECK(r.stats.reset_shared_total() == 0);
}

TEST_CASE("runs without mark_mt count no atomic operations") {
  Program out = run_pipeline(parse_corpus("map_driver.ir")).program;
  EvalResult r = eval_rc(out, "main");
  CHECK(r.stats.atomic_rc_ops == 0);
}

TEST_CASE("step limit guards runaway programs") {
  Program p = parse_text("def spinf (x) = let r = call spinf x; ret r\n"
                         "def main () = let a = ctor 1; let r = call spinf a; ret r");
  CHECK_THROWS_WITH_AS(eval_rc(p, "main", 10000), doctest::Contains("StepLimit"), RunError);
}
