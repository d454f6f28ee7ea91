#include <doctest.h>

#include "rcir/check.hpp"
#include "rcir/generate.hpp"
#include "rcir/parse.hpp"
#include "rcir/pipeline.hpp"
#include "rcir/print.hpp"
#include "rcir/rc_pass.hpp"
#include "rcir/reuse_pass.hpp"
#include "rcir/token_check.hpp"
#include "test_util.hpp"

using namespace rcir;
using rcir_test::parse_corpus;
using rcir_test::parse_text;

namespace {

Program compile(const Program& p, PipelineConfig cfg = {}) {
  return run_pipeline(p, cfg).program;
}

std::string fn_text(const Program& p, const Const& name) {
  return print_fn(name, *normalize_fresh_names(p).find(name));
}

}  // namespace

TEST_CASE("o_plus and o_minus") {
  LocalBorrowMap bl;
  bl["x"] = Ownership::Owned;
  bl["b"] = Ownership::Borrowed;

  // owned last use: unchanged
  Body r = make_ret("x");
  CHECK(body_equal(o_plus("x", {}, r, bl), r));
  // owned but live later: inc
  CHECK(body_equal(o_plus("x", {"x"}, r, bl), make_inc("x", r)));
  // borrowed: always inc
  CHECK(body_equal(o_plus("b", {}, make_ret("b"), bl), make_inc("b", make_ret("b"))));

  // dec iff owned and dead
  CHECK(body_equal(o_minus_one("y", r, bl), make_dec("y", r)));
  CHECK(body_equal(o_minus_one("x", r, bl), r));   // x free in ret x
  CHECK(body_equal(o_minus_one("b", r, bl), r));   // borrowed

  // parameters (x, y) with body ret x: dec y only
  Body out = o_minus({"x", "y"}, make_ret("x"), bl);
  CHECK(body_equal(out, make_dec("y", make_ret("x"))));
}

TEST_CASE("application argument handling follows the worked examples") {
  // consuming the same owned argument twice needs a single inc
  {
    Program p = parse_text("def c (u v) = let t = ctor 1 u v; ret t\n"
                           "def g (y) = let z = call c y y; ret z");
    BorrowSig beta;
    beta["c"] = {Ownership::Owned, Ownership::Owned};
    beta["g"] = {Ownership::Owned};
    Program out = insert_rc(p, beta);
    CHECK(print_fn("g", *out.find("g")) ==
          "def g (y) =\n"
          "  inc y;\n"
          "  let z = call c y y;\n"
          "  ret z\n");
  }
  // borrowed then owned position of the same argument: inc before, dec after
  {
    Program p = parse_text("def c (@u v) = ret v\n"
                           "def g (y) = let z = call c y y; ret z");
    BorrowSig beta;
    beta["c"] = {Ownership::Borrowed, Ownership::Owned};
    beta["g"] = {Ownership::Owned};
    Program out = insert_rc(p, beta);
    CHECK(print_fn("g", *out.find("g")) ==
          "def g (y) =\n"
          "  inc y;\n"
          "  let z = call c y y;\n"
          "  dec y;\n"
          "  ret z\n");
  }
}

TEST_CASE("ret of a borrowed variable is incremented") {
  Program p = parse_text("def id (@x) = ret x");
  PipelineConfig cfg;
  cfg.reuse = false;
  cfg.borrow = false;
  Program out = compile(p, cfg);
  CHECK(print_fn("id", *out.find("id")) ==
        "def id (@x) =\n"
        "  inc x;\n"
        "  ret x\n");

  // with an owned parameter the body is unchanged
  Program q = parse_text("def id (x) = ret x");
  Program out2 = compile(q, cfg);
  CHECK(print_fn("id", *out2.find("id")) ==
        "def id (x) =\n"
        "  ret x\n");
}

TEST_CASE("compiled mkPairOf, fst and isNil match the expected listings") {
  PipelineConfig all_owned;
  all_owned.borrow = false;

  Program mk = compile(parse_corpus("mkpairof.ir"), all_owned);
  CHECK(fn_text(mk, "mkPairOf") ==
        "def mkPairOf (x) =\n"
        "  inc x;\n"
        "  let p = ctor 1 x x;\n"
        "  ret p\n");

  Program fs = compile(parse_corpus("fst.ir"), all_owned);
  CHECK(fn_text(fs, "fst") ==
        "def fst (x y) =\n"
        "  dec y;\n"
        "  ret x\n");

  Program nil = compile(parse_corpus("isnil.ir"), all_owned);
  CHECK(fn_text(nil, "isNil") ==
        "def isNil (xs) =\n"
        "  case xs of\n"
        "  | C 1/0 ->\n"
        "    dec xs;\n"
        "    let t = ctor 1;\n"
        "    ret t\n"
        "  | C 2/2 ->\n"
        "    dec xs;\n"
        "    let f = ctor 2;\n"
        "    ret f\n");
}

TEST_CASE("pipeline output is well-formed rc and token balanced") {
  for (const char* name :
       {"id.ir", "mkpairof.ir", "fst.ir", "isnil.ir", "hasnone.ir", "map.ir", "swap.ir",
        "goforward.ir", "tailf.ir", "evenodd.ir", "map_driver.ir", "map_driver_shared.ir",
        "map_map_driver.ir", "goforward_driver.ir", "rbtree_chained.ir", "rbtree_naive.ir"}) {
    Program out = compile(parse_corpus(name));
    CHECK_MESSAGE(check_wellformed(out, Dialect::RC).empty(), name);
    auto tv = check_token_balance(out);
    CHECK_MESSAGE(tv.empty(), name, tv.empty() ? "" : tv[0].message.c_str());
  }
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    Program out = compile(gen_program(cfg));
    CHECK(check_wellformed(out, Dialect::RC).empty());
    CHECK(check_token_balance(out).empty());
  }
}

TEST_CASE("stripping inc/dec undoes the rc stage") {
  for (const char* name : {"map.ir", "swap.ir", "goforward.ir", "rbtree_chained.ir"}) {
    Program pure = parse_corpus(name);
    Program staged = insert_reset_reuse(pure);
    BorrowSig beta = infer_borrow(staged);
    auto [wrapped, beta2] = make_owned_wrappers(staged, std::move(beta));
    Program out = insert_rc(wrapped, beta2);
    Program stripped = strip_inc_dec(out);
    // borrow annotations are recorded by the rc stage; compare bodies
    REQUIRE(stripped.defs.size() == wrapped.defs.size());
    for (size_t i = 0; i < stripped.defs.size(); ++i) {
      CHECK(stripped.defs[i].first == wrapped.defs[i].first);
      CHECK(body_equal(stripped.defs[i].second.body, wrapped.defs[i].second.body));
    }
    // and reversing the reuse erasure recovers the pure functions
    Program recovered = erase_reset_reuse(stripped);
    for (const auto& [name2, fn] : pure.defs) {
      CHECK(body_equal(recovered.find(name2)->body, fn.body));
    }
  }
}

TEST_CASE("byte-identical output for identical input") {
  std::string a = print_program(compile(parse_corpus("rbtree_chained.ir")));
  std::string b = print_program(compile(parse_corpus("rbtree_chained.ir")));
  CHECK(a == b);
}

TEST_CASE("tail calls are preserved by the full pipeline") {
  for (const char* name :
       {"map_driver.ir", "goforward_driver.ir", "rbtree_chained.ir", "evenodd.ir"}) {
    Program pure = parse_corpus(name);
    Program out = compile(pure);
    std::vector<std::string> diags;
    CHECK_MESSAGE(tail_calls_preserved(pure, out, &diags), name,
                  diags.empty() ? "" : diags[0].c_str());
  }
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    Program pure = gen_program(cfg);
    CHECK(tail_calls_preserved(pure, compile(pure), nullptr));
  }
}
