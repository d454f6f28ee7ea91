#include <doctest.h>

#include <functional>
#include <set>

#include "rcir/check.hpp"
#include "rcir/generate.hpp"
#include "rcir/parse.hpp"
#include "rcir/print.hpp"
#include "rcir/reuse_pass.hpp"
#include "test_util.hpp"

using namespace rcir;
using rcir_test::parse_corpus;
using rcir_test::parse_text;

namespace {

// enumeration oracle for D: does the body contain a plain constructor of the
// given arity at all?
bool has_ctor_of_arity(const Body& b, int n) {
  const auto& node = b->node;
  if (const auto* l = std::get_if<Let>(&node)) {
    if (const auto* c = std::get_if<Ctor>(&l->expr)) {
      if (static_cast<int>(c->args.size()) == n) return true;
    }
    return has_ctor_of_arity(l->rest, n);
  }
  if (const auto* c = std::get_if<Case>(&node)) {
    for (const auto& arm : c->arms) {
      if (has_ctor_of_arity(arm.body, n)) return true;
    }
    return false;
  }
  if (const auto* i = std::get_if<Inc>(&node)) return has_ctor_of_arity(i->rest, n);
  if (const auto* d = std::get_if<Dec>(&node)) return has_ctor_of_arity(d->rest, n);
  return false;
}

bool contains_reset(const Body& b) {
  const auto& node = b->node;
  if (const auto* l = std::get_if<Let>(&node))
    return std::holds_alternative<Reset>(l->expr) || contains_reset(l->rest);
  if (const auto* c = std::get_if<Case>(&node)) {
    for (const auto& arm : c->arms) {
      if (contains_reset(arm.body)) return true;
    }
    return false;
  }
  if (const auto* i = std::get_if<Inc>(&node)) return contains_reset(i->rest);
  if (const auto* d = std::get_if<Dec>(&node)) return contains_reset(d->rest);
  return false;
}

}  // namespace

TEST_CASE("S rewrites the first matching constructor") {
  Program p = parse_text("def g (y w) = let r = ctor 2 y y; ret r");
  Body b = p.find("g")->body;
  Body s = reuse_S("w", 2, b);
  Body expect =
      make_let("r", Reuse{"w", 2, {"y", "y"}}, make_ret("r"));
  CHECK(body_equal(s, expect));

  // no match: same body back (pointer identity)
  CHECK(reuse_S("w", 1, b) == b);
  CHECK(reuse_S("w", 2, make_ret("x")) != nullptr);
  CHECK(body_equal(reuse_S("w", 2, make_ret("x")), make_ret("x")));
}

TEST_CASE("S picks the first arity match per path") {
  Program p = parse_text(
      "def g (y) = let a = ctor 1 y; let b = ctor 2 a a; let c = ctor 2 b b; ret c");
  Body s = reuse_S("w", 2, p.find("g")->body);
  // only the first arity-2 constructor (b) is rewritten
  const auto& l1 = std::get<Let>(s->node);
  CHECK(std::holds_alternative<Ctor>(l1.expr));
  const auto& l2 = std::get<Let>(l1.rest->node);
  CHECK(std::holds_alternative<Reuse>(l2.expr));
  const auto& l3 = std::get<Let>(l2.rest->node);
  CHECK(std::holds_alternative<Ctor>(l3.expr));
}

TEST_CASE("D leaves bodies without a matching arity unchanged") {
  // enumeration oracle confirms there is no arity-2 constructor
  Program p = parse_text("def g (z y) = let a = ctor 1 y; ret a");
  Body b = p.find("g")->body;
  REQUIRE(!has_ctor_of_arity(b, 2));
  FreshNames fresh;
  CHECK(reuse_D("z", 2, b, fresh) == b);

  Body r = make_ret("x");
  CHECK(reuse_D("z", 2, r, fresh) == r);
}

TEST_CASE("R on map inserts the reset after the last use of xs") {
  Program p = insert_reset_reuse(parse_corpus("map.ir"));
  std::string text = print_fn("map", *p.find("map"));
  CHECK(text ==
        "def map (f xs) =\n"
        "  case xs of\n"
        "  | C 1/0 ->\n"
        "    ret xs\n"
        "  | C 2/2 ->\n"
        "    let x = proj 1 xs;\n"
        "    let s = proj 2 xs;\n"
        "    let %w0 = reset xs;\n"
        "    let y = vapp f x;\n"
        "    let ys = call map f s;\n"
        "    let r = reuse %w0 ctor 2 y ys;\n"
        "    ret r\n");
}

TEST_CASE("R leaves ctor-free definitions unchanged") {
  Program p = parse_corpus("id.ir");
  Program q = insert_reset_reuse(p);
  CHECK(program_equal(p, q));
}

TEST_CASE("swap gets two reset/reuse pairs") {
  Program p = insert_reset_reuse(parse_corpus("swap.ir"));
  std::string text = print_fn("swap", *normalize_fresh_names(p).find("swap"));
  CHECK(text ==
        "def swap (xs) =\n"
        "  case xs of\n"
        "  | C 1/0 ->\n"
        "    ret xs\n"
        "  | C 2/2 ->\n"
        "    let t1 = proj 2 xs;\n"
        "    case t1 of\n"
        "    | C 1/0 ->\n"
        "      ret xs\n"
        "    | C 2/2 ->\n"
        "      let h1 = proj 1 xs;\n"
        "      let %0 = reset xs;\n"
        "      let h2 = proj 1 t1;\n"
        "      let t2 = proj 2 t1;\n"
        "      let %1 = reset t1;\n"
        "      let r1 = reuse %1 ctor 2 h1 t2;\n"
        "      let r2 = reuse %0 ctor 2 h2 r1;\n"
        "      ret r2\n");
}

TEST_CASE("goForward resets only in the innermost Cons arm") {
  Program p = insert_reset_reuse(parse_corpus("goforward.ir"));
  const Fn* gf = p.find("goForward");
  const auto& outer = std::get<Case>(gf->body->node);
  // outer arm: let xs = proj 1 p; case xs of ...
  const auto& l = std::get<Let>(outer.arms[0].body->node);
  const auto& inner = std::get<Case>(l.rest->node);
  CHECK(!contains_reset(inner.arms[0].body));
  CHECK(contains_reset(inner.arms[1].body));
}

TEST_CASE("nullary-constructor arms get no reset") {
  // isNil scrutinizes a list but only builds 0-arity booleans
  Program p = insert_reset_reuse(parse_corpus("isnil.ir"));
  CHECK(!contains_reset(p.find("isNil")->body));
}

TEST_CASE("erasure recovers the input") {
  for (const char* name : {"map.ir", "swap.ir", "goforward.ir", "hasnone.ir",
                           "rbtree_chained.ir", "map_driver.ir"}) {
    Program p = parse_corpus(name);
    Program q = insert_reset_reuse(p);
    CHECK_MESSAGE(program_equal(erase_reset_reuse(q), p), name);
  }
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    Program p = gen_program(cfg);
    Program q = insert_reset_reuse(p);
    CHECK(program_equal(erase_reset_reuse(q), p));
    CHECK(check_wellformed(q, Dialect::RC).empty());
  }
}

TEST_CASE("fresh names are internal and globally unique") {
  Program q = insert_reset_reuse(parse_corpus("rbtree_chained.ir"));
  std::set<Var> tokens;
  std::function<void(const Body&)> walk = [&](const Body& b) {
    if (const auto* l = std::get_if<Let>(&b->node)) {
      if (std::holds_alternative<Reset>(l->expr)) {
        CHECK(is_internal_name(l->var));
        CHECK(tokens.insert(l->var).second);
      }
      walk(l->rest);
    } else if (const auto* c = std::get_if<Case>(&b->node)) {
      for (const auto& arm : c->arms) walk(arm.body);
    } else if (const auto* i = std::get_if<Inc>(&b->node)) {
      walk(i->rest);
    } else if (const auto* d = std::get_if<Dec>(&b->node)) {
      walk(d->rest);
    }
  };
  for (const auto& [name, fn] : q.defs) walk(fn.body);
  CHECK(tokens.size() > 10);
}
