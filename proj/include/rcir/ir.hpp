#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rcir {

// Variables and constants share the identifier lexical space. Names starting
// with '%' are reserved for compiler-generated bindings and definitions.
using Var = std::string;
using Const = std::string;

struct SourcePos {
  int line = 0;  // 0 = synthesized by a pass, no source location
  int col = 0;
};

enum class Ownership : std::uint8_t { Owned, Borrowed };

// ---------------------------------------------------------------------------
// Expressions (right-hand sides of let bindings)
// ---------------------------------------------------------------------------

struct FullApp {
  Const fn;
  std::vector<Var> args;
};
struct PartApp {
  Const fn;
  std::vector<Var> args;  // strictly fewer than the target's parameter count
};
struct VarApp {
  Var fn;
  Var arg;  // variable applications are unary
};
struct Ctor {
  int index = 1;  // 1-based constructor index
  std::vector<Var> args;
};
struct Proj {
  int index = 1;  // 1-based field index
  Var source;
};
struct Reset {
  Var target;
};
struct Reuse {
  Var token;  // result of a reset
  int index = 1;
  std::vector<Var> args;
};

using Expr = std::variant<FullApp, PartApp, VarApp, Ctor, Proj, Reset, Reuse>;

// ---------------------------------------------------------------------------
// Function bodies
// ---------------------------------------------------------------------------

struct FnBody;
using Body = std::shared_ptr<const FnBody>;

struct Ret {
  Var var;
};
struct Let {
  Var var;
  Expr expr;
  Body rest;
};
struct CaseArm {
  int arity = 0;  // field count of the constructor matched by this arm
  Body body;
};
struct Case {
  Var scrutinee;
  std::vector<CaseArm> arms;  // arm i (1-based) matches constructor index i
};
struct Inc {
  Var var;
  Body rest;
};
struct Dec {
  Var var;
  Body rest;
};

struct FnBody {
  std::variant<Ret, Let, Case, Inc, Dec> node;
  SourcePos pos{};
};

Body make_ret(Var x, SourcePos pos = {});
Body make_let(Var x, Expr e, Body rest, SourcePos pos = {});
Body make_case(Var scrutinee, std::vector<CaseArm> arms, SourcePos pos = {});
Body make_inc(Var x, Body rest, SourcePos pos = {});
Body make_dec(Var x, Body rest, SourcePos pos = {});

struct Fn {
  std::vector<Var> params;
  std::vector<Ownership> borrows;  // one entry per parameter
  Body body;
  SourcePos pos{};
};

// All parameters owned.
Fn make_fn(std::vector<Var> params, Body body);

struct Program {
  std::vector<std::pair<Const, Fn>> defs;  // definition order is significant

  bool contains(const Const& name) const;
  const Fn* find(const Const& name) const;
  Fn* find(const Const& name);
  void add(Const name, Fn fn);
};

bool is_internal_name(const std::string& name);

// ---------------------------------------------------------------------------
// Occurrence and free-variable queries
// ---------------------------------------------------------------------------

// Every variable occurrence in e, in syntactic order (reuse tokens included).
void vars_of_expr(const Expr& e, std::vector<Var>& out);
bool occurs_in_expr(const Var& v, const Expr& e);

// Free occurrence of v in b; let binds its name in the continuation only and
// a case scrutinee counts as a use.
bool occurs(const Var& v, const Body& b);
std::set<Var> free_vars(const Body& b);

// ---------------------------------------------------------------------------
// Structural equality (source positions ignored)
// ---------------------------------------------------------------------------

bool expr_equal(const Expr& a, const Expr& b);
bool body_equal(const Body& a, const Body& b);
bool fn_equal(const Fn& a, const Fn& b);
bool program_equal(const Program& a, const Program& b);

}  // namespace rcir
