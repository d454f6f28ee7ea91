#include "rcir/check.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace rcir {

namespace {

struct Checker {
  const Program& prog;
  Dialect dialect;
  std::vector<Violation> out;
  Const current;

  void report(ViolationKind k, SourcePos pos, std::string msg) {
    out.push_back({k, current, pos, std::move(msg)});
  }

  void check_fn(const Const& name, const Fn& fn) {
    current = name;
    if (fn.params.size() != fn.borrows.size())
      report(ViolationKind::BorrowArity, fn.pos,
             "parameter and borrow annotation counts differ");

    // all parameter and let names of a function are mutually distinct
    std::set<Var> seen;
    for (const auto& p : fn.params) {
      if (!seen.insert(p).second)
        report(ViolationKind::DuplicateName, fn.pos, "duplicate parameter '" + p + "'");
    }
    collect_binders(fn.body, seen);

    std::set<Var> scope(fn.params.begin(), fn.params.end());
    walk(fn.body, scope);
  }

  void collect_binders(const Body& b, std::set<Var>& seen) {
    const auto& node = b->node;
    if (const auto* l = std::get_if<Let>(&node)) {
      if (!seen.insert(l->var).second)
        report(ViolationKind::DuplicateName, b->pos,
               "duplicate binding '" + l->var + "'");
      collect_binders(l->rest, seen);
    } else if (const auto* c = std::get_if<Case>(&node)) {
      for (const auto& arm : c->arms) collect_binders(arm.body, seen);
    } else if (const auto* i = std::get_if<Inc>(&node)) {
      collect_binders(i->rest, seen);
    } else if (const auto* d = std::get_if<Dec>(&node)) {
      collect_binders(d->rest, seen);
    }
  }

  void check_var(const Var& v, const std::set<Var>& scope, SourcePos pos) {
    if (!scope.count(v))
      report(ViolationKind::UnboundVar, pos, "variable '" + v + "' not in scope");
  }

  void check_expr(const Expr& e, const std::set<Var>& scope, SourcePos pos) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, FullApp>) {
            const Fn* callee = prog.find(x.fn);
            if (!callee) {
              report(ViolationKind::UnknownConst, pos, "unknown constant '" + x.fn + "'");
            } else if (callee->params.size() != x.args.size()) {
              report(ViolationKind::CallArity, pos,
                     "call of '" + x.fn + "' with " + std::to_string(x.args.size()) +
                         " arguments, expected " + std::to_string(callee->params.size()));
            }
            for (const auto& a : x.args) check_var(a, scope, pos);
          } else if constexpr (std::is_same_v<T, PartApp>) {
            const Fn* callee = prog.find(x.fn);
            if (!callee) {
              report(ViolationKind::UnknownConst, pos, "unknown constant '" + x.fn + "'");
            } else if (x.args.size() >= callee->params.size()) {
              report(ViolationKind::PapArity, pos,
                     "partial application of '" + x.fn + "' must supply fewer than " +
                         std::to_string(callee->params.size()) + " arguments");
            }
            for (const auto& a : x.args) check_var(a, scope, pos);
          } else if constexpr (std::is_same_v<T, VarApp>) {
            check_var(x.fn, scope, pos);
            check_var(x.arg, scope, pos);
          } else if constexpr (std::is_same_v<T, Ctor>) {
            if (x.index < 1) report(ViolationKind::BadIndex, pos, "ctor index must be >= 1");
            for (const auto& a : x.args) check_var(a, scope, pos);
          } else if constexpr (std::is_same_v<T, Proj>) {
            if (x.index < 1) report(ViolationKind::BadIndex, pos, "proj index must be >= 1");
            check_var(x.source, scope, pos);
          } else if constexpr (std::is_same_v<T, Reset>) {
            if (dialect == Dialect::Pure)
              report(ViolationKind::RcOpInPure, pos, "reset is not part of the pure dialect");
            check_var(x.target, scope, pos);
          } else {
            if (dialect == Dialect::Pure)
              report(ViolationKind::RcOpInPure, pos, "reuse is not part of the pure dialect");
            if (x.index < 1) report(ViolationKind::BadIndex, pos, "ctor index must be >= 1");
            check_var(x.token, scope, pos);
            for (const auto& a : x.args) check_var(a, scope, pos);
          }
        },
        e);
  }

  void walk(const Body& b, std::set<Var> scope) {
    const Body* cur = &b;
    for (;;) {
      const auto& node = (*cur)->node;
      SourcePos pos = (*cur)->pos;
      if (const auto* r = std::get_if<Ret>(&node)) {
        check_var(r->var, scope, pos);
        return;
      }
      if (const auto* l = std::get_if<Let>(&node)) {
        check_expr(l->expr, scope, pos);
        if (dialect == Dialect::Pure && !occurs(l->var, l->rest))
          report(ViolationKind::DeadLet, pos, "binding '" + l->var + "' is never used");
        if (std::holds_alternative<Reset>(l->expr)) check_reset_token(l->var, l->rest, pos);
        scope.insert(l->var);
        cur = &l->rest;
        continue;
      }
      if (const auto* c = std::get_if<Case>(&node)) {
        check_var(c->scrutinee, scope, pos);
        if (c->arms.empty()) report(ViolationKind::EmptyCase, pos, "case without arms");
        for (const auto& arm : c->arms) {
          if (arm.arity < 0) report(ViolationKind::BadIndex, pos, "negative arm arity");
          walk(arm.body, scope);
        }
        return;
      }
      if (const auto* i = std::get_if<Inc>(&node)) {
        if (dialect == Dialect::Pure)
          report(ViolationKind::RcOpInPure, pos, "inc is not part of the pure dialect");
        check_var(i->var, scope, pos);
        cur = &i->rest;
        continue;
      }
      const auto& d = std::get<Dec>(node);
      if (dialect == Dialect::Pure)
        report(ViolationKind::RcOpInPure, pos, "dec is not part of the pure dialect");
      check_var(d.var, scope, pos);
      cur = &d.rest;
    }
  }

  // A reset-bound token may be used, on every control path, at most once and
  // only as a reuse token or a dec target.
  void check_reset_token(const Var& w, const Body& rest, SourcePos bind_pos) {
    int max_uses = scan_token(w, rest);
    if (max_uses > 1)
      report(ViolationKind::ResetTokenMultiUse, bind_pos,
             "reset token '" + w + "' used more than once on a control path");
  }

  int scan_token(const Var& w, const Body& b) {
    const auto& node = b->node;
    SourcePos pos = b->pos;
    if (const auto* r = std::get_if<Ret>(&node)) {
      if (r->var == w)
        report(ViolationKind::ResetTokenMisuse, pos, "reset token '" + w + "' returned");
      return 0;
    }
    if (const auto* l = std::get_if<Let>(&node)) {
      int uses = 0;
      if (const auto* ru = std::get_if<Reuse>(&l->expr)) {
        if (ru->token == w) uses = 1;
        for (const auto& a : ru->args) {
          if (a == w)
            report(ViolationKind::ResetTokenMisuse, pos,
                   "reset token '" + w + "' stored in a constructor");
        }
      } else if (occurs_in_expr(w, l->expr)) {
        report(ViolationKind::ResetTokenMisuse, pos,
               "reset token '" + w + "' used outside reuse/dec");
      }
      return uses + scan_token(w, l->rest);
    }
    if (const auto* c = std::get_if<Case>(&node)) {
      if (c->scrutinee == w)
        report(ViolationKind::ResetTokenMisuse, pos, "case on reset token '" + w + "'");
      int mx = 0;
      for (const auto& arm : c->arms) mx = std::max(mx, scan_token(w, arm.body));
      return mx;
    }
    if (const auto* i = std::get_if<Inc>(&node)) {
      if (i->var == w)
        report(ViolationKind::ResetTokenMisuse, pos, "inc of reset token '" + w + "'");
      return scan_token(w, i->rest);
    }
    const auto& d = std::get<Dec>(node);
    int here = d.var == w ? 1 : 0;
    return here + scan_token(w, d.rest);
  }
};

}  // namespace

std::string violation_to_string(const Violation& v) {
  std::string s;
  if (v.pos.line > 0) s += std::to_string(v.pos.line) + ":" + std::to_string(v.pos.col) + " ";
  s += "[" + v.fn + "] " + v.message;
  return s;
}

std::vector<Violation> check_wellformed(const Program& p, Dialect dialect) {
  Checker c{p, dialect, {}, {}};
  for (const auto& [name, fn] : p.defs) c.check_fn(name, fn);
  return c.out;
}

}  // namespace rcir
