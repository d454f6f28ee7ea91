#include "rcir/ir.hpp"

#include <algorithm>

namespace rcir {

Body make_ret(Var x, SourcePos pos) {
  return std::make_shared<const FnBody>(FnBody{Ret{std::move(x)}, pos});
}

Body make_let(Var x, Expr e, Body rest, SourcePos pos) {
  return std::make_shared<const FnBody>(
      FnBody{Let{std::move(x), std::move(e), std::move(rest)}, pos});
}

Body make_case(Var scrutinee, std::vector<CaseArm> arms, SourcePos pos) {
  return std::make_shared<const FnBody>(
      FnBody{Case{std::move(scrutinee), std::move(arms)}, pos});
}

Body make_inc(Var x, Body rest, SourcePos pos) {
  return std::make_shared<const FnBody>(FnBody{Inc{std::move(x), std::move(rest)}, pos});
}

Body make_dec(Var x, Body rest, SourcePos pos) {
  return std::make_shared<const FnBody>(FnBody{Dec{std::move(x), std::move(rest)}, pos});
}

Fn make_fn(std::vector<Var> params, Body body) {
  Fn f;
  f.borrows.assign(params.size(), Ownership::Owned);
  f.params = std::move(params);
  f.body = std::move(body);
  return f;
}

bool Program::contains(const Const& name) const { return find(name) != nullptr; }

const Fn* Program::find(const Const& name) const {
  for (const auto& [n, fn] : defs) {
    if (n == name) return &fn;
  }
  return nullptr;
}

Fn* Program::find(const Const& name) {
  for (auto& [n, fn] : defs) {
    if (n == name) return &fn;
  }
  return nullptr;
}

void Program::add(Const name, Fn fn) {
  defs.emplace_back(std::move(name), std::move(fn));
}

bool is_internal_name(const std::string& name) {
  return !name.empty() && name[0] == '%';
}

void vars_of_expr(const Expr& e, std::vector<Var>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FullApp> || std::is_same_v<T, PartApp>) {
          out.insert(out.end(), x.args.begin(), x.args.end());
        } else if constexpr (std::is_same_v<T, VarApp>) {
          out.push_back(x.fn);
          out.push_back(x.arg);
        } else if constexpr (std::is_same_v<T, Ctor>) {
          out.insert(out.end(), x.args.begin(), x.args.end());
        } else if constexpr (std::is_same_v<T, Proj>) {
          out.push_back(x.source);
        } else if constexpr (std::is_same_v<T, Reset>) {
          out.push_back(x.target);
        } else if constexpr (std::is_same_v<T, Reuse>) {
          out.push_back(x.token);
          out.insert(out.end(), x.args.begin(), x.args.end());
        }
      },
      e);
}

bool occurs_in_expr(const Var& v, const Expr& e) {
  std::vector<Var> vs;
  vars_of_expr(e, vs);
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

bool occurs(const Var& v, const Body& b) {
  const auto& node = b->node;
  if (const auto* r = std::get_if<Ret>(&node)) return r->var == v;
  if (const auto* l = std::get_if<Let>(&node)) {
    if (occurs_in_expr(v, l->expr)) return true;
    if (l->var == v) return false;  // shadowed in the continuation
    return occurs(v, l->rest);
  }
  if (const auto* c = std::get_if<Case>(&node)) {
    if (c->scrutinee == v) return true;
    for (const auto& arm : c->arms) {
      if (occurs(v, arm.body)) return true;
    }
    return false;
  }
  if (const auto* i = std::get_if<Inc>(&node)) return i->var == v || occurs(v, i->rest);
  const auto& d = std::get<Dec>(node);
  return d.var == v || occurs(v, d.rest);
}

namespace {

void free_vars_go(const Body& b, std::set<Var> bound, std::set<Var>& acc) {
  const Body* cur = &b;
  std::set<Var> local = std::move(bound);
  for (;;) {
    const auto& node = (*cur)->node;
    if (const auto* r = std::get_if<Ret>(&node)) {
      if (!local.count(r->var)) acc.insert(r->var);
      return;
    }
    if (const auto* l = std::get_if<Let>(&node)) {
      std::vector<Var> vs;
      vars_of_expr(l->expr, vs);
      for (const auto& v : vs) {
        if (!local.count(v)) acc.insert(v);
      }
      local.insert(l->var);
      cur = &l->rest;
      continue;
    }
    if (const auto* c = std::get_if<Case>(&node)) {
      if (!local.count(c->scrutinee)) acc.insert(c->scrutinee);
      for (const auto& arm : c->arms) free_vars_go(arm.body, local, acc);
      return;
    }
    if (const auto* i = std::get_if<Inc>(&node)) {
      if (!local.count(i->var)) acc.insert(i->var);
      cur = &i->rest;
      continue;
    }
    const auto& d = std::get<Dec>(node);
    if (!local.count(d.var)) acc.insert(d.var);
    cur = &d.rest;
  }
}

}  // namespace

std::set<Var> free_vars(const Body& b) {
  std::set<Var> acc;
  free_vars_go(b, {}, acc);
  return acc;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, FullApp> || std::is_same_v<T, PartApp>) {
          return x.fn == y.fn && x.args == y.args;
        } else if constexpr (std::is_same_v<T, VarApp>) {
          return x.fn == y.fn && x.arg == y.arg;
        } else if constexpr (std::is_same_v<T, Ctor>) {
          return x.index == y.index && x.args == y.args;
        } else if constexpr (std::is_same_v<T, Proj>) {
          return x.index == y.index && x.source == y.source;
        } else if constexpr (std::is_same_v<T, Reset>) {
          return x.target == y.target;
        } else {
          return x.token == y.token && x.index == y.index && x.args == y.args;
        }
      },
      a);
}

bool body_equal(const Body& a, const Body& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->node);
        if constexpr (std::is_same_v<T, Ret>) {
          return x.var == y.var;
        } else if constexpr (std::is_same_v<T, Let>) {
          return x.var == y.var && expr_equal(x.expr, y.expr) && body_equal(x.rest, y.rest);
        } else if constexpr (std::is_same_v<T, Case>) {
          if (x.scrutinee != y.scrutinee || x.arms.size() != y.arms.size()) return false;
          for (size_t i = 0; i < x.arms.size(); ++i) {
            if (x.arms[i].arity != y.arms[i].arity) return false;
            if (!body_equal(x.arms[i].body, y.arms[i].body)) return false;
          }
          return true;
        } else {
          return x.var == y.var && body_equal(x.rest, y.rest);
        }
      },
      a->node);
}

bool fn_equal(const Fn& a, const Fn& b) {
  return a.params == b.params && a.borrows == b.borrows && body_equal(a.body, b.body);
}

bool program_equal(const Program& a, const Program& b) {
  if (a.defs.size() != b.defs.size()) return false;
  for (size_t i = 0; i < a.defs.size(); ++i) {
    if (a.defs[i].first != b.defs[i].first) return false;
    if (!fn_equal(a.defs[i].second, b.defs[i].second)) return false;
  }
  return true;
}

}  // namespace rcir
