#include "rcir/rc_pass.hpp"

#include <functional>
#include <stdexcept>

namespace rcir {

Ownership local_borrow(const LocalBorrowMap& bl, const Var& x) {
  auto it = bl.find(x);
  return it == bl.end() ? Ownership::Owned : it->second;
}

Body o_plus(const Var& x, const std::set<Var>& live_after, Body b, const LocalBorrowMap& bl) {
  if (local_borrow(bl, x) == Ownership::Owned && !live_after.count(x)) return b;
  return make_inc(x, std::move(b));
}

Body o_minus_one(const Var& x, Body b, const LocalBorrowMap& bl) {
  if (local_borrow(bl, x) == Ownership::Owned && !free_vars(b).count(x))
    return make_dec(x, std::move(b));
  return b;
}

Body o_minus(const std::vector<Var>& xs, Body b, const LocalBorrowMap& bl) {
  for (const auto& x : xs) b = o_minus_one(x, std::move(b), bl);
  return b;
}

Body rc_C_app(const std::vector<Var>& args, const std::vector<Ownership>& bs, const Var& binder,
              const Expr& e, SourcePos pos, Body compiled_rest, const LocalBorrowMap& bl) {
  std::function<Body(size_t, Body)> go = [&](size_t i, Body f) -> Body {
    if (i == args.size()) return make_let(binder, e, std::move(f), pos);
    Ownership o = i < bs.size() ? bs[i] : Ownership::Owned;
    if (o == Ownership::Owned) {
      std::set<Var> live(args.begin() + i + 1, args.end());
      auto fv = free_vars(f);
      live.insert(fv.begin(), fv.end());
      return o_plus(args[i], live, go(i + 1, std::move(f)), bl);
    }
    return go(i + 1, o_minus_one(args[i], std::move(f), bl));
  };
  return go(0, std::move(compiled_rest));
}

Body rc_C(const Body& b, LocalBorrowMap bl, const BorrowSig& beta) {
  const auto& node = b->node;
  SourcePos pos = b->pos;
  if (const auto* r = std::get_if<Ret>(&node))
    return o_plus(r->var, {}, make_ret(r->var, pos), bl);

  if (const auto* c = std::get_if<Case>(&node)) {
    std::set<Var> fv_set = free_vars(b);
    std::vector<Var> fv(fv_set.begin(), fv_set.end());
    std::vector<CaseArm> arms;
    arms.reserve(c->arms.size());
    for (const auto& arm : c->arms)
      arms.push_back({arm.arity, o_minus(fv, rc_C(arm.body, bl, beta), bl)});
    return make_case(c->scrutinee, std::move(arms), pos);
  }

  if (std::holds_alternative<Inc>(node) || std::holds_alternative<Dec>(node))
    throw std::logic_error("rc pass requires a body without inc/dec");

  const auto& l = std::get<Let>(node);
  if (const auto* pj = std::get_if<Proj>(&l.expr)) {
    if (local_borrow(bl, pj->source) == Ownership::Owned) {
      Body rest = rc_C(l.rest, bl, beta);
      return make_let(l.var, l.expr, make_inc(l.var, o_minus_one(pj->source, std::move(rest), bl)),
                      pos);
    }
    LocalBorrowMap bl2 = bl;
    bl2[l.var] = Ownership::Borrowed;
    return make_let(l.var, l.expr, rc_C(l.rest, std::move(bl2), beta), pos);
  }
  if (std::holds_alternative<Reset>(l.expr))
    return make_let(l.var, l.expr, rc_C(l.rest, bl, beta), pos);

  Body rest = rc_C(l.rest, bl, beta);
  if (const auto* fa = std::get_if<FullApp>(&l.expr)) {
    auto it = beta.find(fa->fn);
    if (it == beta.end()) throw std::logic_error("insert_rc: unknown constant " + fa->fn);
    return rc_C_app(fa->args, it->second, l.var, l.expr, pos, std::move(rest), bl);
  }
  if (const auto* pa = std::get_if<PartApp>(&l.expr)) {
    auto it = beta.find(pa->fn);
    if (it == beta.end()) throw std::logic_error("insert_rc: unknown constant " + pa->fn);
    return rc_C_app(pa->args, it->second, l.var, l.expr, pos, std::move(rest), bl);
  }
  if (const auto* va = std::get_if<VarApp>(&l.expr)) {
    std::vector<Var> args{va->fn, va->arg};
    std::vector<Ownership> bs{Ownership::Owned, Ownership::Owned};
    return rc_C_app(args, bs, l.var, l.expr, pos, std::move(rest), bl);
  }
  if (const auto* ct = std::get_if<Ctor>(&l.expr)) {
    std::vector<Ownership> bs(ct->args.size(), Ownership::Owned);
    return rc_C_app(ct->args, bs, l.var, l.expr, pos, std::move(rest), bl);
  }
  const auto& ru = std::get<Reuse>(l.expr);
  std::vector<Ownership> bs(ru.args.size(), Ownership::Owned);
  return rc_C_app(ru.args, bs, l.var, l.expr, pos, std::move(rest), bl);
}

Program insert_rc(const Program& p, const BorrowSig& beta) {
  Program out;
  for (const auto& [name, fn] : p.defs) {
    auto it = beta.find(name);
    if (it == beta.end()) throw std::logic_error("insert_rc: no borrow signature for " + name);
    const auto& sig = it->second;
    LocalBorrowMap bl;
    for (size_t i = 0; i < fn.params.size() && i < sig.size(); ++i) bl[fn.params[i]] = sig[i];
    Fn nf = fn;
    nf.borrows = sig;
    nf.body = o_minus(fn.params, rc_C(fn.body, bl, beta), bl);
    out.add(name, std::move(nf));
  }
  return out;
}

namespace {

Body strip_body(const Body& b) {
  const auto& node = b->node;
  if (std::holds_alternative<Ret>(node)) return b;
  if (const auto* l = std::get_if<Let>(&node))
    return make_let(l->var, l->expr, strip_body(l->rest), b->pos);
  if (const auto* c = std::get_if<Case>(&node)) {
    std::vector<CaseArm> arms;
    arms.reserve(c->arms.size());
    for (const auto& arm : c->arms) arms.push_back({arm.arity, strip_body(arm.body)});
    return make_case(c->scrutinee, std::move(arms), b->pos);
  }
  if (const auto* i = std::get_if<Inc>(&node)) return strip_body(i->rest);
  return strip_body(std::get<Dec>(node).rest);
}

}  // namespace

Program strip_inc_dec(const Program& p) {
  Program out;
  for (const auto& [name, fn] : p.defs) {
    Fn nf = fn;
    nf.body = strip_body(fn.body);
    out.add(name, std::move(nf));
  }
  return out;
}

}  // namespace rcir
