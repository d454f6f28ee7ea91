#include "rcir/reuse_pass.hpp"

#include <stdexcept>

namespace rcir {

Body reuse_S(const Var& w, int n, const Body& b) {
  const auto& node = b->node;
  if (std::holds_alternative<Ret>(node)) return b;
  if (const auto* l = std::get_if<Let>(&node)) {
    if (const auto* c = std::get_if<Ctor>(&l->expr)) {
      if (static_cast<int>(c->args.size()) == n)
        return make_let(l->var, Reuse{w, c->index, c->args}, l->rest, b->pos);
    }
    Body rest2 = reuse_S(w, n, l->rest);
    if (rest2 == l->rest) return b;
    return make_let(l->var, l->expr, rest2, b->pos);
  }
  if (const auto* c = std::get_if<Case>(&node)) {
    std::vector<CaseArm> arms;
    arms.reserve(c->arms.size());
    bool changed = false;
    for (const auto& arm : c->arms) {
      Body nb = reuse_S(w, n, arm.body);
      changed = changed || nb != arm.body;
      arms.push_back({arm.arity, nb});
    }
    if (!changed) return b;
    return make_case(c->scrutinee, std::move(arms), b->pos);
  }
  if (const auto* i = std::get_if<Inc>(&node)) {
    Body rest2 = reuse_S(w, n, i->rest);
    if (rest2 == i->rest) return b;
    return make_inc(i->var, rest2, b->pos);
  }
  const auto& d = std::get<Dec>(node);
  Body rest2 = reuse_S(w, n, d.rest);
  if (rest2 == d.rest) return b;
  return make_dec(d.var, rest2, b->pos);
}

Body reuse_D(const Var& z, int n, const Body& b, FreshNames& fresh) {
  if (n <= 0) return b;  // zero-field cells are not worth reusing
  const auto& node = b->node;
  if (const auto* c = std::get_if<Case>(&node)) {
    std::vector<CaseArm> arms;
    arms.reserve(c->arms.size());
    bool changed = false;
    for (const auto& arm : c->arms) {
      Body nb = reuse_D(z, n, arm.body, fresh);
      changed = changed || nb != arm.body;
      arms.push_back({arm.arity, nb});
    }
    if (!changed) return b;
    return make_case(c->scrutinee, std::move(arms), b->pos);
  }
  if (std::holds_alternative<Ret>(node)) return b;
  if (const auto* l = std::get_if<Let>(&node)) {
    if (occurs_in_expr(z, l->expr) || occurs(z, l->rest)) {
      Body rest2 = reuse_D(z, n, l->rest, fresh);
      if (rest2 == l->rest) return b;
      return make_let(l->var, l->expr, rest2, b->pos);
    }
  }
  // z is dead from here on; insert a reset if some constructor can reuse it
  Var w = fresh.peek();
  Body substituted = reuse_S(w, n, b);
  if (substituted == b) return b;
  fresh.commit();
  return make_let(w, Reset{z}, substituted);
}

Body reuse_R(const Body& b, FreshNames& fresh) {
  const auto& node = b->node;
  if (std::holds_alternative<Ret>(node)) return b;
  if (const auto* l = std::get_if<Let>(&node))
    return make_let(l->var, l->expr, reuse_R(l->rest, fresh), b->pos);
  if (const auto* c = std::get_if<Case>(&node)) {
    std::vector<CaseArm> arms;
    arms.reserve(c->arms.size());
    for (const auto& arm : c->arms)
      arms.push_back({arm.arity, reuse_D(c->scrutinee, arm.arity, reuse_R(arm.body, fresh), fresh)});
    return make_case(c->scrutinee, std::move(arms), b->pos);
  }
  throw std::logic_error("reuse pass requires a body without inc/dec");
}

namespace {

std::uint64_t max_existing_token_counter(const Body& b) {
  std::uint64_t mx = 0;
  auto consider = [&](const Var& v) {
    if (v.rfind("%w", 0) != 0) return;
    std::uint64_t k = 0;
    bool digits = v.size() > 2;
    for (size_t i = 2; i < v.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(v[i]))) {
        digits = false;
        break;
      }
      k = k * 10 + static_cast<std::uint64_t>(v[i] - '0');
    }
    if (digits && k + 1 > mx) mx = k + 1;
  };
  const auto& node = b->node;
  if (const auto* l = std::get_if<Let>(&node)) {
    consider(l->var);
    mx = std::max(mx, max_existing_token_counter(l->rest));
  } else if (const auto* c = std::get_if<Case>(&node)) {
    for (const auto& arm : c->arms) mx = std::max(mx, max_existing_token_counter(arm.body));
  } else if (const auto* i = std::get_if<Inc>(&node)) {
    mx = std::max(mx, max_existing_token_counter(i->rest));
  } else if (const auto* d = std::get_if<Dec>(&node)) {
    mx = std::max(mx, max_existing_token_counter(d->rest));
  }
  return mx;
}

}  // namespace

Program insert_reset_reuse(const Program& p) {
  FreshNames fresh;
  for (const auto& [name, fn] : p.defs)
    fresh.counter = std::max(fresh.counter, max_existing_token_counter(fn.body));
  Program out;
  for (const auto& [name, fn] : p.defs) {
    Fn nf = fn;
    nf.body = reuse_R(fn.body, fresh);
    out.add(name, std::move(nf));
  }
  return out;
}

namespace {

Body erase_body(const Body& b) {
  const auto& node = b->node;
  if (std::holds_alternative<Ret>(node)) return b;
  if (const auto* l = std::get_if<Let>(&node)) {
    if (std::holds_alternative<Reset>(l->expr)) return erase_body(l->rest);
    if (const auto* r = std::get_if<Reuse>(&l->expr))
      return make_let(l->var, Ctor{r->index, r->args}, erase_body(l->rest), b->pos);
    return make_let(l->var, l->expr, erase_body(l->rest), b->pos);
  }
  if (const auto* c = std::get_if<Case>(&node)) {
    std::vector<CaseArm> arms;
    arms.reserve(c->arms.size());
    for (const auto& arm : c->arms) arms.push_back({arm.arity, erase_body(arm.body)});
    return make_case(c->scrutinee, std::move(arms), b->pos);
  }
  if (const auto* i = std::get_if<Inc>(&node)) return make_inc(i->var, erase_body(i->rest), b->pos);
  const auto& d = std::get<Dec>(node);
  return make_dec(d.var, erase_body(d.rest), b->pos);
}

}  // namespace

Program erase_reset_reuse(const Program& p) {
  Program out;
  for (const auto& [name, fn] : p.defs) {
    Fn nf = fn;
    nf.body = erase_body(fn.body);
    out.add(name, std::move(nf));
  }
  return out;
}

}  // namespace rcir
