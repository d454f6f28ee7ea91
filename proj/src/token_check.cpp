#include "rcir/token_check.hpp"

#include <functional>
#include <map>

#include "rcir/borrow_pass.hpp"

namespace rcir {

namespace {

struct TokenChecker {
  const Program& prog;
  std::vector<TokenViolation>& out;
  Const current;
  size_t paths = 0;
  static constexpr size_t kMaxPaths = 1 << 16;

  void report(SourcePos pos, std::string msg) {
    out.push_back({current, pos, std::move(msg)});
  }

  using Tokens = std::map<Var, long>;

  void consume(Tokens& t, const Var& v, SourcePos pos, const char* how) {
    long& n = t[v];
    if (n <= 0) {
      report(pos, "'" + v + "' consumed as " + how + " without holding a token");
      return;
    }
    --n;
  }

  void walk(const Body& b, Tokens t) {
    if (++paths > kMaxPaths) throw std::runtime_error("token check: too many control paths");
    const Body* cur = &b;
    for (;;) {
      const auto& node = (*cur)->node;
      SourcePos pos = (*cur)->pos;
      if (const auto* r = std::get_if<Ret>(&node)) {
        consume(t, r->var, pos, "the returned value");
        for (const auto& [v, n] : t) {
          if (n > 0)
            report(pos, "'" + v + "' still holds " + std::to_string(n) +
                            " unconsumed token(s) at return");
        }
        return;
      }
      if (const auto* i = std::get_if<Inc>(&node)) {
        ++t[i->var];
        cur = &i->rest;
        continue;
      }
      if (const auto* d = std::get_if<Dec>(&node)) {
        consume(t, d->var, pos, "a dec target");
        cur = &d->rest;
        continue;
      }
      if (const auto* c = std::get_if<Case>(&node)) {
        for (const auto& arm : c->arms) walk(arm.body, t);
        return;
      }
      const auto& l = std::get<Let>(node);
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, FullApp>) {
              const Fn* callee = prog.find(x.fn);
              if (!callee) {
                report(pos, "call of unknown constant '" + x.fn + "'");
              } else {
                for (size_t i = 0; i < x.args.size(); ++i) {
                  Ownership o = i < callee->borrows.size() ? callee->borrows[i]
                                                           : Ownership::Owned;
                  if (o == Ownership::Owned)
                    consume(t, x.args[i], pos, "an owned call argument");
                }
              }
              t[l.var] += 1;
            } else if constexpr (std::is_same_v<T, PartApp>) {
              const Fn* callee = prog.find(x.fn);
              if (!callee) {
                report(pos, "pap of unknown constant '" + x.fn + "'");
              } else {
                for (Ownership o : callee->borrows) {
                  if (o == Ownership::Borrowed) {
                    report(pos, "pap of '" + x.fn +
                                    "' whose signature still has borrowed parameters");
                    break;
                  }
                }
              }
              for (const auto& a : x.args) consume(t, a, pos, "a pap argument");
              t[l.var] += 1;
            } else if constexpr (std::is_same_v<T, VarApp>) {
              consume(t, x.fn, pos, "a variable-application callee");
              consume(t, x.arg, pos, "a variable-application argument");
              t[l.var] += 1;
            } else if constexpr (std::is_same_v<T, Ctor>) {
              for (const auto& a : x.args) consume(t, a, pos, "a constructor argument");
              t[l.var] += 1;
            } else if constexpr (std::is_same_v<T, Proj>) {
              // a projection borrows from its source and yields no token
              t[l.var] += 0;
            } else if constexpr (std::is_same_v<T, Reset>) {
              consume(t, x.target, pos, "a reset target");
              t[l.var] += 1;
            } else {
              consume(t, x.token, pos, "a reuse token");
              for (const auto& a : x.args) consume(t, a, pos, "a constructor argument");
              t[l.var] += 1;
            }
          },
          l.expr);
      cur = &l.rest;
    }
  }

  void check_fn(const Const& name, const Fn& fn) {
    current = name;
    paths = 0;
    Tokens t;
    for (size_t i = 0; i < fn.params.size(); ++i) {
      Ownership o = i < fn.borrows.size() ? fn.borrows[i] : Ownership::Owned;
      t[fn.params[i]] = o == Ownership::Owned ? 1 : 0;
    }
    walk(fn.body, std::move(t));
  }
};

}  // namespace

std::vector<TokenViolation> check_token_balance(const Program& p) {
  std::vector<TokenViolation> out;
  TokenChecker tc{p, out, {}};
  for (const auto& [name, fn] : p.defs) tc.check_fn(name, fn);
  return out;
}

namespace {

struct TailChecker {
  std::vector<std::string>* diags;
  Const current;
  bool ok = true;

  void fail(const std::string& msg) {
    ok = false;
    if (diags) diags->push_back("[" + current + "] " + msg);
  }

  // skip instructions the rc pipeline may insert between matched ones
  static const Body* skip_inserted(const Body* b) {
    for (;;) {
      const auto& node = (*b)->node;
      if (const auto* i = std::get_if<Inc>(&node)) {
        b = &i->rest;
        continue;
      }
      if (const auto* d = std::get_if<Dec>(&node)) {
        b = &d->rest;
        continue;
      }
      if (const auto* l = std::get_if<Let>(&node)) {
        if (std::holds_alternative<Reset>(l->expr)) {
          b = &l->rest;
          continue;
        }
      }
      return b;
    }
  }

  static bool expr_matches(const Expr& pure, const Expr& rc) {
    if (const auto* ct = std::get_if<Ctor>(&pure)) {
      if (const auto* ru = std::get_if<Reuse>(&rc))
        return ct->index == ru->index && ct->args == ru->args;
    }
    if (const auto* pa = std::get_if<PartApp>(&pure)) {
      if (const auto* pb = std::get_if<PartApp>(&rc))
        return pa->args == pb->args &&
               (pa->fn == pb->fn || "%own_" + pa->fn == pb->fn);
    }
    return expr_equal(pure, rc);
  }

  void walk(const Body& pure, const Body& rc) {
    if (!ok) return;
    const Body* r = skip_inserted(&rc);
    const auto& pnode = pure->node;
    const auto& rnode = (*r)->node;
    if (const auto* pr = std::get_if<Ret>(&pnode)) {
      const auto* rr = std::get_if<Ret>(&rnode);
      if (!rr || rr->var != pr->var) fail("return of '" + pr->var + "' not preserved");
      return;
    }
    if (const auto* pl = std::get_if<Let>(&pnode)) {
      const auto* rl = std::get_if<Let>(&rnode);
      if (!rl || rl->var != pl->var || !expr_matches(pl->expr, rl->expr)) {
        fail("binding of '" + pl->var + "' not found in compiled output");
        return;
      }
      // tail call: let r = call c xs; ret r must stay adjacent
      if (std::holds_alternative<FullApp>(pl->expr)) {
        if (const auto* pret = std::get_if<Ret>(&pl->rest->node)) {
          if (pret->var == pl->var) {
            const auto* rret = std::get_if<Ret>(&rl->rest->node);
            if (!rret || rret->var != pl->var) {
              fail("tail call bound to '" + pl->var + "' is no longer a tail call");
              return;
            }
          }
        }
      }
      walk(pl->rest, rl->rest);
      return;
    }
    if (const auto* pc = std::get_if<Case>(&pnode)) {
      const auto* rcs = std::get_if<Case>(&rnode);
      if (!rcs || rcs->scrutinee != pc->scrutinee || rcs->arms.size() != pc->arms.size()) {
        fail("case on '" + pc->scrutinee + "' not preserved");
        return;
      }
      for (size_t i = 0; i < pc->arms.size(); ++i) walk(pc->arms[i].body, rcs->arms[i].body);
      return;
    }
    fail("unexpected instruction in pure input");
  }
};

}  // namespace

bool tail_calls_preserved(const Program& pure, const Program& rc,
                          std::vector<std::string>* diagnostics) {
  TailChecker tc{diagnostics, {}};
  for (const auto& [name, fn] : pure.defs) {
    const Fn* compiled = rc.find(name);
    if (!compiled) {
      tc.current = name;
      tc.fail("definition missing from compiled program");
      continue;
    }
    tc.current = name;
    tc.walk(fn.body, compiled->body);
  }
  return tc.ok;
}

}  // namespace rcir
