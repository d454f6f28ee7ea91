#include "rcir/borrow_pass.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <vector>

namespace rcir {

bool is_owned_wrapper_name(const Const& c) { return c.rfind("%own_", 0) == 0; }

std::set<Var> collect_owned(const Body& b, const Program& p, const BorrowSig& beta) {
  std::set<Var> s;
  const auto& node = b->node;
  if (std::holds_alternative<Ret>(node)) return s;
  if (const auto* c = std::get_if<Case>(&node)) {
    for (const auto& arm : c->arms) {
      auto sub = collect_owned(arm.body, p, beta);
      s.insert(sub.begin(), sub.end());
    }
    return s;
  }
  if (const auto* i = std::get_if<Inc>(&node)) return collect_owned(i->rest, p, beta);
  if (const auto* d = std::get_if<Dec>(&node)) return collect_owned(d->rest, p, beta);

  const auto& l = std::get<Let>(node);
  s = collect_owned(l.rest, p, beta);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Reset>) {
          s.insert(x.target);
        } else if constexpr (std::is_same_v<T, FullApp>) {
          auto it = beta.find(x.fn);
          if (it == beta.end())
            throw BorrowError("unknown constant '" + x.fn + "' in application");
          for (size_t i = 0; i < x.args.size() && i < it->second.size(); ++i) {
            if (it->second[i] == Ownership::Owned) s.insert(x.args[i]);
          }
        } else if constexpr (std::is_same_v<T, VarApp>) {
          s.insert(x.fn);
          s.insert(x.arg);
        } else if constexpr (std::is_same_v<T, PartApp>) {
          if (is_owned_wrapper_name(x.fn)) s.insert(x.args.begin(), x.args.end());
        } else if constexpr (std::is_same_v<T, Proj>) {
          if (s.count(l.var)) s.insert(x.source);
        }
        // ctor and reuse arguments do not force ownedness here, even though
        // the rc pass treats them as owned consumers
      },
      l.expr);
  return s;
}

std::set<Var> reset_roots(const Body& b) {
  std::set<Var> s;
  const auto& node = b->node;
  if (std::holds_alternative<Ret>(node)) return s;
  if (const auto* c = std::get_if<Case>(&node)) {
    for (const auto& arm : c->arms) {
      auto sub = reset_roots(arm.body);
      s.insert(sub.begin(), sub.end());
    }
    return s;
  }
  if (const auto* i = std::get_if<Inc>(&node)) return reset_roots(i->rest);
  if (const auto* d = std::get_if<Dec>(&node)) return reset_roots(d->rest);
  const auto& l = std::get<Let>(node);
  s = reset_roots(l.rest);
  if (const auto* r = std::get_if<Reset>(&l.expr)) s.insert(r->target);
  if (const auto* pj = std::get_if<Proj>(&l.expr)) {
    if (s.count(l.var)) s.insert(pj->source);
  }
  return s;
}

namespace {

// Tarjan strongly connected components over the call graph (full and partial
// applications). Components come out callee-first.
struct Sccs {
  std::vector<std::vector<size_t>> components;
};

Sccs call_graph_sccs(const Program& p) {
  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < p.defs.size(); ++i) index[p.defs[i].first] = i;

  std::vector<std::set<size_t>> edges(p.defs.size());
  std::function<void(size_t, const Body&)> scan = [&](size_t from, const Body& b) {
    const auto& node = b->node;
    if (const auto* l = std::get_if<Let>(&node)) {
      const Const* target = nullptr;
      if (const auto* fa = std::get_if<FullApp>(&l->expr)) target = &fa->fn;
      if (const auto* pa = std::get_if<PartApp>(&l->expr)) target = &pa->fn;
      if (target) {
        auto it = index.find(*target);
        if (it != index.end()) edges[from].insert(it->second);
      }
      scan(from, l->rest);
    } else if (const auto* c = std::get_if<Case>(&node)) {
      for (const auto& arm : c->arms) scan(from, arm.body);
    } else if (const auto* i = std::get_if<Inc>(&node)) {
      scan(from, i->rest);
    } else if (const auto* d = std::get_if<Dec>(&node)) {
      scan(from, d->rest);
    }
  };
  for (size_t i = 0; i < p.defs.size(); ++i) scan(i, p.defs[i].second.body);

  Sccs out;
  std::vector<int> idx(p.defs.size(), -1), low(p.defs.size(), 0);
  std::vector<bool> on_stack(p.defs.size(), false);
  std::vector<size_t> stack;
  int counter = 0;

  // iterative Tarjan
  struct Frame {
    size_t v;
    std::set<size_t>::const_iterator it;
  };
  for (size_t root = 0; root < p.defs.size(); ++root) {
    if (idx[root] != -1) continue;
    std::vector<Frame> frames;
    frames.push_back({root, edges[root].begin()});
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.it != edges[f.v].end()) {
        size_t w = *f.it;
        ++f.it;
        if (idx[w] == -1) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, edges[w].begin()});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
      } else {
        size_t v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == idx[v]) {
          std::vector<size_t> comp;
          for (;;) {
            size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == v) break;
          }
          out.components.push_back(std::move(comp));
        }
      }
    }
  }
  return out;
}

// Local borrow map used by the tail-call refinement, mirroring the one the rc
// pass builds: parameters per beta, proj of borrowed is borrowed, everything
// else owned.
void tail_call_flips(const Const& name, const Fn& fn, const BorrowSig& beta,
                     std::vector<std::pair<Const, size_t>>& flips) {
  std::map<Var, Ownership> bl;
  const auto& sig = beta.at(name);
  for (size_t i = 0; i < fn.params.size() && i < sig.size(); ++i) bl[fn.params[i]] = sig[i];
  auto lookup = [&](const Var& v) {
    auto it = bl.find(v);
    return it == bl.end() ? Ownership::Owned : it->second;
  };
  std::function<void(const Body&)> walk = [&](const Body& b) {
    const auto& node = b->node;
    if (const auto* l = std::get_if<Let>(&node)) {
      if (const auto* fa = std::get_if<FullApp>(&l->expr)) {
        if (const auto* r = std::get_if<Ret>(&l->rest->node)) {
          if (r->var == l->var && beta.count(fa->fn)) {
            const auto& callee_sig = beta.at(fa->fn);
            for (size_t i = 0; i < fa->args.size() && i < callee_sig.size(); ++i) {
              if (callee_sig[i] == Ownership::Borrowed &&
                  lookup(fa->args[i]) == Ownership::Owned)
                flips.emplace_back(fa->fn, i);
            }
          }
        }
      }
      if (const auto* pj = std::get_if<Proj>(&l->expr)) {
        if (lookup(pj->source) == Ownership::Borrowed) bl[l->var] = Ownership::Borrowed;
      }
      walk(l->rest);
    } else if (const auto* c = std::get_if<Case>(&node)) {
      for (const auto& arm : c->arms) walk(arm.body);
    } else if (const auto* i = std::get_if<Inc>(&node)) {
      walk(i->rest);
    } else if (const auto* d = std::get_if<Dec>(&node)) {
      walk(d->rest);
    }
  };
  walk(fn.body);
}

}  // namespace

BorrowSig infer_borrow(const Program& p, const InferOptions& opts) {
  BorrowSig beta;
  std::set<std::pair<Const, size_t>> frozen;  // manual '@' annotations
  for (const auto& [name, fn] : p.defs) {
    beta[name].assign(fn.params.size(), Ownership::Borrowed);
    for (size_t i = 0; i < fn.borrows.size(); ++i) {
      if (fn.borrows[i] == Ownership::Borrowed) frozen.insert({name, i});
    }
  }

  Sccs sccs = call_graph_sccs(p);

  bool outer_changed = true;
  while (outer_changed) {
    outer_changed = false;
    for (const auto& comp : sccs.components) {
      bool changed = true;
      while (changed) {
        changed = false;
        for (size_t i : comp) {
          const auto& [name, fn] = p.defs[i];
          auto owned = collect_owned(fn.body, p, beta);
          auto& sig = beta[name];
          for (size_t k = 0; k < fn.params.size(); ++k) {
            if (sig[k] == Ownership::Borrowed && owned.count(fn.params[k]) &&
                !frozen.count({name, k})) {
              sig[k] = Ownership::Owned;
              changed = true;
              outer_changed = true;
            }
          }
        }
      }
    }
    if (opts.tail_refine) {
      std::vector<std::pair<Const, size_t>> flips;
      for (const auto& [name, fn] : p.defs) tail_call_flips(name, fn, beta, flips);
      for (const auto& [c, i] : flips) {
        if (beta[c][i] == Ownership::Borrowed && !frozen.count({c, i})) {
          beta[c][i] = Ownership::Owned;
          outer_changed = true;
        }
      }
    }
  }

  // Reset safety for user assertions: a borrowed parameter must never reach a
  // reset. Inference would have flipped it; annotations instead fail loudly.
  for (const auto& [name, fn] : p.defs) {
    auto roots = reset_roots(fn.body);
    const auto& sig = beta[name];
    for (size_t i = 0; i < fn.params.size(); ++i) {
      if (sig[i] == Ownership::Borrowed && roots.count(fn.params[i]))
        throw BorrowError("parameter '" + fn.params[i] + "' of '" + name +
                          "' is annotated borrowed but reaches a reset");
    }
  }
  return beta;
}

BorrowSig all_owned_signature(const Program& p) {
  BorrowSig beta;
  for (const auto& [name, fn] : p.defs) {
    auto& sig = beta[name];
    sig.assign(fn.params.size(), Ownership::Owned);
    for (size_t i = 0; i < fn.borrows.size(); ++i) {
      if (fn.borrows[i] == Ownership::Borrowed) sig[i] = Ownership::Borrowed;
    }
    auto roots = reset_roots(fn.body);
    for (size_t i = 0; i < fn.params.size(); ++i) {
      if (sig[i] == Ownership::Borrowed && roots.count(fn.params[i]))
        throw BorrowError("parameter '" + fn.params[i] + "' of '" + name +
                          "' is annotated borrowed but reaches a reset");
    }
  }
  return beta;
}

namespace {

Body retarget_paps(const Body& b, const std::map<Const, Const>& renames) {
  const auto& node = b->node;
  if (std::holds_alternative<Ret>(node)) return b;
  if (const auto* l = std::get_if<Let>(&node)) {
    Expr e = l->expr;
    if (auto* pa = std::get_if<PartApp>(&e)) {
      auto it = renames.find(pa->fn);
      if (it != renames.end()) pa->fn = it->second;
    }
    return make_let(l->var, std::move(e), retarget_paps(l->rest, renames), b->pos);
  }
  if (const auto* c = std::get_if<Case>(&node)) {
    std::vector<CaseArm> arms;
    arms.reserve(c->arms.size());
    for (const auto& arm : c->arms) arms.push_back({arm.arity, retarget_paps(arm.body, renames)});
    return make_case(c->scrutinee, std::move(arms), b->pos);
  }
  if (const auto* i = std::get_if<Inc>(&node))
    return make_inc(i->var, retarget_paps(i->rest, renames), b->pos);
  const auto& d = std::get<Dec>(node);
  return make_dec(d.var, retarget_paps(d.rest, renames), b->pos);
}

void find_pap_targets(const Body& b, std::set<Const>& out) {
  const auto& node = b->node;
  if (const auto* l = std::get_if<Let>(&node)) {
    if (const auto* pa = std::get_if<PartApp>(&l->expr)) out.insert(pa->fn);
    find_pap_targets(l->rest, out);
  } else if (const auto* c = std::get_if<Case>(&node)) {
    for (const auto& arm : c->arms) find_pap_targets(arm.body, out);
  } else if (const auto* i = std::get_if<Inc>(&node)) {
    find_pap_targets(i->rest, out);
  } else if (const auto* d = std::get_if<Dec>(&node)) {
    find_pap_targets(d->rest, out);
  }
}

}  // namespace

std::pair<Program, BorrowSig> make_owned_wrappers(const Program& p, BorrowSig beta) {
  std::set<Const> pap_targets;
  for (const auto& [name, fn] : p.defs) find_pap_targets(fn.body, pap_targets);

  std::map<Const, Const> renames;
  for (const auto& [name, fn] : p.defs) {
    if (!pap_targets.count(name)) continue;
    const auto& sig = beta.at(name);
    bool any_borrowed =
        std::any_of(sig.begin(), sig.end(), [](Ownership o) { return o == Ownership::Borrowed; });
    if (any_borrowed) renames.emplace(name, "%own_" + name);
  }

  Program out;
  for (const auto& [name, fn] : p.defs) {
    Fn nf = fn;
    nf.body = retarget_paps(fn.body, renames);
    out.add(name, std::move(nf));
  }
  for (const auto& [name, fn] : p.defs) {
    auto it = renames.find(name);
    if (it == renames.end()) continue;
    if (out.contains(it->second)) continue;  // already wrapped upstream
    Var result = "%r";
    while (std::find(fn.params.begin(), fn.params.end(), result) != fn.params.end())
      result += "r";
    Fn wrapper = make_fn(fn.params, make_let(result, FullApp{name, fn.params},
                                             make_ret(result)));
    beta[it->second].assign(fn.params.size(), Ownership::Owned);
    out.add(it->second, std::move(wrapper));
  }
  return {std::move(out), std::move(beta)};
}

}  // namespace rcir
