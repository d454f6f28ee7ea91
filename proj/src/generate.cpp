#include "rcir/generate.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

namespace rcir {

namespace {

struct DType {
  // ctor i (0-based here, 1-based in the IR) lists its field type ids;
  // ctor 0 is always nullary so every type has a base value
  std::vector<std::vector<int>> ctors;
};

struct GFn {
  Const name;
  std::vector<int> param_types;
  int ret_type = 0;
  bool recursive = false;  // may call itself on a strict subterm of param 0
};

struct VarInfo {
  Var name;
  int type = -1;              // data type id; -1 for closures
  bool decreasing = false;    // strict subterm of the recursion parameter
  int known_ctor = -1;        // 0-based ctor index when refined by a case arm
  // closure bookkeeping
  bool is_closure = false;
  Const closure_target;
  size_t closure_applied = 0;
};

class Gen {
 public:
  explicit Gen(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  Program run() {
    make_types();
    make_signatures();
    Program p;
    for (auto& g : fns_) {
      p.add(g.name, gen_fn(g));
    }
    GFn main_fn;
    main_fn.name = "main";
    main_fn.ret_type = pick_type();
    main_fn.recursive = false;
    p.add("main", gen_fn(main_fn));
    return remove_dead_lets(p);
  }

 private:
  int rnd(int n) { return n <= 1 ? 0 : static_cast<int>(rng_() % static_cast<unsigned>(n)); }
  bool coin(int pct) { return rnd(100) < pct; }

  void make_types() {
    int ntypes = 1 + rnd(3);
    for (int t = 0; t < ntypes; ++t) {
      DType d;
      d.ctors.push_back({});  // nullary base
      int extra = 1 + rnd(3);
      for (int c = 0; c < extra; ++c) {
        int arity = 1 + rnd(std::max(1, cfg_.max_ctor_arity));
        std::vector<int> fields;
        for (int f = 0; f < arity; ++f) fields.push_back(rnd(t + 1));  // self or earlier
        d.ctors.push_back(std::move(fields));
      }
      types_.push_back(std::move(d));
    }
  }

  int pick_type() { return rnd(static_cast<int>(types_.size())); }

  void make_signatures() {
    int n = 1 + rnd(cfg_.max_fns);
    for (int i = 0; i < n; ++i) {
      GFn g;
      g.name = "f" + std::to_string(i);
      int nparams = rnd(4);
      for (int k = 0; k < nparams; ++k) g.param_types.push_back(pick_type());
      g.ret_type = pick_type();
      g.recursive = !g.param_types.empty() && coin(55);
      fns_.push_back(std::move(g));
    }
  }

  Var fresh() { return "v" + std::to_string(var_counter_++); }

  // --- body generation -----------------------------------------------------

  struct Ctx {
    std::vector<VarInfo> scope;
    int budget = 0;
    int start_budget = 0;
    int case_depth = 0;
  };

  const GFn* self_ = nullptr;

  std::optional<size_t> find_var(const Ctx& cx, int type) {
    std::vector<size_t> hits;
    for (size_t i = 0; i < cx.scope.size(); ++i) {
      if (!cx.scope[i].is_closure && cx.scope[i].type == type) hits.push_back(i);
    }
    if (hits.empty()) return std::nullopt;
    return hits[static_cast<size_t>(rnd(static_cast<int>(hits.size())))];
  }

  // emits lets that build a base value of the requested type
  Var materialize(Ctx& cx, int type, std::vector<std::pair<Var, Expr>>& prefix) {
    Var v = fresh();
    prefix.emplace_back(v, Ctor{1, {}});
    VarInfo info;
    info.name = v;
    info.type = type;
    cx.scope.push_back(info);
    return v;
  }

  Var var_or_materialize(Ctx& cx, int type, std::vector<std::pair<Var, Expr>>& prefix) {
    if (auto i = find_var(cx, type)) return cx.scope[*i].name;
    return materialize(cx, type, prefix);
  }

  Body wrap_prefix(std::vector<std::pair<Var, Expr>>& prefix, Body rest) {
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
      rest = make_let(it->first, it->second, rest);
    return rest;
  }

  Body finish(Ctx cx, int ret_type) {
    std::vector<std::pair<Var, Expr>> prefix;
    Var v = var_or_materialize(cx, ret_type, prefix);
    return wrap_prefix(prefix, make_ret(v));
  }

  Body gen_body(Ctx cx, int ret_type) {
    if (cx.budget <= 0) return finish(std::move(cx), ret_type);

    int roll = rnd(100);

    // finish early only once at least half the budget is spent
    if (roll >= 90 && 2 * cx.budget <= cx.start_budget)
      return finish(std::move(cx), ret_type);

    // case split on a data variable
    if (roll < 22 && cx.case_depth < 2) {
      std::vector<size_t> candidates;
      for (size_t i = 0; i < cx.scope.size(); ++i) {
        if (!cx.scope[i].is_closure && cx.scope[i].known_ctor < 0) candidates.push_back(i);
      }
      if (!candidates.empty()) {
        size_t vi = candidates[static_cast<size_t>(rnd(static_cast<int>(candidates.size())))];
        VarInfo scrut = cx.scope[vi];
        const DType& dt = types_[static_cast<size_t>(scrut.type)];
        std::vector<CaseArm> arms;
        int per_arm = cx.budget / std::max<int>(1, static_cast<int>(dt.ctors.size()));
        for (size_t c = 0; c < dt.ctors.size(); ++c) {
          Ctx arm_cx = cx;
          arm_cx.budget = per_arm;
          arm_cx.case_depth = cx.case_depth + 1;
          arm_cx.scope[vi].known_ctor = static_cast<int>(c);
          arms.push_back({static_cast<int>(dt.ctors[c].size()), gen_body(arm_cx, ret_type)});
        }
        return make_case(scrut.name, std::move(arms), {});
      }
    }

    // destructure a refined variable and rebuild a value of its type; the
    // classic shape the reset/reuse heuristic targets
    if (roll < 30) {
      std::vector<size_t> candidates;
      for (size_t i = 0; i < cx.scope.size(); ++i) {
        const VarInfo& v = cx.scope[i];
        if (!v.is_closure && v.known_ctor >= 0 &&
            !types_[static_cast<size_t>(v.type)].ctors[static_cast<size_t>(v.known_ctor)].empty())
          candidates.push_back(i);
      }
      if (!candidates.empty()) {
        size_t vi = candidates[static_cast<size_t>(rnd(static_cast<int>(candidates.size())))];
        VarInfo src = cx.scope[vi];
        const auto& fields =
            types_[static_cast<size_t>(src.type)].ctors[static_cast<size_t>(src.known_ctor)];
        std::vector<std::pair<Var, Expr>> prefix;
        std::vector<Var> args;
        for (size_t fi = 0; fi < fields.size(); ++fi) {
          Var pv = fresh();
          prefix.emplace_back(pv, Proj{static_cast<int>(fi) + 1, src.name});
          VarInfo info;
          info.name = pv;
          info.type = fields[fi];
          info.decreasing =
              (src.decreasing || is_rec_param(src.name)) && info.type == rec_param_type();
          cx.scope.push_back(info);
          args.push_back(pv);
        }
        Var v = fresh();
        VarInfo info;
        info.name = v;
        info.type = src.type;
        info.known_ctor = src.known_ctor;
        cx.scope.push_back(info);
        cx.budget -= 1 + static_cast<int>(prefix.size());
        Body rest = gen_body(std::move(cx), ret_type);
        return wrap_prefix(
            prefix, make_let(v, Ctor{src.known_ctor + 1, args}, std::move(rest)));
      }
    }

    // projection from a refined variable
    if (roll < 34) {
      std::vector<size_t> candidates;
      for (size_t i = 0; i < cx.scope.size(); ++i) {
        const VarInfo& v = cx.scope[i];
        if (!v.is_closure && v.known_ctor >= 0 &&
            !types_[static_cast<size_t>(v.type)].ctors[static_cast<size_t>(v.known_ctor)].empty())
          candidates.push_back(i);
      }
      if (!candidates.empty()) {
        size_t vi = candidates[static_cast<size_t>(rnd(static_cast<int>(candidates.size())))];
        VarInfo src = cx.scope[vi];
        const auto& fields =
            types_[static_cast<size_t>(src.type)].ctors[static_cast<size_t>(src.known_ctor)];
        int fi = rnd(static_cast<int>(fields.size()));
        Var v = fresh();
        VarInfo info;
        info.name = v;
        info.type = fields[static_cast<size_t>(fi)];
        info.decreasing = (src.decreasing || is_rec_param(src.name)) && info.type == rec_param_type();
        cx.scope.push_back(info);
        cx.budget -= 1;
        Body rest = gen_body(std::move(cx), ret_type);
        return make_let(v, Proj{fi + 1, src.name}, std::move(rest));
      }
    }

    // constructor application (also the default action)
    if (roll < 58) return ctor_step(std::move(cx), ret_type);

    // full call: earlier function, or self on a strict subterm
    if (roll < 82 && !fns_.empty()) {
      std::vector<const GFn*> callable;
      for (const auto& g : fns_) {
        if (self_ && g.name == self_->name) break;  // only earlier definitions
        callable.push_back(&g);
      }
      if (self_ && self_->recursive) {
        for (const auto& v : cx.scope) {
          if (v.decreasing) {
            callable.push_back(self_);
            break;
          }
        }
      }
      if (!callable.empty()) {
        const GFn* g = callable[static_cast<size_t>(rnd(static_cast<int>(callable.size())))];
        std::vector<std::pair<Var, Expr>> prefix;
        std::vector<Var> args;
        bool viable = true;
        for (size_t i = 0; i < g->param_types.size(); ++i) {
          if (g == self_ && i == 0) {
            std::vector<const VarInfo*> dec;
            for (const auto& v : cx.scope) {
              if (v.decreasing) dec.push_back(&v);
            }
            if (dec.empty()) {
              viable = false;
              break;
            }
            args.push_back(dec[static_cast<size_t>(rnd(static_cast<int>(dec.size())))]->name);
          } else {
            args.push_back(var_or_materialize(cx, g->param_types[i], prefix));
          }
        }
        if (viable) {
          Var v = fresh();
          VarInfo info;
          info.name = v;
          info.type = g->ret_type;
          cx.scope.push_back(info);
          cx.budget -= 1 + static_cast<int>(prefix.size());
          Body rest = gen_body(std::move(cx), ret_type);
          return wrap_prefix(prefix, make_let(v, FullApp{g->name, args}, std::move(rest)));
        }
      }
    }

    // partial application chain finished off with vapps
    if (roll < 90) {
      std::vector<const GFn*> cands;
      for (const auto& g : fns_) {
        if (self_ && g.name == self_->name) break;
        if (!g.param_types.empty() && !g.recursive) cands.push_back(&g);
      }
      if (!cands.empty()) {
        const GFn* g = cands[static_cast<size_t>(rnd(static_cast<int>(cands.size())))];
        size_t stored = static_cast<size_t>(rnd(static_cast<int>(g->param_types.size())));
        std::vector<std::pair<Var, Expr>> prefix;
        std::vector<Var> args;
        for (size_t i = 0; i < stored; ++i)
          args.push_back(var_or_materialize(cx, g->param_types[i], prefix));
        Var h = fresh();
        prefix.emplace_back(h, PartApp{g->name, args});
        Var cur = h;
        for (size_t i = stored; i < g->param_types.size(); ++i) {
          Var a = var_or_materialize(cx, g->param_types[i], prefix);
          Var nxt = fresh();
          prefix.emplace_back(nxt, VarApp{cur, a});
          cur = nxt;
        }
        VarInfo info;
        info.name = cur;
        info.type = g->ret_type;
        cx.scope.push_back(info);
        cx.budget -= static_cast<int>(prefix.size());
        Body rest = gen_body(std::move(cx), ret_type);
        return wrap_prefix(prefix, std::move(rest));
      }
    }

    // nothing else applied: keep the body growing until half the budget is
    // spent, then return
    if (2 * cx.budget > cx.start_budget) return ctor_step(std::move(cx), ret_type);
    return finish(std::move(cx), ret_type);
  }

  Body ctor_step(Ctx cx, int ret_type) {
    int t = pick_type();
    const DType& dt = types_[static_cast<size_t>(t)];
    int c = rnd(static_cast<int>(dt.ctors.size()));
    std::vector<std::pair<Var, Expr>> prefix;
    std::vector<Var> args;
    for (int ft : dt.ctors[static_cast<size_t>(c)])
      args.push_back(var_or_materialize(cx, ft, prefix));
    Var v = fresh();
    VarInfo info;
    info.name = v;
    info.type = t;
    info.known_ctor = c;
    cx.scope.push_back(info);
    cx.budget -= 1 + static_cast<int>(prefix.size());
    Body rest = gen_body(std::move(cx), ret_type);
    return wrap_prefix(prefix, make_let(v, Ctor{c + 1, args}, std::move(rest)));
  }

  bool is_rec_param(const Var& v) const {
    return self_ && self_->recursive && !self_->param_types.empty() && v == rec_param_name_;
  }
  int rec_param_type() const {
    return self_ && !self_->param_types.empty() ? self_->param_types[0] : -1;
  }

  Fn gen_fn(const GFn& g) {
    self_ = &g;
    var_counter_ = 0;
    Ctx cx;
    cx.budget = g.name == "main" ? cfg_.max_body_len : 1 + rnd(cfg_.max_body_len);
    cx.start_budget = cx.budget;
    std::vector<Var> params;
    for (size_t i = 0; i < g.param_types.size(); ++i) {
      Var p = "p" + std::to_string(i);
      params.push_back(p);
      VarInfo info;
      info.name = p;
      info.type = g.param_types[i];
      cx.scope.push_back(info);
    }
    rec_param_name_ = params.empty() ? Var{} : params[0];
    Fn fn = make_fn(params, gen_body(std::move(cx), g.ret_type));
    self_ = nullptr;
    return fn;
  }

  // --- dead-let elimination -------------------------------------------------

  static Body drop_dead(const Body& b, bool& changed) {
    const auto& node = b->node;
    if (std::holds_alternative<Ret>(node)) return b;
    if (const auto* l = std::get_if<Let>(&node)) {
      Body rest = drop_dead(l->rest, changed);
      if (!occurs(l->var, rest)) {
        changed = true;
        return rest;
      }
      if (rest == l->rest) return b;
      return make_let(l->var, l->expr, rest, b->pos);
    }
    if (const auto* c = std::get_if<Case>(&node)) {
      std::vector<CaseArm> arms;
      bool any = false;
      for (const auto& arm : c->arms) {
        Body nb = drop_dead(arm.body, changed);
        any = any || nb != arm.body;
        arms.push_back({arm.arity, nb});
      }
      if (!any) return b;
      return make_case(c->scrutinee, std::move(arms), b->pos);
    }
    if (const auto* i = std::get_if<Inc>(&node)) {
      Body rest = drop_dead(i->rest, changed);
      return rest == i->rest ? b : make_inc(i->var, rest, b->pos);
    }
    const auto& d = std::get<Dec>(node);
    Body rest = drop_dead(d.rest, changed);
    return rest == d.rest ? b : make_dec(d.var, rest, b->pos);
  }

  static Program remove_dead_lets(const Program& p) {
    Program out;
    for (const auto& [name, fn] : p.defs) {
      Fn nf = fn;
      bool changed = true;
      while (changed) {
        changed = false;
        nf.body = drop_dead(nf.body, changed);
      }
      out.add(name, std::move(nf));
    }
    return out;
  }

  GenConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<DType> types_;
  std::vector<GFn> fns_;
  int var_counter_ = 0;
  Var rec_param_name_;
};

}  // namespace

Program gen_program(const GenConfig& cfg) {
  Gen g(cfg);
  return g.run();
}

}  // namespace rcir
