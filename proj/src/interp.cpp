#include "rcir/interp.hpp"

#include <algorithm>
#include <sstream>

namespace rcir {

const char* run_error_kind_name(RunErrorKind k) {
  switch (k) {
    case RunErrorKind::RcUnderflow: return "RcUnderflow";
    case RunErrorKind::UseAfterFree: return "UseAfterFree";
    case RunErrorKind::ReuseSizeMismatch: return "ReuseSizeMismatch";
    case RunErrorKind::CaseOnPap: return "CaseOnPap";
    case RunErrorKind::ProjOutOfRange: return "ProjOutOfRange";
    case RunErrorKind::Leak: return "Leak";
    case RunErrorKind::UnknownConst: return "UnknownConst";
    case RunErrorKind::ResetOnPap: return "ResetOnPap";
    case RunErrorKind::NullTokenUse: return "NullTokenUse";
    case RunErrorKind::ArityMismatch: return "ArityMismatch";
    case RunErrorKind::CaseArmMissing: return "CaseArmMissing";
    case RunErrorKind::ApplyOnCtor: return "ApplyOnCtor";
    case RunErrorKind::UnboundVar: return "UnboundVar";
    case RunErrorKind::EntryNotNullary: return "EntryNotNullary";
    case RunErrorKind::StepLimit: return "StepLimit";
  }
  return "?";
}

RunError::RunError(RunErrorKind kind, std::string msg, SourcePos pos)
    : kind(kind), message(std::move(msg)), pos(pos) {
  text = std::string(run_error_kind_name(kind)) + ": " + message;
  if (pos.line > 0)
    text += " (at " + std::to_string(pos.line) + ":" + std::to_string(pos.col) + ")";
}

std::uint64_t RunStats::reset_uniq_total() const {
  std::uint64_t n = 0;
  for (const auto& [k, v] : reset_sites) n += v.uniq;
  return n;
}

std::uint64_t RunStats::reset_shared_total() const {
  std::uint64_t n = 0;
  for (const auto& [k, v] : reset_sites) n += v.shared;
  return n;
}

std::string RunStats::to_text() const {
  std::ostringstream out;
  out << "allocations=" << allocations << '\n';
  out << "reuse_uniq=" << reuse_uniq << '\n';
  out << "reuse_fresh=" << reuse_fresh << '\n';
  out << "reset_uniq=" << reset_uniq_total() << '\n';
  out << "reset_shared=" << reset_shared_total() << '\n';
  for (const auto& [site, n] : reset_sites)
    out << "reset[" << site.first << '.' << site.second << "]=" << n.uniq << '/' << n.shared
        << '\n';
  out << "inc_ops=" << inc_ops << '\n';
  out << "dec_ops=" << dec_ops << '\n';
  out << "atomic_rc_ops=" << atomic_rc_ops << '\n';
  out << "peak_live=" << peak_live << '\n';
  out << "final_live=" << final_live << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Heap
// ---------------------------------------------------------------------------

void Heap::count_rc_op(const HeapCell& c, bool is_inc) {
  if (is_inc)
    ++stats_->inc_ops;
  else
    ++stats_->dec_ops;
  if (c.tag == ThreadTag::MultiThreaded) ++stats_->atomic_rc_ops;
}

Loc Heap::alloc_ctor(int index, std::vector<Loc> fields) {
  Loc l = next_++;
  ++stats_->allocations;
  ++stats_->ctor_allocs_by_arity[fields.size()];
  cells_.emplace(l, HeapCell{CtorCell{index, std::move(fields)}, 1, ThreadTag::SingleThreaded});
  stats_->peak_live = std::max<std::uint64_t>(stats_->peak_live, cells_.size());
  return l;
}

Loc Heap::alloc_pap(Const fn, std::vector<Loc> args) {
  Loc l = next_++;
  ++stats_->allocations;
  cells_.emplace(l, HeapCell{PapCell{std::move(fn), std::move(args)}, 1,
                             ThreadTag::SingleThreaded});
  stats_->peak_live = std::max<std::uint64_t>(stats_->peak_live, cells_.size());
  return l;
}

const HeapCell& Heap::cell(Loc l, SourcePos pos) const {
  if (l == kNullTok) throw RunError(RunErrorKind::NullTokenUse, "dereference of null token", pos);
  auto it = cells_.find(l);
  if (it == cells_.end())
    throw RunError(RunErrorKind::UseAfterFree, "dereference of freed cell", pos);
  return it->second;
}

void Heap::inc(Loc l, SourcePos pos) {
  if (l == kNullTok) throw RunError(RunErrorKind::NullTokenUse, "inc of null token", pos);
  auto it = cells_.find(l);
  if (it == cells_.end()) throw RunError(RunErrorKind::UseAfterFree, "inc of freed cell", pos);
  if (it->second.tag == ThreadTag::Persistent) return;
  ++it->second.rc;
  count_rc_op(it->second, true);
}

void Heap::dec(Loc l, SourcePos pos) {
  std::vector<Loc> work{l};
  while (!work.empty()) {
    Loc cur = work.back();
    work.pop_back();
    if (cur == kNullTok) continue;  // dec of the null token is a no-op
    auto it = cells_.find(cur);
    if (it == cells_.end()) throw RunError(RunErrorKind::RcUnderflow, "dec of absent cell", pos);
    HeapCell& c = it->second;
    if (c.tag == ThreadTag::Persistent) continue;
    count_rc_op(c, false);
    if (c.rc > 1) {
      --c.rc;
      continue;
    }
    // last token: free and release the children
    if (const auto* ct = std::get_if<CtorCell>(&c.value)) {
      work.insert(work.end(), ct->fields.begin(), ct->fields.end());
    } else {
      const auto& pc = std::get<PapCell>(c.value);
      work.insert(work.end(), pc.args.begin(), pc.args.end());
    }
    cells_.erase(it);
  }
}

Loc Heap::reset(Loc l, const Const& site_fn, const Var& token, SourcePos pos) {
  if (l == kNullTok) throw RunError(RunErrorKind::NullTokenUse, "reset of null token", pos);
  auto it = cells_.find(l);
  if (it == cells_.end()) throw RunError(RunErrorKind::UseAfterFree, "reset of freed cell", pos);
  HeapCell& c = it->second;
  auto& site = stats_->reset_sites[{site_fn, token}];
  if (c.rc == 1 && c.tag != ThreadTag::Persistent) {
    auto* ct = std::get_if<CtorCell>(&c.value);
    if (!ct) throw RunError(RunErrorKind::ResetOnPap, "reset of a partial application cell", pos);
    ++site.uniq;
    for (Loc& f : ct->fields) {
      Loc child = f;
      f = kNullTok;
      if (child != kNullTok) dec(child, pos);
    }
    return l;  // the cell keeps rc 1 and now belongs to the token
  }
  ++site.shared;
  dec(l, pos);
  return kNullTok;
}

Loc Heap::reuse(Loc token, int index, std::vector<Loc> args, SourcePos pos) {
  if (token == kNullTok) {
    ++stats_->reuse_fresh;
    return alloc_ctor(index, std::move(args));
  }
  auto it = cells_.find(token);
  if (it == cells_.end())
    throw RunError(RunErrorKind::UseAfterFree, "reuse of freed token cell", pos);
  HeapCell& c = it->second;
  auto* ct = std::get_if<CtorCell>(&c.value);
  bool compatible = ct != nullptr && c.rc == 1 && ct->fields.size() == args.size() &&
                    std::all_of(ct->fields.begin(), ct->fields.end(),
                                [](Loc f) { return f == kNullTok; });
  if (!compatible)
    throw RunError(RunErrorKind::ReuseSizeMismatch,
                   "reuse token does not name a compatible reset cell", pos);
  c.value = CtorCell{index, std::move(args)};
  ++stats_->reuse_uniq;
  return token;
}

std::size_t Heap::mark_mt(Loc l) {
  if (l == kNullTok) return 0;
  std::size_t tagged = 0;
  std::vector<Loc> work{l};
  while (!work.empty()) {
    Loc cur = work.back();
    work.pop_back();
    if (cur == kNullTok) continue;
    auto it = cells_.find(cur);
    if (it == cells_.end()) throw RunError(RunErrorKind::UseAfterFree, "mark_mt of freed cell");
    HeapCell& c = it->second;
    if (c.tag != ThreadTag::SingleThreaded) continue;  // already MT or persistent
    c.tag = ThreadTag::MultiThreaded;
    ++tagged;
    if (const auto* ct = std::get_if<CtorCell>(&c.value)) {
      work.insert(work.end(), ct->fields.begin(), ct->fields.end());
    } else {
      const auto& pc = std::get<PapCell>(c.value);
      work.insert(work.end(), pc.args.begin(), pc.args.end());
    }
  }
  return tagged;
}

std::vector<TagViolation> Heap::check_tags() const {
  std::vector<TagViolation> out;
  std::vector<Loc> locs;
  locs.reserve(cells_.size());
  for (const auto& [l, c] : cells_) locs.push_back(l);
  std::sort(locs.begin(), locs.end());
  for (Loc l : locs) {
    const HeapCell& c = cells_.at(l);
    if (c.tag == ThreadTag::SingleThreaded) continue;
    auto check_child = [&](Loc f) {
      if (f == kNullTok) return;
      auto it = cells_.find(f);
      if (it == cells_.end()) return;
      ThreadTag ft = it->second.tag;
      if (c.tag == ThreadTag::Persistent && ft != ThreadTag::Persistent)
        out.push_back({l, f, "persistent cell reaches a non-persistent cell"});
      if (c.tag == ThreadTag::MultiThreaded && ft == ThreadTag::SingleThreaded)
        out.push_back({l, f, "multi-threaded cell reaches a single-threaded cell"});
    };
    if (const auto* ct = std::get_if<CtorCell>(&c.value)) {
      for (Loc f : ct->fields) check_child(f);
    } else {
      for (Loc f : std::get<PapCell>(c.value).args) check_child(f);
    }
  }
  return out;
}

void Heap::set_tag(Loc l, ThreadTag tag) {
  auto it = cells_.find(l);
  if (it != cells_.end()) it->second.tag = tag;
}

bool Heap::is_acyclic() const {
  // colors: 0 unvisited, 1 on the current path, 2 done
  std::unordered_map<Loc, int> color;
  std::vector<std::pair<Loc, size_t>> stack;
  auto children = [&](Loc l) -> const std::vector<Loc>& {
    const HeapCell& c = cells_.at(l);
    if (const auto* ct = std::get_if<CtorCell>(&c.value)) return ct->fields;
    return std::get<PapCell>(c.value).args;
  };
  for (const auto& [root, cell] : cells_) {
    if (color[root] != 0) continue;
    stack.clear();
    stack.push_back({root, 0});
    color[root] = 1;
    while (!stack.empty()) {
      auto& [l, idx] = stack.back();
      const auto& kids = children(l);
      if (idx >= kids.size()) {
        color[l] = 2;
        stack.pop_back();
        continue;
      }
      Loc next = kids[idx++];
      if (next == kNullTok || !cells_.count(next)) continue;
      int c = color[next];
      if (c == 1) return false;
      if (c == 0) {
        color[next] = 1;
        stack.push_back({next, 0});
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Deep values
// ---------------------------------------------------------------------------

PureValue make_ctor_value(int index, std::vector<PureValue> children) {
  auto v = std::make_shared<PureVal>();
  v->index = index;
  v->children = std::move(children);
  return v;
}

PureValue make_pap_value(Const fn, std::vector<PureValue> args) {
  auto v = std::make_shared<PureVal>();
  v->is_pap = true;
  v->fn = std::move(fn);
  v->children = std::move(args);
  return v;
}

namespace {

bool value_equal_memo(const PureVal* a, const PureVal* b,
                      std::set<std::pair<const PureVal*, const PureVal*>>& seen) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (!seen.insert({a, b}).second) return true;  // already being compared
  if (a->is_pap != b->is_pap) return false;
  if (a->is_pap && a->fn != b->fn) return false;
  if (!a->is_pap && a->index != b->index) return false;
  if (a->children.size() != b->children.size()) return false;
  for (size_t i = 0; i < a->children.size(); ++i) {
    if (!value_equal_memo(a->children[i].get(), b->children[i].get(), seen)) return false;
  }
  return true;
}

}  // namespace

bool value_equal(const PureValue& a, const PureValue& b) {
  std::set<std::pair<const PureVal*, const PureVal*>> seen;
  return value_equal_memo(a.get(), b.get(), seen);
}

std::string print_value(const PureValue& v) {
  if (!v) return "<null>";
  if (v->is_pap) return "<pap " + v->fn + " " + std::to_string(v->children.size()) + ">";
  std::string s = "(C " + std::to_string(v->index);
  for (const auto& c : v->children) s += " " + print_value(c);
  s += ")";
  return s;
}

// ---------------------------------------------------------------------------
// RC evaluator
// ---------------------------------------------------------------------------

namespace {

using Env = std::unordered_map<Var, Loc>;

class Evaluator {
 public:
  Evaluator(const Program& p, std::uint64_t step_limit)
      : heap_(&stats_), step_limit_(step_limit) {
    for (const auto& [name, fn] : p.defs) index_.emplace(name, &fn);
  }

  Loc run_entry(const Const& entry) {
    const Fn* fn = lookup(entry, {});
    if (!fn->params.empty())
      throw RunError(RunErrorKind::EntryNotNullary,
                     "entry '" + entry + "' takes parameters", fn->pos);
    current_fn_ = entry;
    return exec(fn->body, {});
  }

  Heap& heap() { return heap_; }
  RunStats& stats() { return stats_; }

  PureValue readout(Loc l) {
    auto it = memo_.find(l);
    if (it != memo_.end()) return it->second;
    const HeapCell& c = heap_.cell(l, {});
    PureValue v;
    if (const auto* ct = std::get_if<CtorCell>(&c.value)) {
      std::vector<PureValue> children;
      children.reserve(ct->fields.size());
      for (Loc f : ct->fields) {
        if (f == kNullTok)
          throw RunError(RunErrorKind::NullTokenUse, "null token inside a result value");
        children.push_back(readout(f));
      }
      v = make_ctor_value(ct->index, std::move(children));
    } else {
      const auto& pc = std::get<PapCell>(c.value);
      std::vector<PureValue> args;
      args.reserve(pc.args.size());
      for (Loc a : pc.args) args.push_back(readout(a));
      v = make_pap_value(pc.fn, std::move(args));
    }
    memo_.emplace(l, v);
    return v;
  }

 private:
  const Fn* lookup(const Const& c, SourcePos pos) {
    auto it = index_.find(c);
    if (it == index_.end())
      throw RunError(RunErrorKind::UnknownConst, "unknown constant '" + c + "'", pos);
    return it->second;
  }

  Loc env_get(const Env& env, const Var& v, SourcePos pos) {
    auto it = env.find(v);
    if (it == env.end())
      throw RunError(RunErrorKind::UnboundVar, "variable '" + v + "' unbound at run time", pos);
    return it->second;
  }

  void step(SourcePos pos) {
    ++steps_;
    if (step_limit_ && steps_ > step_limit_)
      throw RunError(RunErrorKind::StepLimit, "step limit exceeded", pos);
  }

  Loc exec(Body b, Env env) {
    for (;;) {
      const auto& node = b->node;
      SourcePos pos = b->pos;
      step(pos);
      if (const auto* r = std::get_if<Ret>(&node)) return env_get(env, r->var, pos);
      if (const auto* l = std::get_if<Let>(&node)) {
        Loc v = eval_expr(l->var, l->expr, env, pos);
        env[l->var] = v;
        b = l->rest;
        continue;
      }
      if (const auto* i = std::get_if<Inc>(&node)) {
        heap_.inc(env_get(env, i->var, pos), pos);
        b = i->rest;
        continue;
      }
      if (const auto* d = std::get_if<Dec>(&node)) {
        heap_.dec(env_get(env, d->var, pos), pos);
        b = d->rest;
        continue;
      }
      const auto& c = std::get<Case>(node);
      Loc l = env_get(env, c.scrutinee, pos);
      const HeapCell& cell = heap_.cell(l, pos);
      const auto* ct = std::get_if<CtorCell>(&cell.value);
      if (!ct)
        throw RunError(RunErrorKind::CaseOnPap, "case on a partial application cell", pos);
      if (ct->index < 1 || static_cast<size_t>(ct->index) > c.arms.size())
        throw RunError(RunErrorKind::CaseArmMissing,
                       "no arm for constructor index " + std::to_string(ct->index), pos);
      b = c.arms[static_cast<size_t>(ct->index) - 1].body;
    }
  }

  Loc call_full(const Const& c, std::vector<Loc> args, SourcePos pos) {
    const Fn* fn = lookup(c, pos);
    if (fn->params.size() != args.size())
      throw RunError(RunErrorKind::ArityMismatch,
                     "call of '" + c + "' with wrong argument count", pos);
    Env env;
    env.reserve(args.size());
    for (size_t i = 0; i < args.size(); ++i) env.emplace(fn->params[i], args[i]);
    Const saved = current_fn_;
    current_fn_ = c;
    Loc out = exec(fn->body, std::move(env));
    current_fn_ = saved;
    return out;
  }

  Loc eval_expr(const Var& binder, const Expr& e, Env& env, SourcePos pos) {
    return std::visit(
        [&](const auto& x) -> Loc {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, FullApp>) {
            std::vector<Loc> args;
            args.reserve(x.args.size());
            for (const auto& a : x.args) args.push_back(env_get(env, a, pos));
            return call_full(x.fn, std::move(args), pos);
          } else if constexpr (std::is_same_v<T, PartApp>) {
            const Fn* fn = lookup(x.fn, pos);
            if (x.args.size() >= fn->params.size())
              throw RunError(RunErrorKind::ArityMismatch,
                             "pap of '" + x.fn + "' must be partial", pos);
            std::vector<Loc> args;
            args.reserve(x.args.size());
            for (const auto& a : x.args) args.push_back(env_get(env, a, pos));
            return heap_.alloc_pap(x.fn, std::move(args));
          } else if constexpr (std::is_same_v<T, VarApp>) {
            Loc fl = env_get(env, x.fn, pos);
            const HeapCell& cell = heap_.cell(fl, pos);
            const auto* pc = std::get_if<PapCell>(&cell.value);
            if (!pc)
              throw RunError(RunErrorKind::ApplyOnCtor,
                             "variable application of a constructor cell", pos);
            const Fn* fn = lookup(pc->fn, pos);
            std::vector<Loc> stored = pc->args;  // copy before the cell may die
            Const target = pc->fn;
            Loc arg = env_get(env, x.arg, pos);
            if (stored.size() + 1 == fn->params.size()) {
              // copy the stored arguments out with an inc, then drop the cell
              for (Loc s : stored) heap_.inc(s, pos);
              heap_.dec(fl, pos);
              stored.push_back(arg);
              return call_full(target, std::move(stored), pos);
            }
            if (stored.size() + 1 < fn->params.size()) {
              for (Loc s : stored) heap_.inc(s, pos);
              heap_.dec(fl, pos);
              stored.push_back(arg);
              return heap_.alloc_pap(target, std::move(stored));
            }
            throw RunError(RunErrorKind::ArityMismatch,
                           "over-applied partial application of '" + target + "'", pos);
          } else if constexpr (std::is_same_v<T, Ctor>) {
            std::vector<Loc> args;
            args.reserve(x.args.size());
            for (const auto& a : x.args) args.push_back(env_get(env, a, pos));
            return heap_.alloc_ctor(x.index, std::move(args));
          } else if constexpr (std::is_same_v<T, Proj>) {
            Loc l = env_get(env, x.source, pos);
            const HeapCell& cell = heap_.cell(l, pos);
            const auto* ct = std::get_if<CtorCell>(&cell.value);
            if (!ct)
              throw RunError(RunErrorKind::ProjOutOfRange,
                             "proj of a partial application cell", pos);
            if (x.index < 1 || static_cast<size_t>(x.index) > ct->fields.size())
              throw RunError(RunErrorKind::ProjOutOfRange,
                             "proj index " + std::to_string(x.index) + " out of range", pos);
            return ct->fields[static_cast<size_t>(x.index) - 1];
          } else if constexpr (std::is_same_v<T, Reset>) {
            Loc l = env_get(env, x.target, pos);
            return heap_.reset(l, current_fn_, binder, pos);
          } else {
            Loc tok = env_get(env, x.token, pos);
            std::vector<Loc> args;
            args.reserve(x.args.size());
            for (const auto& a : x.args) args.push_back(env_get(env, a, pos));
            return heap_.reuse(tok, x.index, std::move(args), pos);
          }
        },
        e);
  }

  RunStats stats_;
  Heap heap_;
  std::uint64_t step_limit_;
  std::uint64_t steps_ = 0;
  std::unordered_map<Const, const Fn*> index_;
  std::unordered_map<Loc, PureValue> memo_;
  Const current_fn_;
};

}  // namespace

EvalResult eval_rc(const Program& p, const Const& entry, std::uint64_t step_limit) {
  Evaluator ev(p, step_limit);
  Loc result = ev.run_entry(entry);
  PureValue value = ev.readout(result);
  ev.heap().dec(result, {});
  ev.stats().final_live = ev.heap().size();
  if (ev.stats().final_live > 0)
    throw RunError(RunErrorKind::Leak,
                   std::to_string(ev.stats().final_live) + " cells leaked");
  return {std::move(value), ev.stats()};
}

// ---------------------------------------------------------------------------
// Pure reference evaluator
// ---------------------------------------------------------------------------

namespace {

class PureEvaluator {
 public:
  PureEvaluator(const Program& p, std::uint64_t step_limit) : step_limit_(step_limit) {
    for (const auto& [name, fn] : p.defs) index_.emplace(name, &fn);
  }

  PureValue run_entry(const Const& entry) {
    const Fn* fn = lookup(entry, {});
    if (!fn->params.empty())
      throw RunError(RunErrorKind::EntryNotNullary,
                     "entry '" + entry + "' takes parameters", fn->pos);
    return exec(fn->body, {});
  }

 private:
  using PEnv = std::unordered_map<Var, PureValue>;

  const Fn* lookup(const Const& c, SourcePos pos) {
    auto it = index_.find(c);
    if (it == index_.end())
      throw RunError(RunErrorKind::UnknownConst, "unknown constant '" + c + "'", pos);
    return it->second;
  }

  PureValue env_get(const PEnv& env, const Var& v, SourcePos pos) {
    auto it = env.find(v);
    if (it == env.end())
      throw RunError(RunErrorKind::UnboundVar, "variable '" + v + "' unbound at run time", pos);
    return it->second;
  }

  void step(SourcePos pos) {
    ++steps_;
    if (step_limit_ && steps_ > step_limit_)
      throw RunError(RunErrorKind::StepLimit, "step limit exceeded", pos);
  }

  PureValue call_full(const Const& c, std::vector<PureValue> args, SourcePos pos) {
    const Fn* fn = lookup(c, pos);
    if (fn->params.size() != args.size())
      throw RunError(RunErrorKind::ArityMismatch,
                     "call of '" + c + "' with wrong argument count", pos);
    PEnv env;
    for (size_t i = 0; i < args.size(); ++i) env.emplace(fn->params[i], std::move(args[i]));
    return exec(fn->body, std::move(env));
  }

  PureValue exec(Body b, PEnv env) {
    for (;;) {
      const auto& node = b->node;
      SourcePos pos = b->pos;
      step(pos);
      if (const auto* r = std::get_if<Ret>(&node)) return env_get(env, r->var, pos);
      if (const auto* l = std::get_if<Let>(&node)) {
        env[l->var] = eval_expr(l->expr, env, pos);
        b = l->rest;
        continue;
      }
      if (std::holds_alternative<Inc>(node) || std::holds_alternative<Dec>(node))
        throw RunError(RunErrorKind::ArityMismatch,
                       "pure evaluator cannot execute inc/dec", pos);
      const auto& c = std::get<Case>(node);
      PureValue v = env_get(env, c.scrutinee, pos);
      if (v->is_pap)
        throw RunError(RunErrorKind::CaseOnPap, "case on a partial application value", pos);
      if (v->index < 1 || static_cast<size_t>(v->index) > c.arms.size())
        throw RunError(RunErrorKind::CaseArmMissing,
                       "no arm for constructor index " + std::to_string(v->index), pos);
      b = c.arms[static_cast<size_t>(v->index) - 1].body;
    }
  }

  PureValue eval_expr(const Expr& e, PEnv& env, SourcePos pos) {
    return std::visit(
        [&](const auto& x) -> PureValue {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, FullApp>) {
            std::vector<PureValue> args;
            for (const auto& a : x.args) args.push_back(env_get(env, a, pos));
            return call_full(x.fn, std::move(args), pos);
          } else if constexpr (std::is_same_v<T, PartApp>) {
            const Fn* fn = lookup(x.fn, pos);
            if (x.args.size() >= fn->params.size())
              throw RunError(RunErrorKind::ArityMismatch,
                             "pap of '" + x.fn + "' must be partial", pos);
            std::vector<PureValue> args;
            for (const auto& a : x.args) args.push_back(env_get(env, a, pos));
            return make_pap_value(x.fn, std::move(args));
          } else if constexpr (std::is_same_v<T, VarApp>) {
            PureValue f = env_get(env, x.fn, pos);
            if (!f->is_pap)
              throw RunError(RunErrorKind::ApplyOnCtor,
                             "variable application of a constructor value", pos);
            const Fn* fn = lookup(f->fn, pos);
            std::vector<PureValue> args = f->children;
            args.push_back(env_get(env, x.arg, pos));
            if (args.size() == fn->params.size()) return call_full(f->fn, std::move(args), pos);
            if (args.size() < fn->params.size()) return make_pap_value(f->fn, std::move(args));
            throw RunError(RunErrorKind::ArityMismatch,
                           "over-applied partial application of '" + f->fn + "'", pos);
          } else if constexpr (std::is_same_v<T, Ctor>) {
            std::vector<PureValue> args;
            for (const auto& a : x.args) args.push_back(env_get(env, a, pos));
            return make_ctor_value(x.index, std::move(args));
          } else if constexpr (std::is_same_v<T, Proj>) {
            PureValue v = env_get(env, x.source, pos);
            if (v->is_pap)
              throw RunError(RunErrorKind::ProjOutOfRange,
                             "proj of a partial application value", pos);
            if (x.index < 1 || static_cast<size_t>(x.index) > v->children.size())
              throw RunError(RunErrorKind::ProjOutOfRange,
                             "proj index " + std::to_string(x.index) + " out of range", pos);
            return v->children[static_cast<size_t>(x.index) - 1];
          } else {
            throw RunError(RunErrorKind::ArityMismatch,
                           "pure evaluator cannot execute reset/reuse", pos);
          }
        },
        e);
  }

  std::uint64_t step_limit_;
  std::uint64_t steps_ = 0;
  std::unordered_map<Const, const Fn*> index_;
};

}  // namespace

PureValue eval_pure(const Program& p, const Const& entry, std::uint64_t step_limit) {
  PureEvaluator ev(p, step_limit);
  return ev.run_entry(entry);
}

}  // namespace rcir
