#include "rcir/print.hpp"

#include <map>
#include <sstream>

namespace rcir {

namespace {

void print_args(std::ostringstream& out, const std::vector<Var>& args) {
  for (const auto& a : args) out << ' ' << a;
}

// True if parsing would continue consuming '|' arms at the end of this body,
// i.e. the body's tail position reaches a case. Non-final arms with such
// bodies must be parenthesized.
bool tail_reaches_case(const Body& b) {
  const Body* cur = &b;
  for (;;) {
    const auto& node = (*cur)->node;
    if (std::holds_alternative<Case>(node)) return true;
    if (std::holds_alternative<Ret>(node)) return false;
    if (const auto* l = std::get_if<Let>(&node)) {
      cur = &l->rest;
    } else if (const auto* i = std::get_if<Inc>(&node)) {
      cur = &i->rest;
    } else {
      cur = &std::get<Dec>(node).rest;
    }
  }
}

void print_body(std::ostringstream& out, const Body& b, int indent) {
  std::string pad(2 * indent, ' ');
  const Body* cur = &b;
  for (;;) {
    const auto& node = (*cur)->node;
    if (const auto* r = std::get_if<Ret>(&node)) {
      out << pad << "ret " << r->var << '\n';
      return;
    }
    if (const auto* l = std::get_if<Let>(&node)) {
      out << pad << "let " << l->var << " = " << print_expr(l->expr) << ";\n";
      cur = &l->rest;
      continue;
    }
    if (const auto* i = std::get_if<Inc>(&node)) {
      out << pad << "inc " << i->var << ";\n";
      cur = &i->rest;
      continue;
    }
    if (const auto* d = std::get_if<Dec>(&node)) {
      out << pad << "dec " << d->var << ";\n";
      cur = &d->rest;
      continue;
    }
    const auto& c = std::get<Case>(node);
    out << pad << "case " << c.scrutinee << " of\n";
    for (size_t i = 0; i < c.arms.size(); ++i) {
      const auto& arm = c.arms[i];
      bool need_parens = i + 1 < c.arms.size() && tail_reaches_case(arm.body);
      out << pad << "| C " << (i + 1) << '/' << arm.arity << " ->";
      if (need_parens) {
        out << " (\n";
        print_body(out, arm.body, indent + 1);
        out << pad << ")\n";
      } else {
        out << '\n';
        print_body(out, arm.body, indent + 1);
      }
    }
    return;
  }
}

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FullApp>) {
          out << "call " << x.fn;
          print_args(out, x.args);
        } else if constexpr (std::is_same_v<T, PartApp>) {
          out << "pap " << x.fn;
          print_args(out, x.args);
        } else if constexpr (std::is_same_v<T, VarApp>) {
          out << "vapp " << x.fn << ' ' << x.arg;
        } else if constexpr (std::is_same_v<T, Ctor>) {
          out << "ctor " << x.index;
          print_args(out, x.args);
        } else if constexpr (std::is_same_v<T, Proj>) {
          out << "proj " << x.index << ' ' << x.source;
        } else if constexpr (std::is_same_v<T, Reset>) {
          out << "reset " << x.target;
        } else {
          out << "reuse " << x.token << " ctor " << x.index;
          print_args(out, x.args);
        }
      },
      e);
  return out.str();
}

std::string print_fn(const Const& name, const Fn& fn) {
  std::ostringstream out;
  out << "def " << name << " (";
  for (size_t i = 0; i < fn.params.size(); ++i) {
    if (i) out << ' ';
    if (i < fn.borrows.size() && fn.borrows[i] == Ownership::Borrowed) out << '@';
    out << fn.params[i];
  }
  out << ") =\n";
  print_body(out, fn.body, 1);
  return out.str();
}

std::string print_program(const Program& p) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, fn] : p.defs) {
    if (!first) out << '\n';
    first = false;
    out << print_fn(name, fn);
  }
  return out.str();
}

namespace {

using Rename = std::map<Var, Var>;

Var renamed(const Rename& m, const Var& v) {
  auto it = m.find(v);
  return it == m.end() ? v : it->second;
}

void note_fresh(Rename& m, size_t& next, const Var& v) {
  if (is_internal_name(v) && !m.count(v)) m.emplace(v, "%" + std::to_string(next++));
}

void collect_fresh(const Body& b, Rename& m, size_t& next) {
  const auto& node = b->node;
  if (const auto* r = std::get_if<Ret>(&node)) {
    note_fresh(m, next, r->var);
    return;
  }
  if (const auto* l = std::get_if<Let>(&node)) {
    note_fresh(m, next, l->var);
    std::vector<Var> vs;
    vars_of_expr(l->expr, vs);
    for (const auto& v : vs) note_fresh(m, next, v);
    collect_fresh(l->rest, m, next);
    return;
  }
  if (const auto* c = std::get_if<Case>(&node)) {
    note_fresh(m, next, c->scrutinee);
    for (const auto& arm : c->arms) collect_fresh(arm.body, m, next);
    return;
  }
  if (const auto* i = std::get_if<Inc>(&node)) {
    note_fresh(m, next, i->var);
    collect_fresh(i->rest, m, next);
    return;
  }
  const auto& d = std::get<Dec>(node);
  note_fresh(m, next, d.var);
  collect_fresh(d.rest, m, next);
}

Expr rename_expr(const Expr& e, const Rename& m) {
  return std::visit(
      [&](const auto& x) -> Expr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FullApp> || std::is_same_v<T, PartApp>) {
          T y = x;
          for (auto& a : y.args) a = renamed(m, a);
          return y;
        } else if constexpr (std::is_same_v<T, VarApp>) {
          return VarApp{renamed(m, x.fn), renamed(m, x.arg)};
        } else if constexpr (std::is_same_v<T, Ctor>) {
          Ctor y = x;
          for (auto& a : y.args) a = renamed(m, a);
          return y;
        } else if constexpr (std::is_same_v<T, Proj>) {
          return Proj{x.index, renamed(m, x.source)};
        } else if constexpr (std::is_same_v<T, Reset>) {
          return Reset{renamed(m, x.target)};
        } else {
          Reuse y = x;
          y.token = renamed(m, y.token);
          for (auto& a : y.args) a = renamed(m, a);
          return y;
        }
      },
      e);
}

Body rename_body(const Body& b, const Rename& m) {
  const auto& node = b->node;
  if (const auto* r = std::get_if<Ret>(&node)) return make_ret(renamed(m, r->var), b->pos);
  if (const auto* l = std::get_if<Let>(&node))
    return make_let(renamed(m, l->var), rename_expr(l->expr, m), rename_body(l->rest, m),
                    b->pos);
  if (const auto* c = std::get_if<Case>(&node)) {
    std::vector<CaseArm> arms;
    arms.reserve(c->arms.size());
    for (const auto& arm : c->arms) arms.push_back({arm.arity, rename_body(arm.body, m)});
    return make_case(renamed(m, c->scrutinee), std::move(arms), b->pos);
  }
  if (const auto* i = std::get_if<Inc>(&node))
    return make_inc(renamed(m, i->var), rename_body(i->rest, m), b->pos);
  const auto& d = std::get<Dec>(node);
  return make_dec(renamed(m, d.var), rename_body(d.rest, m), b->pos);
}

}  // namespace

Program normalize_fresh_names(const Program& p) {
  Program out;
  for (const auto& [name, fn] : p.defs) {
    Rename m;
    size_t next = 0;
    for (const auto& param : fn.params) note_fresh(m, next, param);
    collect_fresh(fn.body, m, next);
    Fn nf = fn;
    for (auto& param : nf.params) param = renamed(m, param);
    nf.body = rename_body(fn.body, m);
    out.add(name, std::move(nf));
  }
  return out;
}

}  // namespace rcir
