#include "rcir/analyze.hpp"

#include <sstream>

namespace rcir {

namespace {

void scan(const Const& fn, const Body& b, ReuseGuardReport& r) {
  const auto& node = b->node;
  if (const auto* l = std::get_if<Let>(&node)) {
    if (const auto* ct = std::get_if<Ctor>(&l->expr)) {
      r.sites.push_back({fn, b->pos, ct->index, ct->args.size()});
      ++r.unguarded_per_fn[fn];
    }
    scan(fn, l->rest, r);
  } else if (const auto* c = std::get_if<Case>(&node)) {
    for (const auto& arm : c->arms) scan(fn, arm.body, r);
  } else if (const auto* i = std::get_if<Inc>(&node)) {
    scan(fn, i->rest, r);
  } else if (const auto* d = std::get_if<Dec>(&node)) {
    scan(fn, d->rest, r);
  }
}

}  // namespace

ReuseGuardReport analyze_reuse_guards(const Program& p) {
  ReuseGuardReport r;
  for (const auto& [name, fn] : p.defs) {
    r.unguarded_per_fn[name] = 0;
    scan(name, fn.body, r);
  }
  return r;
}

std::string report_to_text(const ReuseGuardReport& r, const Program& p) {
  std::ostringstream out;
  for (const auto& [name, fn] : p.defs) {
    auto it = r.unguarded_per_fn.find(name);
    std::size_t n = it == r.unguarded_per_fn.end() ? 0 : it->second;
    out << name << ": " << n << " unguarded\n";
    for (const auto& site : r.sites) {
      if (site.fn != name) continue;
      out << "  ";
      if (site.pos.line > 0) out << site.pos.line << ':' << site.pos.col << ' ';
      out << "ctor " << site.ctor_index << '/' << site.arity << '\n';
    }
  }
  out << "total: " << r.total() << " unguarded\n";
  return out.str();
}

}  // namespace rcir
