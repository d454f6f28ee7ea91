#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcir/ir.hpp"

namespace rcir {

// Heap locations. kNullTok is the sentinel a shared reset returns; it is
// never a heap key.
using Loc = std::uint64_t;
inline constexpr Loc kNullTok = 0;

enum class ThreadTag : std::uint8_t { SingleThreaded, MultiThreaded, Persistent };

struct CtorCell {
  int index = 1;
  std::vector<Loc> fields;
};
struct PapCell {
  Const fn;
  std::vector<Loc> args;
};

struct HeapCell {
  std::variant<CtorCell, PapCell> value;
  std::uint64_t rc = 1;  // always >= 1 while the cell is live
  ThreadTag tag = ThreadTag::SingleThreaded;
};

enum class RunErrorKind {
  RcUnderflow,
  UseAfterFree,
  ReuseSizeMismatch,
  CaseOnPap,
  ProjOutOfRange,
  Leak,
  UnknownConst,
  ResetOnPap,
  NullTokenUse,
  ArityMismatch,
  CaseArmMissing,
  ApplyOnCtor,
  UnboundVar,
  EntryNotNullary,
  StepLimit,
};

const char* run_error_kind_name(RunErrorKind k);

struct RunError : std::exception {
  RunError(RunErrorKind kind, std::string msg, SourcePos pos = {});
  const char* what() const noexcept override { return text.c_str(); }
  RunErrorKind kind;
  std::string message;
  SourcePos pos;
  std::string text;  // rendered message including position
};

struct ResetSiteStats {
  std::uint64_t uniq = 0;
  std::uint64_t shared = 0;
};

struct RunStats {
  std::uint64_t allocations = 0;  // every fresh heap cell, paps included
  std::uint64_t reuse_uniq = 0;
  std::uint64_t reuse_fresh = 0;
  std::map<std::pair<Const, Var>, ResetSiteStats> reset_sites;
  std::uint64_t inc_ops = 0;
  std::uint64_t dec_ops = 0;
  std::uint64_t atomic_rc_ops = 0;  // inc/dec applied to multi-threaded cells
  std::uint64_t peak_live = 0;
  std::uint64_t final_live = 0;
  // fresh constructor cells by field count; paps are not included
  std::map<std::size_t, std::uint64_t> ctor_allocs_by_arity;

  std::uint64_t reset_uniq_total() const;
  std::uint64_t reset_shared_total() const;
  std::string to_text() const;  // key=value lines in field order
};

struct TagViolation {
  Loc parent;
  Loc child;
  std::string message;
};

class Heap {
 public:
  explicit Heap(RunStats* stats) : stats_(stats) {}

  Loc alloc_ctor(int index, std::vector<Loc> fields);
  Loc alloc_pap(Const fn, std::vector<Loc> args);
  void inc(Loc l, SourcePos pos);
  void dec(Loc l, SourcePos pos);  // iterative recursive free
  Loc reset(Loc l, const Const& site_fn, const Var& token, SourcePos pos);
  Loc reuse(Loc token, int index, std::vector<Loc> args, SourcePos pos);

  const HeapCell& cell(Loc l, SourcePos pos) const;  // UseAfterFree when absent
  bool live(Loc l) const { return cells_.count(l) != 0; }
  std::size_t size() const { return cells_.size(); }

  // Tags every single-threaded cell reachable from l as
  // multi-threaded, not descending into cells already MT or persistent.
  // Returns the number of newly tagged cells.
  std::size_t mark_mt(Loc l);
  std::vector<TagViolation> check_tags() const;

  // the reachability relation is a DAG at all times; debug traversal
  bool is_acyclic() const;

  // test hook; the language itself never constructs persistent cells
  void set_tag(Loc l, ThreadTag tag);

 private:
  void count_rc_op(const HeapCell& c, bool is_inc);
  std::unordered_map<Loc, HeapCell> cells_;
  Loc next_ = 1;  // freed locations are never recycled
  RunStats* stats_;
};

// Deep read-out of heap values, also produced by the pure evaluator.
struct PureVal;
using PureValue = std::shared_ptr<const PureVal>;
struct PureVal {
  bool is_pap = false;
  int index = 0;  // constructor index when !is_pap
  Const fn;       // pap target when is_pap
  std::vector<PureValue> children;
};

PureValue make_ctor_value(int index, std::vector<PureValue> children);
PureValue make_pap_value(Const fn, std::vector<PureValue> args);
bool value_equal(const PureValue& a, const PureValue& b);
std::string print_value(const PureValue& v);  // "(C i v1 ... vn)" / "<pap c k>"

struct EvalResult {
  PureValue value;
  RunStats stats;
};

// Big-step evaluation of an RC-dialect program: runs the nullary entry,
// reads out the result, releases it and requires the heap to end up empty.
EvalResult eval_rc(const Program& p, const Const& entry, std::uint64_t step_limit = 0);

// Reference evaluator: same rules with all counting removed, nothing freed.
PureValue eval_pure(const Program& p, const Const& entry, std::uint64_t step_limit = 0);

}  // namespace rcir
