#pragma once

#include <optional>

#include "nsp/term.hpp"

namespace nsp {

// Positions into meta-terms.
struct PathElem {
  enum class K : uint8_t { LamBody, CaseScrut, CaseBranch, AppArg, RedexFun, RedexArg, GroundExpr };
  K k;
  uint64_t idx = 0;

  bool operator==(const PathElem& o) const { return k == o.k && idx == o.idx; }
};
using Path = std::vector<PathElem>;

enum class Rule : uint8_t { B1, B2, B3, B4 };
const char* rule_name(Rule r);

struct TraceStep {
  Rule rule;
  Path at;
};
struct EvalTrace {
  std::vector<TraceStep> steps;
};

// One basic reduction at the root of a ground meta-term (b1-b4), if any.
std::optional<GroundPtr> basic_step(const GroundPtr& g);

// The unique head reduction successor (h1-h3), if any.
std::optional<Meta> head_step(const Meta& t);

struct Hnf {
  Meta term;
  int steps = 0;
  bool fuel_out = false;
};
// Head-reduce until head normal or the fuel budget runs out.
Hnf to_hnf(const Meta& t, int fuel, EvalTrace* trace = nullptr);

// Bounded evaluation: head-reduce, emit the constructor, recurse into
// arguments and branches at depth-1, indices below branch_bound.  Exhausted
// fuel leaves bot(Fuel) at the node, exhausted depth bot(Cut); the result is a
// finite term below the value of t and equal to its truncation when the
// budgets suffice.
Meta eval(const Meta& t, const Bounds& b);
ProcPtr eval(const ProcPtr& p, const Bounds& b);
ExprPtr eval(const ExprPtr& e, const Bounds& b);

// Lazy evaluation: the value of t as an on-demand tree, each level paying the
// given head-reduction budget when first forced.
ProcPtr eval_lazy(const ProcPtr& p, int fuel_per_level);
ExprPtr eval_lazy_expr(const ExprPtr& e, int fuel_per_level);

// Both stages of the evaluation theorem: the context's hole variables are
// replaced by the given procedures directly (left) and by their separately
// evaluated values (right); both sides are then evaluated at `outer`.
std::pair<Meta, Meta> eval_in_stages(const Meta& context,
                                     const std::map<std::string, ProcPtr>& plugs,
                                     const Bounds& outer, const Bounds& inner);

// The nondeterministic general reduction relation, for finite eager
// meta-terms only (test oracle; congruence closure g2-g4 over h1-h3).
struct GStep {
  Path at;
  Rule rule;
  Meta result;
};
std::vector<GStep> general_steps(const Meta& t);

// Replay a single basic step at a position (trace replay).
Meta reduce_at(const Meta& t, const Path& at);

// Origin tracking: map a variable occurrence in the final term of a replayed
// trace back to the occurrence in the initial term that originates it.
struct OccurrenceRef {
  Path path;
  std::string var;
};
OccurrenceRef origin_of(const Meta& initial, const EvalTrace& trace, const OccurrenceRef& occ);

// The variable at a position (for building OccurrenceRefs in tests).
std::optional<std::string> var_at(const Meta& t, const Path& p);

}  // namespace nsp
