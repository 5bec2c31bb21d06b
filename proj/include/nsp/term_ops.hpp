#pragma once

#include "nsp/term.hpp"

namespace nsp {

// Simultaneous capture-avoiding substitution of procedures for variables.
// Bound variables are freshened deterministically when they would capture a
// free variable of a substituend, so identical calls yield identical results.
// A substituted variable occurrence x q~vec becomes the redex Q q~vec (with an
// explicit empty argument list when x is of base type).
ProcPtr substitute(const ProcPtr& p, const std::map<std::string, ProcPtr>& binding);
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ProcPtr>& binding);
GroundPtr substitute(const GroundPtr& g, const std::map<std::string, ProcPtr>& binding);
Meta substitute(const Meta& t, const std::map<std::string, ProcPtr>& binding);

// Bounded truncation to an eager finite view: case depth is cut at
// bounds.depth (yielding bot(Cut)), suspensions are forced down to the cut,
// generator families are materialized below bounds.branch_bound and elided
// beyond it.  Closed-form defaults (AllBot / Affine) survive symbolically.
ExprPtr truncate(const ExprPtr& e, const Bounds& b);
ProcPtr truncate(const ProcPtr& p, const Bounds& b);
Meta truncate(const Meta& t, const Bounds& b);

// Alpha-equivalence and the syntactic order on (depth, branch_bound)
// truncations.  Bottom flags are bookkeeping and do not affect either.
bool alpha_eq(const Meta& t, const Meta& u, const Bounds& b);
bool alpha_eq(const ProcPtr& t, const ProcPtr& u, const Bounds& b);
bool alpha_eq(const ExprPtr& t, const ExprPtr& u, const Bounds& b);
// t below u: t obtained from u by replacing ground subterms with bot
bool syn_leq(const Meta& t, const Meta& u, const Bounds& b);
bool syn_leq(const ProcPtr& t, const ProcPtr& u, const Bounds& b);

// Hereditary eta-expansion x^eta.
ProcPtr eta_expand(const Var& x);

// Rightward-numeral-leaf substitution t[i -> family(i)].  Case scrutinees are
// never entered; composition with branch defaults stays in closed form where
// possible and otherwise proceeds on demand.
ExprPtr leaf_subst(const ExprPtr& e, const BranchFamily& family);
ProcPtr leaf_subst(const ProcPtr& p, const BranchFamily& family);

// Free names of a whole branch family (overrides plus declared generator set).
std::set<std::string> family_frees(const BranchFamily& f);

struct RegularMode {
  int level_cap = 0;
  std::optional<Sublevel> sublevel_cap;  // set for (k,l) mode

  static RegularMode level(int k) { return RegularMode{k, std::nullopt}; }
  static RegularMode sublevel(int k, int l) {
    return RegularMode{k, Sublevel{k, l}};
  }
  bool admits(const Type& t) const {
    if (sublevel_cap) return sublevel_of(t) <= *sublevel_cap;
    return t.level() <= level_cap;
  }
};

// True iff every variable of the (bounded view of the) term other than free
// occurrences of g fits under the mode's cap.
bool check_regular(const Meta& t, const Var& g, const RegularMode& mode, const Bounds& b);

}  // namespace nsp
