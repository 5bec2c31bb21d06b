#include "nsp/eval.hpp"

#include <stdexcept>

#include "nsp/term_ops.hpp"

namespace nsp {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::B1: return "b1";
    case Rule::B2: return "b2";
    case Rule::B3: return "b3";
    case Rule::B4: return "b4";
  }
  return "?";
}

namespace {

ExprPtr contract_b1(const ProcPtr& fun, const std::vector<ProcPtr>& args) {
  ProcPtr f = force(fun);
  if (f->binders.size() != args.size()) throw std::logic_error("b1: arity mismatch");
  std::map<std::string, ProcPtr> binding;
  for (size_t i = 0; i < args.size(); i++) binding.emplace(f->binders[i].name, args[i]);
  return substitute(f->body, binding);
}

// shifted view of a family: i => f(i + o)
BranchFamily shift_family(const BranchFamily& f, uint64_t o) {
  BranchFamily out;
  out.elided = f.elided;
  for (const auto& [j, e] : f.overrides)
    if (j >= o) out.overrides[j - o] = e;
  switch (f.def) {
    case BranchFamily::Default::AllBot:
      out.def = BranchFamily::Default::AllBot;
      break;
    case BranchFamily::Default::Affine:
      out.def = BranchFamily::Default::Affine;
      out.offset = f.offset + int64_t(o);
      break;
    case BranchFamily::Default::Gen: {
      auto inner = f.gen;
      out.def = BranchFamily::Default::Gen;
      out.gen = std::make_shared<const FamilyGen>(
          inner->free_names(), [inner, o](uint64_t i) { return inner->at(i + o); });
      break;
    }
  }
  return out;
}

// b4: case (case G of (i => E_i)) of F  -->  case G of (i => case E_i of F).
// Closed-form defaults are pre-reduced: bot branches stay bot (b2), affine
// branches select from F directly (b3).
BranchFamily compose_case(const BranchFamily& inner, const BranchFamily& outer) {
  BranchFamily out;
  out.elided = inner.elided;
  for (const auto& [i, e] : inner.overrides) out.overrides[i] = case_of(ground(e), outer);
  switch (inner.def) {
    case BranchFamily::Default::AllBot:
      out.def = BranchFamily::Default::AllBot;
      break;
    case BranchFamily::Default::Affine: {
      if (inner.offset < 0) {
        // defaults below the offset would be negative; keep them on demand
        auto off = inner.offset;
        auto out_fam = outer;
        out.def = BranchFamily::Default::Gen;
        out.gen = std::make_shared<const FamilyGen>(
            family_frees(outer),
            [off, out_fam](uint64_t i) { return out_fam.at(uint64_t(int64_t(i) + off)); });
      } else {
        BranchFamily shifted = shift_family(outer, uint64_t(inner.offset));
        // explicit branches of `out` win at override keys; merge the rest
        for (const auto& [i, e] : shifted.overrides)
          if (!out.overrides.count(i)) out.overrides[i] = e;
        out.def = shifted.def;
        out.offset = shifted.offset;
        out.gen = shifted.gen;
        out.elided = out.elided || shifted.elided;
      }
      break;
    }
    case BranchFamily::Default::Gen: {
      auto g = inner.gen;
      auto frees = g->free_names();
      auto of = family_frees(outer);
      frees.insert(of.begin(), of.end());
      auto out_fam = outer;
      out.def = BranchFamily::Default::Gen;
      out.gen = std::make_shared<const FamilyGen>(
          std::move(frees),
          [g, out_fam](uint64_t i) { return case_of(ground(g->at(i)), out_fam); });
      break;
    }
  }
  return out;
}

}  // namespace

std::optional<GroundPtr> basic_step(const GroundPtr& g) {
  switch (g->k) {
    case Ground::K::Redex:
      return ground(contract_b1(g->fun, g->args));
    case Ground::K::VarApp:
      return std::nullopt;
    case Ground::K::Expr: {
      const ExprPtr& e = g->expr;
      if (e->k != Expr::K::Case) return std::nullopt;
      if (e->scrut->k != Ground::K::Expr) return std::nullopt;
      const ExprPtr& s = e->scrut->expr;
      switch (s->k) {
        case Expr::K::Bot:
          return ground(bot(s->why));
        case Expr::K::Num:
          return ground(e->branches.at(s->num));
        case Expr::K::Case:
          return ground(case_of(s->scrut, compose_case(s->branches, e->branches)));
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

// One head step on an expression; reports the rule and the redex position
// relative to the expression.
std::optional<ExprPtr> head_step_expr(const ExprPtr& e, Rule* rule, bool* in_scrut) {
  if (e->k != Expr::K::Case) return std::nullopt;
  const GroundPtr& s = e->scrut;
  switch (s->k) {
    case Ground::K::VarApp:
      return std::nullopt;
    case Ground::K::Redex:
      // (h2): the scrutinee is not a case meta-term
      if (rule) *rule = Rule::B1;
      if (in_scrut) *in_scrut = true;
      return case_of(ground(contract_b1(s->fun, s->args)), e->branches);
    case Ground::K::Expr: {
      const ExprPtr& i = s->expr;
      if (in_scrut) *in_scrut = false;
      switch (i->k) {
        case Expr::K::Bot:
          if (rule) *rule = Rule::B2;
          return bot(i->why);
        case Expr::K::Num:
          if (rule) *rule = Rule::B3;
          return e->branches.at(i->num);
        case Expr::K::Case:
          if (rule) *rule = Rule::B4;
          return case_of(i->scrut, compose_case(i->branches, e->branches));
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Meta> head_step(const Meta& t) {
  if (auto* pp = std::get_if<ProcPtr>(&t)) {
    ProcPtr p = force(*pp);
    auto e = head_step_expr(p->body, nullptr, nullptr);
    if (!e) {
      if (p != *pp) return Meta(p);  // forcing alone is progress for suspensions
      return std::nullopt;
    }
    return Meta(lam(p->binders, *e));
  }
  if (auto* ee = std::get_if<ExprPtr>(&t)) {
    auto e = head_step_expr(*ee, nullptr, nullptr);
    if (!e) return std::nullopt;
    return Meta(*e);
  }
  const GroundPtr& g = std::get<GroundPtr>(t);
  if (g->k == Ground::K::Expr) {
    auto e = head_step_expr(g->expr, nullptr, nullptr);
    if (!e) return std::nullopt;
    return Meta(ground(*e));
  }
  auto r = basic_step(g);
  if (!r) return std::nullopt;
  return Meta(*r);
}

namespace {

struct ExprHnf {
  ExprPtr e;
  int steps = 0;
  bool fuel_out = false;
};

ExprHnf hnf_expr(ExprPtr e, int fuel, EvalTrace* trace, const Path& base) {
  ExprHnf out;
  while (true) {
    Rule rule;
    bool in_scrut = false;
    auto next = head_step_expr(e, &rule, &in_scrut);
    if (!next) break;
    if (out.steps >= fuel) {
      out.fuel_out = true;
      break;
    }
    if (trace) {
      Path at = base;
      if (in_scrut) at.push_back(PathElem{PathElem::K::CaseScrut, 0});
      trace->steps.push_back(TraceStep{rule, std::move(at)});
    }
    e = *next;
    out.steps++;
  }
  out.e = e;
  return out;
}

struct GroundHnf {
  GroundPtr g;
  int steps = 0;
  bool fuel_out = false;
};

GroundHnf hnf_ground(GroundPtr g, int fuel, EvalTrace* trace, const Path& base) {
  GroundHnf out;
  while (true) {
    if (g->k == Ground::K::VarApp) break;
    if (g->k == Ground::K::Redex) {
      if (out.steps >= fuel) {
        out.fuel_out = true;
        break;
      }
      if (trace) trace->steps.push_back(TraceStep{Rule::B1, base});
      g = ground(contract_b1(g->fun, g->args));
      out.steps++;
      continue;
    }
    Path sub = base;
    sub.push_back(PathElem{PathElem::K::GroundExpr, 0});
    ExprHnf eh = hnf_expr(g->expr, fuel - out.steps, trace, sub);
    out.steps += eh.steps;
    out.fuel_out = eh.fuel_out;
    g = ground(eh.e);
    break;
  }
  out.g = g;
  return out;
}

}  // namespace

Hnf to_hnf(const Meta& t, int fuel, EvalTrace* trace) {
  Hnf out;
  if (auto* pp = std::get_if<ProcPtr>(&t)) {
    ProcPtr p = force(*pp);
    Path base{PathElem{PathElem::K::LamBody, 0}};
    ExprHnf eh = hnf_expr(p->body, fuel, trace, base);
    out.term = Meta(lam(p->binders, eh.e));
    out.steps = eh.steps;
    out.fuel_out = eh.fuel_out;
    return out;
  }
  if (auto* ee = std::get_if<ExprPtr>(&t)) {
    ExprHnf eh = hnf_expr(*ee, fuel, trace, {});
    out.term = Meta(eh.e);
    out.steps = eh.steps;
    out.fuel_out = eh.fuel_out;
    return out;
  }
  GroundHnf gh = hnf_ground(std::get<GroundPtr>(t), fuel, trace, {});
  out.term = Meta(gh.g);
  out.steps = gh.steps;
  out.fuel_out = gh.fuel_out;
  return out;
}

// ---------------------------------------------------------------------------
// bounded evaluation

namespace {

ExprPtr eval_expr(const ExprPtr& e, const Bounds& b);

ProcPtr eval_proc(const ProcPtr& p, const Bounds& b) {
  ProcPtr q = force(p);
  return lam(q->binders, eval_expr(q->body, b));
}

BranchFamily eval_family(const BranchFamily& f, const Bounds& b) {
  BranchFamily out;
  Bounds inner = b.cut();
  bool dropped = false;
  for (const auto& [i, e] : f.overrides) {
    if (i < b.branch_bound)
      out.overrides[i] = eval_expr(e, inner);
    else
      dropped = true;
  }
  switch (f.def) {
    case BranchFamily::Default::AllBot:
      out.def = BranchFamily::Default::AllBot;
      out.elided = f.elided || dropped;
      break;
    case BranchFamily::Default::Affine:
      if (dropped) {
        out.def = BranchFamily::Default::AllBot;
        out.elided = true;
      } else {
        out.def = BranchFamily::Default::Affine;
        out.offset = f.offset;
        out.elided = f.elided;
      }
      break;
    case BranchFamily::Default::Gen:
      for (uint64_t i = 0; i < b.branch_bound; i++)
        if (!out.overrides.count(i)) out.overrides[i] = eval_expr(f.at(i), inner);
      out.def = BranchFamily::Default::AllBot;
      out.elided = true;
      break;
  }
  return out;
}

ExprPtr eval_expr(const ExprPtr& e, const Bounds& b) {
  ExprHnf h = hnf_expr(e, b.fuel, nullptr, {});
  if (h.fuel_out) return bot(BotWhy::Fuel);
  const ExprPtr& v = h.e;
  if (v->k != Expr::K::Case) return v;
  if (b.depth <= 0) return bot(BotWhy::Cut);
  const GroundPtr& s = v->scrut;  // head normal: variable-headed
  std::vector<ProcPtr> args;
  args.reserve(s->args.size());
  Bounds inner = b.cut();
  for (const auto& q : s->args) args.push_back(eval_proc(q, inner));
  return case_of(var_app(s->head, std::move(args)), eval_family(v->branches, b));
}

}  // namespace

Meta eval(const Meta& t, const Bounds& b) {
  if (auto* pp = std::get_if<ProcPtr>(&t)) return Meta(eval(*pp, b));
  if (auto* ee = std::get_if<ExprPtr>(&t)) return Meta(eval(*ee, b));
  GroundHnf gh = hnf_ground(std::get<GroundPtr>(t), b.fuel, nullptr, {});
  if (gh.fuel_out) return Meta(ground(bot(BotWhy::Fuel)));
  if (gh.g->k == Ground::K::Expr) return Meta(ground(eval_expr(gh.g->expr, b)));
  // value of a ground meta-term may be an application
  std::vector<ProcPtr> args;
  args.reserve(gh.g->args.size());
  Bounds inner = b.cut();
  for (const auto& q : gh.g->args) args.push_back(eval_proc(q, inner));
  return Meta(var_app(gh.g->head, std::move(args)));
}

ProcPtr eval(const ProcPtr& p, const Bounds& b) { return eval_proc(p, b); }
ExprPtr eval(const ExprPtr& e, const Bounds& b) { return eval_expr(e, b); }

// ---------------------------------------------------------------------------
// lazy evaluation

namespace {

BranchFamily lazy_family(const BranchFamily& f, int fuel) {
  BranchFamily out = f;
  for (auto& [i, e] : out.overrides) e = eval_lazy_expr(e, fuel);
  if (f.def == BranchFamily::Default::Gen) {
    auto inner = f.gen;
    out.gen = std::make_shared<const FamilyGen>(
        inner->free_names(), [inner, fuel](uint64_t i) { return eval_lazy_expr(inner->at(i), fuel); });
  }
  return out;
}

}  // namespace

ExprPtr eval_lazy_expr(const ExprPtr& e, int fuel) {
  ExprHnf h = hnf_expr(e, fuel, nullptr, {});
  if (h.fuel_out) return bot(BotWhy::Fuel);
  const ExprPtr& v = h.e;
  if (v->k != Expr::K::Case) return v;
  const GroundPtr& s = v->scrut;
  std::vector<ProcPtr> args;
  args.reserve(s->args.size());
  for (const auto& q : s->args) args.push_back(eval_lazy(q, fuel));
  return case_of(var_app(s->head, std::move(args)), lazy_family(v->branches, fuel));
}

ProcPtr eval_lazy(const ProcPtr& p, int fuel) {
  if (p->k == Proc::K::Susp) {
    ProcPtr inner = p;
    return suspend(p->cell->type(), p->cell->free_names(), [inner, fuel]() {
      ProcPtr q = force(inner);
      return lam(q->binders, eval_lazy_expr(q->body, fuel));
    });
  }
  ProcPtr inner = p;
  return suspend(proc_type(p), free_vars(p), [inner, fuel]() {
    return lam(inner->binders, eval_lazy_expr(inner->body, fuel));
  });
}

std::pair<Meta, Meta> eval_in_stages(const Meta& context,
                                     const std::map<std::string, ProcPtr>& plugs,
                                     const Bounds& outer, const Bounds& inner) {
  Meta direct = substitute(context, plugs);
  std::map<std::string, ProcPtr> staged;
  for (const auto& [name, q] : plugs) staged.emplace(name, eval(q, inner));
  Meta pre = substitute(context, staged);
  return {eval(direct, outer), eval(pre, outer)};
}

// ---------------------------------------------------------------------------
// the general relation on finite meta-terms, position addressing, origins

namespace {

Path snoc(const Path& p, PathElem e) {
  Path out = p;
  out.push_back(e);
  return out;
}

void gsteps_expr(const ExprPtr& e, const Path& at, std::vector<GStep>& out);

void gsteps_proc(const ProcPtr& p, const Path& at, std::vector<GStep>& out) {
  if (p->k == Proc::K::Susp) throw std::logic_error("general_steps: finite terms only");
  std::vector<GStep> body;
  gsteps_expr(p->body, snoc(at, PathElem{PathElem::K::LamBody, 0}), body);
  for (auto& s : body)
    out.push_back(GStep{s.at, s.rule, Meta(lam(p->binders, std::get<ExprPtr>(s.result)))});
}

void gsteps_args(const GroundPtr& g, const Path& at, PathElem::K kind,
                 std::vector<GStep>& out) {
  for (size_t j = 0; j < g->args.size(); j++) {
    std::vector<GStep> sub;
    gsteps_proc(g->args[j], snoc(at, PathElem{kind, j}), sub);
    for (auto& s : sub) {
      auto args = g->args;
      args[j] = std::get<ProcPtr>(s.result);
      GroundPtr g2 = g->k == Ground::K::VarApp ? var_app(g->head, std::move(args))
                                               : redex(g->fun, std::move(args));
      out.push_back(GStep{s.at, s.rule, Meta(g2)});
    }
  }
}

void gsteps_ground(const GroundPtr& g, const Path& at, std::vector<GStep>& out) {
  switch (g->k) {
    case Ground::K::Expr: {
      std::vector<GStep> sub;
      gsteps_expr(g->expr, snoc(at, PathElem{PathElem::K::GroundExpr, 0}), sub);
      for (auto& s : sub)
        out.push_back(GStep{s.at, s.rule, Meta(ground(std::get<ExprPtr>(s.result)))});
      break;
    }
    case Ground::K::VarApp:
      // (g3) on a bare application
      gsteps_args(g, at, PathElem::K::AppArg, out);
      break;
    case Ground::K::Redex:
      // only the root beta step; the relation has no congruence into redexes
      out.push_back(GStep{at, Rule::B1, Meta(ground(contract_b1(g->fun, g->args)))});
      break;
  }
}

void gsteps_expr(const ExprPtr& e, const Path& at, std::vector<GStep>& out) {
  if (e->k != Expr::K::Case) return;
  const GroundPtr& s = e->scrut;
  switch (s->k) {
    case Ground::K::Expr: {
      const ExprPtr& i = s->expr;
      if (i->k == Expr::K::Bot) out.push_back(GStep{at, Rule::B2, Meta(bot(i->why))});
      if (i->k == Expr::K::Num) out.push_back(GStep{at, Rule::B3, Meta(e->branches.at(i->num))});
      if (i->k == Expr::K::Case)
        out.push_back(GStep{at, Rule::B4,
                            Meta(case_of(i->scrut, compose_case(i->branches, e->branches)))});
      break;
    }
    case Ground::K::Redex: {
      out.push_back(
          GStep{snoc(at, PathElem{PathElem::K::CaseScrut, 0}), Rule::B1,
                Meta(case_of(ground(contract_b1(s->fun, s->args)), e->branches))});
      break;
    }
    case Ground::K::VarApp: {
      // (g3) into arguments, (g4) into branches
      std::vector<GStep> sub;
      gsteps_args(s, snoc(at, PathElem{PathElem::K::CaseScrut, 0}), PathElem::K::AppArg, sub);
      for (auto& st : sub)
        out.push_back(
            GStep{st.at, st.rule, Meta(case_of(std::get<GroundPtr>(st.result), e->branches))});
      for (const auto& [i, br] : e->branches.overrides) {
        std::vector<GStep> bs;
        gsteps_expr(br, snoc(at, PathElem{PathElem::K::CaseBranch, i}), bs);
        for (auto& st : bs)
          out.push_back(GStep{st.at, st.rule,
                              Meta(case_of(s, e->branches.with(i, std::get<ExprPtr>(st.result))))});
      }
      break;
    }
  }
}

}  // namespace

std::vector<GStep> general_steps(const Meta& t) {
  std::vector<GStep> out;
  if (auto* pp = std::get_if<ProcPtr>(&t))
    gsteps_proc(*pp, {}, out);
  else if (auto* ee = std::get_if<ExprPtr>(&t))
    gsteps_expr(*ee, {}, out);
  else
    gsteps_ground(std::get<GroundPtr>(t), {}, out);
  return out;
}

Meta reduce_at(const Meta& t, const Path& at) {
  for (const auto& s : general_steps(t))
    if (s.at == at) return s.result;
  throw std::runtime_error("reduce_at: no redex at position");
}

namespace {

const Meta subterm(const Meta& t, const Path& p, size_t from = 0);

Meta child(const Meta& t, const PathElem& e) {
  switch (e.k) {
    case PathElem::K::LamBody:
      return Meta(force(std::get<ProcPtr>(t))->body);
    case PathElem::K::CaseScrut:
      return Meta(std::get<ExprPtr>(t)->scrut);
    case PathElem::K::CaseBranch:
      return Meta(std::get<ExprPtr>(t)->branches.at(e.idx));
    case PathElem::K::AppArg:
    case PathElem::K::RedexArg:
      return Meta(std::get<GroundPtr>(t)->args.at(e.idx));
    case PathElem::K::RedexFun:
      return Meta(std::get<GroundPtr>(t)->fun);
    case PathElem::K::GroundExpr:
      return Meta(std::get<GroundPtr>(t)->expr);
  }
  throw std::logic_error("unreachable");
}

const Meta subterm(const Meta& t, const Path& p, size_t from) {
  Meta cur = t;
  for (size_t i = from; i < p.size(); i++) cur = child(cur, p[i]);
  return cur;
}

bool is_prefix(const Path& pre, const Path& p) {
  if (pre.size() > p.size()) return false;
  for (size_t i = 0; i < pre.size(); i++)
    if (!(pre[i] == p[i])) return false;
  return true;
}

}  // namespace

std::optional<std::string> var_at(const Meta& t, const Path& p) {
  Meta sub = subterm(t, p);
  if (auto* g = std::get_if<GroundPtr>(&sub))
    if ((*g)->k == Ground::K::VarApp) return (*g)->head.name;
  return std::nullopt;
}

namespace {

// origin position of post_pos across one basic step at `redex` in `pre`
Path origin_one(const Meta& pre, const TraceStep& step, const Path& post_pos) {
  if (!is_prefix(step.at, post_pos)) return post_pos;
  Path rel(post_pos.begin() + long(step.at.size()), post_pos.end());
  Meta red = subterm(pre, step.at);

  switch (step.rule) {
    case Rule::B2: {
      Path out = step.at;
      out.push_back(PathElem{PathElem::K::CaseScrut, 0});
      out.push_back(PathElem{PathElem::K::GroundExpr, 0});
      return out;
    }
    case Rule::B3: {
      const ExprPtr& e = std::get<ExprPtr>(red);
      uint64_t n = e->scrut->expr->num;
      Path out = step.at;
      out.push_back(PathElem{PathElem::K::CaseBranch, n});
      out.insert(out.end(), rel.begin(), rel.end());
      return out;
    }
    case Rule::B4: {
      // post: case G of (i => case E_i of F)
      Path out = step.at;
      if (!rel.empty() && rel[0].k == PathElem::K::CaseScrut) {
        out.push_back(PathElem{PathElem::K::CaseScrut, 0});
        out.push_back(PathElem{PathElem::K::GroundExpr, 0});
        out.push_back(PathElem{PathElem::K::CaseScrut, 0});
        out.insert(out.end(), rel.begin() + 1, rel.end());
        return out;
      }
      if (rel.size() >= 2 && rel[0].k == PathElem::K::CaseBranch) {
        uint64_t i = rel[0].idx;
        if (rel[1].k == PathElem::K::CaseScrut) {
          // inside E_i
          out.push_back(PathElem{PathElem::K::CaseScrut, 0});
          out.push_back(PathElem{PathElem::K::GroundExpr, 0});
          out.push_back(PathElem{PathElem::K::CaseBranch, i});
          if (rel.size() >= 3 && rel[2].k == PathElem::K::GroundExpr)
            out.insert(out.end(), rel.begin() + 3, rel.end());
          else
            out.insert(out.end(), rel.begin() + 2, rel.end());
          return out;
        }
        if (rel[1].k == PathElem::K::CaseBranch) {
          // inside the copied outer branch F_j
          out.push_back(PathElem{PathElem::K::CaseBranch, rel[1].idx});
          out.insert(out.end(), rel.begin() + 2, rel.end());
          return out;
        }
      }
      return post_pos;  // positions at the node itself
    }
    case Rule::B1: {
      // the recorded position addresses the redex ground; the contractum is
      // the wrapped substituted body, so post positions hop through GroundExpr
      Path base = step.at;
      const GroundPtr& g = std::get<GroundPtr>(red);
      if (rel.empty() || rel[0].k != PathElem::K::GroundExpr) return post_pos;
      rel.erase(rel.begin());
      ProcPtr f = force(g->fun);
      std::map<std::string, size_t> param_ix;
      for (size_t i = 0; i < f->binders.size(); i++) param_ix[f->binders[i].name] = i;

      // lockstep walk of the pre body and the relative post position
      Meta cur = Meta(f->body);
      Path body_pos;  // position within the body
      size_t k = 0;
      // the post side at `rel` navigates the substituted body
      while (k < rel.size()) {
        if (auto* gg = std::get_if<GroundPtr>(&cur)) {
          const GroundPtr& gc = *gg;
          if (gc->k == Ground::K::VarApp && param_ix.count(gc->head.name)) {
            size_t i = param_ix.at(gc->head.name);
            if (rel[k].k == PathElem::K::RedexFun) {
              // inside the copy of Q_i
              Path out = base;
              out.push_back(PathElem{PathElem::K::RedexArg, i});
              out.insert(out.end(), rel.begin() + long(k) + 1, rel.end());
              return out;
            }
            if (rel[k].k == PathElem::K::RedexArg) {
              // argument j of the rewritten application: descend pre arg j
              body_pos.push_back(PathElem{PathElem::K::AppArg, rel[k].idx});
              cur = Meta(gc->args.at(rel[k].idx));
              k++;
              continue;
            }
            break;
          }
        }
        body_pos.push_back(rel[k]);
        cur = child(cur, rel[k]);
        k++;
      }
      Path out = base;
      out.push_back(PathElem{PathElem::K::RedexFun, 0});
      out.push_back(PathElem{PathElem::K::LamBody, 0});
      out.insert(out.end(), body_pos.begin(), body_pos.end());
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

OccurrenceRef origin_of(const Meta& initial, const EvalTrace& trace, const OccurrenceRef& occ) {
  // replay forward to collect intermediate terms
  std::vector<Meta> terms{initial};
  for (const auto& s : trace.steps) terms.push_back(reduce_at(terms.back(), s.at));
  Path pos = occ.path;
  if (auto v = var_at(terms.back(), pos); !v || *v != occ.var)
    throw std::runtime_error("origin_of: occurrence does not resolve to " + occ.var);
  for (size_t i = trace.steps.size(); i-- > 0;)
    pos = origin_one(terms[i], trace.steps[i], pos);
  auto v = var_at(initial, pos);
  return OccurrenceRef{pos, v ? *v : occ.var};
}

}  // namespace nsp
