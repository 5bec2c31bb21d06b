#include "nsp/term_ops.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsp {

namespace {

struct SubstEnv {
  std::map<std::string, ProcPtr> procs;
  std::map<std::string, Var> renames;

  bool empty() const { return procs.empty() && renames.empty(); }

  SubstEnv restrict_to(const std::set<std::string>& live) const {
    SubstEnv out;
    for (const auto& [k, v] : procs)
      if (live.count(k)) out.procs.emplace(k, v);
    for (const auto& [k, v] : renames)
      if (live.count(k)) out.renames.emplace(k, v);
    return out;
  }

  std::set<std::string> domain() const {
    std::set<std::string> d;
    for (const auto& [k, v] : procs) d.insert(k);
    for (const auto& [k, v] : renames) d.insert(k);
    return d;
  }

  // names free in any substituted value
  std::set<std::string> value_frees() const {
    std::set<std::string> out;
    for (const auto& [k, v] : procs) {
      auto f = free_vars(v);
      out.insert(f.begin(), f.end());
    }
    for (const auto& [k, v] : renames) out.insert(v.name);
    return out;
  }
};

ExprPtr subst_expr(const ExprPtr& e, const SubstEnv& env);
GroundPtr subst_ground(const GroundPtr& g, const SubstEnv& env);

ProcPtr subst_proc(const ProcPtr& p, const SubstEnv& env0) {
  auto fvs = free_vars(p);
  SubstEnv env = env0.restrict_to(fvs);
  if (env.empty()) return p;

  if (p->k == Proc::K::Susp) {
    std::set<std::string> frees;
    auto dom = env.domain();
    for (const auto& n : p->cell->free_names()) {
      if (!dom.count(n)) {
        frees.insert(n);
        continue;
      }
      auto it = env.procs.find(n);
      if (it != env.procs.end()) {
        auto f = free_vars(it->second);
        frees.insert(f.begin(), f.end());
      } else {
        frees.insert(env.renames.at(n).name);
      }
    }
    ProcPtr inner = p;
    return suspend(p->cell->type(), std::move(frees),
                   [inner, env]() { return subst_proc(force(inner), env); });
  }

  // drop shadowed entries; freshen binders that would capture
  for (const auto& b : p->binders) {
    env.procs.erase(b.name);
    env.renames.erase(b.name);
  }
  std::set<std::string> danger = env.value_frees();
  std::vector<Var> binders = p->binders;
  bool renamed = false;
  if (!env.empty()) {
    std::set<std::string> avoid = danger;
    auto bodyf = free_vars(p->body);
    avoid.insert(bodyf.begin(), bodyf.end());
    for (const auto& b : binders) avoid.insert(b.name);
    NameSupply supply(avoid);
    for (auto& b : binders) {
      if (danger.count(b.name)) {
        Var nb{supply.fresh(b.name), b.type};
        env.renames[b.name] = nb;
        b = nb;
        renamed = true;
      }
    }
  }
  if (env.empty() && !renamed) return p;
  return lam(std::move(binders), subst_expr(p->body, env));
}

GroundPtr subst_ground(const GroundPtr& g, const SubstEnv& env) {
  switch (g->k) {
    case Ground::K::Expr:
      return ground(subst_expr(g->expr, env));
    case Ground::K::VarApp: {
      std::vector<ProcPtr> args;
      args.reserve(g->args.size());
      for (const auto& q : g->args) args.push_back(subst_proc(q, env));
      auto it = env.procs.find(g->head.name);
      if (it != env.procs.end()) return redex(it->second, std::move(args));
      auto rn = env.renames.find(g->head.name);
      Var head = rn != env.renames.end() ? rn->second : g->head;
      return var_app(head, std::move(args));
    }
    case Ground::K::Redex: {
      std::vector<ProcPtr> args;
      args.reserve(g->args.size());
      for (const auto& q : g->args) args.push_back(subst_proc(q, env));
      return redex(subst_proc(g->fun, env), std::move(args));
    }
  }
  throw std::logic_error("unreachable");
}

BranchFamily subst_family(const BranchFamily& f, const SubstEnv& env) {
  BranchFamily out = f;
  for (auto& [i, b] : out.overrides) b = subst_expr(b, env);
  if (f.def == BranchFamily::Default::Gen) {
    auto dom = env.domain();
    const auto& gf = f.gen->free_names();
    bool hit = std::any_of(gf.begin(), gf.end(),
                           [&](const std::string& n) { return dom.count(n) > 0; });
    if (hit) {
      std::set<std::string> frees;
      for (const auto& n : gf) {
        auto it = env.procs.find(n);
        if (it != env.procs.end()) {
          auto vf = free_vars(it->second);
          frees.insert(vf.begin(), vf.end());
        } else if (env.renames.count(n)) {
          frees.insert(env.renames.at(n).name);
        } else {
          frees.insert(n);
        }
      }
      auto inner = f.gen;
      out.gen = std::make_shared<const FamilyGen>(
          std::move(frees), [inner, env](uint64_t i) { return subst_expr(inner->at(i), env); });
    }
  }
  return out;
}

ExprPtr subst_expr(const ExprPtr& e, const SubstEnv& env) {
  if (e->k != Expr::K::Case || env.empty()) return e;
  return case_of(subst_ground(e->scrut, env), subst_family(e->branches, env));
}

SubstEnv to_env(const std::map<std::string, ProcPtr>& binding) {
  SubstEnv env;
  env.procs = binding;
  return env;
}

}  // namespace

ProcPtr substitute(const ProcPtr& p, const std::map<std::string, ProcPtr>& binding) {
  return subst_proc(p, to_env(binding));
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ProcPtr>& binding) {
  return subst_expr(e, to_env(binding));
}

GroundPtr substitute(const GroundPtr& g, const std::map<std::string, ProcPtr>& binding) {
  return subst_ground(g, to_env(binding));
}

Meta substitute(const Meta& t, const std::map<std::string, ProcPtr>& binding) {
  if (auto* p = std::get_if<ProcPtr>(&t)) return substitute(*p, binding);
  if (auto* e = std::get_if<ExprPtr>(&t)) return substitute(*e, binding);
  return substitute(std::get<GroundPtr>(t), binding);
}

// ---------------------------------------------------------------------------
// truncation

namespace {

GroundPtr trunc_ground(const GroundPtr& g, const Bounds& b);

ProcPtr trunc_proc(const ProcPtr& p, const Bounds& b) {
  ProcPtr q = force(p);
  return lam(q->binders, truncate(q->body, b));
}

BranchFamily trunc_family(const BranchFamily& f, const Bounds& b) {
  BranchFamily out;
  Bounds inner = b.cut();
  bool dropped = false;
  for (const auto& [i, e] : f.overrides) {
    if (i < b.branch_bound)
      out.overrides[i] = truncate(e, inner);
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
        if (!out.overrides.count(i)) out.overrides[i] = truncate(f.at(i), inner);
      out.def = BranchFamily::Default::AllBot;
      out.elided = true;
      break;
  }
  return out;
}

GroundPtr trunc_ground(const GroundPtr& g, const Bounds& b) {
  switch (g->k) {
    case Ground::K::Expr:
      return ground(truncate(g->expr, b));
    case Ground::K::VarApp: {
      std::vector<ProcPtr> args;
      args.reserve(g->args.size());
      for (const auto& q : g->args) args.push_back(trunc_proc(q, b));
      return var_app(g->head, std::move(args));
    }
    case Ground::K::Redex: {
      std::vector<ProcPtr> args;
      args.reserve(g->args.size());
      for (const auto& q : g->args) args.push_back(trunc_proc(q, b));
      return redex(trunc_proc(g->fun, b), std::move(args));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

ExprPtr truncate(const ExprPtr& e, const Bounds& b) {
  if (e->k != Expr::K::Case) return e;
  if (b.depth <= 0) return bot(BotWhy::Cut);
  Bounds inner = b.cut();
  return case_of(trunc_ground(e->scrut, inner), trunc_family(e->branches, b));
}

ProcPtr truncate(const ProcPtr& p, const Bounds& b) { return trunc_proc(p, b); }

Meta truncate(const Meta& t, const Bounds& b) {
  if (auto* p = std::get_if<ProcPtr>(&t)) return truncate(*p, b);
  if (auto* e = std::get_if<ExprPtr>(&t)) return truncate(*e, b);
  return Meta(trunc_ground(std::get<GroundPtr>(t), b));
}

// ---------------------------------------------------------------------------
// alpha-equivalence and the syntactic order, on truncated views

namespace {

// binder occurrence -> de-Bruijn-style slot
using Slots = std::map<std::string, int>;

struct Cmp {
  bool leq_mode = false;  // true: compare for sqsubseteq instead of equality

  bool expr(const ExprPtr& a, const ExprPtr& b, Slots& ma, Slots& mb, int& next);
  bool ground(const GroundPtr& a, const GroundPtr& b, Slots& ma, Slots& mb, int& next);
  bool proc(const ProcPtr& a, const ProcPtr& b, Slots& ma, Slots& mb, int& next);
  bool family(const BranchFamily& a, const BranchFamily& b, Slots& ma, Slots& mb, int& next);
  bool head(const Var& a, const Var& b, const Slots& ma, const Slots& mb);
};

bool Cmp::head(const Var& a, const Var& b, const Slots& ma, const Slots& mb) {
  auto ia = ma.find(a.name);
  auto ib = mb.find(b.name);
  if ((ia != ma.end()) != (ib != mb.end())) return false;
  if (ia != ma.end()) return ia->second == ib->second;
  return a.name == b.name && a.type == b.type;
}

bool Cmp::proc(const ProcPtr& a, const ProcPtr& b, Slots& ma, Slots& mb, int& next) {
  if (a->k != Proc::K::Lam || b->k != Proc::K::Lam)
    throw std::logic_error("compare requires truncated terms");
  if (a->binders.size() != b->binders.size()) return false;
  Slots ma2 = ma, mb2 = mb;
  for (size_t i = 0; i < a->binders.size(); i++) {
    if (!(a->binders[i].type == b->binders[i].type)) return false;
    ma2[a->binders[i].name] = next;
    mb2[b->binders[i].name] = next;
    next++;
  }
  return expr(a->body, b->body, ma2, mb2, next);
}

bool Cmp::ground(const GroundPtr& a, const GroundPtr& b, Slots& ma, Slots& mb, int& next) {
  if (a->k != b->k) return false;
  switch (a->k) {
    case Ground::K::Expr:
      return expr(a->expr, b->expr, ma, mb, next);
    case Ground::K::VarApp: {
      if (!head(a->head, b->head, ma, mb)) return false;
      if (a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); i++)
        if (!proc(a->args[i], b->args[i], ma, mb, next)) return false;
      return true;
    }
    case Ground::K::Redex: {
      if (a->args.size() != b->args.size()) return false;
      if (!proc(a->fun, b->fun, ma, mb, next)) return false;
      for (size_t i = 0; i < a->args.size(); i++)
        if (!proc(a->args[i], b->args[i], ma, mb, next)) return false;
      return true;
    }
  }
  return false;
}

bool Cmp::family(const BranchFamily& a, const BranchFamily& b, Slots& ma, Slots& mb, int& next) {
  std::set<uint64_t> keys;
  for (const auto& [i, e] : a.overrides) keys.insert(i);
  for (const auto& [i, e] : b.overrides) keys.insert(i);
  for (uint64_t i : keys)
    if (!expr(a.at(i), b.at(i), ma, mb, next)) return false;
  auto kind = [](const BranchFamily& f) {
    return f.def == BranchFamily::Default::Affine ? 1 : 0;
  };
  if (leq_mode) {
    // default of a must sit below default of b pointwise beyond the keys
    if (kind(a) == 0) return true;  // bot below anything
    return kind(b) == 1 && a.offset == b.offset;
  }
  if (kind(a) != kind(b)) return false;
  return kind(a) == 0 || a.offset == b.offset;
}

bool Cmp::expr(const ExprPtr& a, const ExprPtr& b, Slots& ma, Slots& mb, int& next) {
  if (leq_mode && a->k == Expr::K::Bot) return true;
  if (a->k != b->k) return false;
  switch (a->k) {
    case Expr::K::Bot:
      return true;  // flags are bookkeeping
    case Expr::K::Num:
      return a->num == b->num;
    case Expr::K::Case:
      return ground(a->scrut, b->scrut, ma, mb, next) && family(a->branches, b->branches, ma, mb, next);
  }
  return false;
}

bool run_cmp(const Meta& t, const Meta& u, const Bounds& b, bool leq) {
  if (t.index() != u.index()) return false;
  Meta tt = truncate(t, b), uu = truncate(u, b);
  Cmp c;
  c.leq_mode = leq;
  Slots ma, mb;
  int next = 0;
  if (auto* p = std::get_if<ProcPtr>(&tt)) return c.proc(*p, std::get<ProcPtr>(uu), ma, mb, next);
  if (auto* e = std::get_if<ExprPtr>(&tt)) return c.expr(*e, std::get<ExprPtr>(uu), ma, mb, next);
  return c.ground(std::get<GroundPtr>(tt), std::get<GroundPtr>(uu), ma, mb, next);
}

}  // namespace

bool alpha_eq(const Meta& t, const Meta& u, const Bounds& b) { return run_cmp(t, u, b, false); }
bool alpha_eq(const ProcPtr& t, const ProcPtr& u, const Bounds& b) {
  return alpha_eq(Meta(t), Meta(u), b);
}
bool alpha_eq(const ExprPtr& t, const ExprPtr& u, const Bounds& b) {
  return alpha_eq(Meta(t), Meta(u), b);
}
bool syn_leq(const Meta& t, const Meta& u, const Bounds& b) { return run_cmp(t, u, b, true); }
bool syn_leq(const ProcPtr& t, const ProcPtr& u, const Bounds& b) {
  return syn_leq(Meta(t), Meta(u), b);
}

// ---------------------------------------------------------------------------
// eta-expansion

namespace {

ProcPtr eta_rec(const Var& x, uint64_t& counter) {
  if (x.type.is_base()) return lam({}, case_of(var_app(x), BranchFamily::affine(0)));
  auto argts = x.type.args();
  std::vector<Var> binders;
  binders.reserve(argts.size());
  for (const auto& at : argts)
    binders.push_back(Var{x.name + "." + std::to_string(counter++), at});
  std::vector<ProcPtr> args;
  args.reserve(binders.size());
  for (const auto& z : binders) args.push_back(eta_rec(z, counter));
  return lam(std::move(binders), case_of(var_app(x, std::move(args)), BranchFamily::affine(0)));
}

}  // namespace

ProcPtr eta_expand(const Var& x) {
  uint64_t counter = 0;
  return eta_rec(x, counter);
}

// ---------------------------------------------------------------------------
// rightward-leaf substitution

std::set<std::string> family_frees(const BranchFamily& f) {
  std::set<std::string> out;
  for (const auto& [i, e] : f.overrides) {
    auto fe = free_vars(e);
    out.insert(fe.begin(), fe.end());
  }
  if (f.def == BranchFamily::Default::Gen) {
    const auto& g = f.gen->free_names();
    out.insert(g.begin(), g.end());
  }
  return out;
}

namespace {

BranchFamily compose_leaf(const BranchFamily& t, const BranchFamily& f);

ExprPtr leaf_expr(const ExprPtr& e, const BranchFamily& f) {
  switch (e->k) {
    case Expr::K::Bot:
      return e;
    case Expr::K::Num:
      return f.at(e->num);
    case Expr::K::Case:
      return case_of(e->scrut, compose_leaf(e->branches, f));
  }
  throw std::logic_error("unreachable");
}

BranchFamily compose_leaf(const BranchFamily& t, const BranchFamily& f) {
  BranchFamily out;
  out.elided = t.elided;
  for (const auto& [i, e] : t.overrides) out.overrides[i] = leaf_expr(e, f);
  switch (t.def) {
    case BranchFamily::Default::AllBot:
      out.def = BranchFamily::Default::AllBot;
      break;
    case BranchFamily::Default::Affine: {
      // default branch i is the numeral i + t.offset, replaced by f(i + t.offset)
      int64_t a = t.offset;
      for (const auto& [j, e] : f.overrides) {
        int64_t i = int64_t(j) - a;
        if (i >= 0 && !out.overrides.count(uint64_t(i))) out.overrides[uint64_t(i)] = e;
      }
      switch (f.def) {
        case BranchFamily::Default::AllBot:
          out.def = BranchFamily::Default::AllBot;
          out.elided = out.elided || f.elided;
          break;
        case BranchFamily::Default::Affine:
          out.def = BranchFamily::Default::Affine;
          out.offset = a + f.offset;
          break;
        case BranchFamily::Default::Gen: {
          auto inner = f.gen;
          out.def = BranchFamily::Default::Gen;
          out.gen = std::make_shared<const FamilyGen>(
              inner->free_names(), [inner, a](uint64_t i) { return inner->at(uint64_t(int64_t(i) + a)); });
          break;
        }
      }
      break;
    }
    case BranchFamily::Default::Gen: {
      auto inner = t.gen;
      auto frees = inner->free_names();
      auto ff = family_frees(f);
      frees.insert(ff.begin(), ff.end());
      out.def = BranchFamily::Default::Gen;
      out.gen = std::make_shared<const FamilyGen>(
          std::move(frees), [inner, f](uint64_t i) { return leaf_expr(inner->at(i), f); });
      break;
    }
  }
  return out;
}

}  // namespace

ExprPtr leaf_subst(const ExprPtr& e, const BranchFamily& family) { return leaf_expr(e, family); }

ProcPtr leaf_subst(const ProcPtr& p, const BranchFamily& family) {
  if (p->k == Proc::K::Susp) {
    auto frees = p->cell->free_names();
    auto ff = family_frees(family);
    frees.insert(ff.begin(), ff.end());
    ProcPtr inner = p;
    return suspend(p->cell->type(), std::move(frees),
                   [inner, family]() { return leaf_subst(force(inner), family); });
  }
  return lam(p->binders, leaf_expr(p->body, family));
}

// ---------------------------------------------------------------------------
// regularity

namespace {

bool regular_expr(const ExprPtr& e, const Var& g, const RegularMode& m);

bool regular_proc(const ProcPtr& p, const Var& g, const RegularMode& m) {
  for (const auto& b : p->binders)
    if (!m.admits(b.type)) return false;
  return regular_expr(p->body, g, m);
}

bool regular_ground(const GroundPtr& gr, const Var& g, const RegularMode& m) {
  switch (gr->k) {
    case Ground::K::Expr:
      return regular_expr(gr->expr, g, m);
    case Ground::K::VarApp: {
      if (gr->head.name != g.name && !m.admits(gr->head.type)) return false;
      for (const auto& q : gr->args)
        if (!regular_proc(q, g, m)) return false;
      return true;
    }
    case Ground::K::Redex: {
      if (!regular_proc(gr->fun, g, m)) return false;
      for (const auto& q : gr->args)
        if (!regular_proc(q, g, m)) return false;
      return true;
    }
  }
  return false;
}

bool regular_expr(const ExprPtr& e, const Var& g, const RegularMode& m) {
  if (e->k != Expr::K::Case) return true;
  if (!regular_ground(e->scrut, g, m)) return false;
  for (const auto& [i, br] : e->branches.overrides)
    if (!regular_expr(br, g, m)) return false;
  return true;
}

}  // namespace

bool check_regular(const Meta& t, const Var& g, const RegularMode& mode, const Bounds& b) {
  Meta view = truncate(t, b);
  if (auto* p = std::get_if<ProcPtr>(&view)) return regular_proc(*p, g, mode);
  if (auto* e = std::get_if<ExprPtr>(&view)) return regular_expr(*e, g, mode);
  return regular_ground(std::get<GroundPtr>(view), g, mode);
}

}  // namespace nsp
