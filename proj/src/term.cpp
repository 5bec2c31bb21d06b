#include "nsp/term.hpp"

#include <stdexcept>

namespace nsp {

ExprPtr FamilyGen::at(uint64_t i) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = memo_.find(i);
  if (it != memo_.end()) return it->second;
  ExprPtr e = fn_(i);
  memo_.emplace(i, e);
  return e;
}

ExprPtr BranchFamily::at(uint64_t i) const {
  auto it = overrides.find(i);
  if (it != overrides.end()) return it->second;
  switch (def) {
    case Default::AllBot:
      return bot(elided ? BotWhy::Cut : BotWhy::Bottom);
    case Default::Affine: {
      int64_t v = int64_t(i) + offset;
      if (v < 0) throw std::logic_error("affine branch below zero");
      return num(uint64_t(v));
    }
    case Default::Gen:
      return gen->at(i);
  }
  return bot();
}

BranchFamily BranchFamily::all_bot() { return BranchFamily{}; }

BranchFamily BranchFamily::affine(int64_t offset) {
  BranchFamily f;
  f.def = Default::Affine;
  f.offset = offset;
  return f;
}

BranchFamily BranchFamily::generator(std::set<std::string> free,
                                     std::function<ExprPtr(uint64_t)> fn) {
  BranchFamily f;
  f.def = Default::Gen;
  f.gen = std::make_shared<const FamilyGen>(std::move(free), std::move(fn));
  return f;
}

BranchFamily BranchFamily::with(uint64_t i, ExprPtr e) const {
  BranchFamily f = *this;
  f.overrides[i] = std::move(e);
  return f;
}

ProcPtr SuspCell::get() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!memo_) {
    memo_ = make_();
    if (!memo_ || memo_->k != Proc::K::Lam) throw std::logic_error("suspension must force to a lambda");
  }
  return memo_;
}

ExprPtr bot(BotWhy why) {
  auto e = std::make_shared<Expr>();
  e->k = Expr::K::Bot;
  e->why = why;
  return e;
}

ExprPtr num(uint64_t n) {
  auto e = std::make_shared<Expr>();
  e->k = Expr::K::Num;
  e->num = n;
  return e;
}

ExprPtr case_of(GroundPtr scrut, BranchFamily branches) {
  auto e = std::make_shared<Expr>();
  e->k = Expr::K::Case;
  e->scrut = std::move(scrut);
  e->branches = std::move(branches);
  return e;
}

GroundPtr ground(ExprPtr e) {
  auto g = std::make_shared<Ground>();
  g->k = Ground::K::Expr;
  g->expr = std::move(e);
  return g;
}

GroundPtr var_app(Var head, std::vector<ProcPtr> args) {
  auto g = std::make_shared<Ground>();
  g->k = Ground::K::VarApp;
  g->head = std::move(head);
  g->args = std::move(args);
  return g;
}

GroundPtr redex(ProcPtr fun, std::vector<ProcPtr> args) {
  auto g = std::make_shared<Ground>();
  g->k = Ground::K::Redex;
  g->fun = std::move(fun);
  g->args = std::move(args);
  return g;
}

ProcPtr lam(std::vector<Var> binders, ExprPtr body) {
  auto p = std::make_shared<Proc>();
  p->k = Proc::K::Lam;
  p->binders = std::move(binders);
  p->body = std::move(body);
  return p;
}

ProcPtr suspend(Type type, std::set<std::string> free_names, std::function<ProcPtr()> make) {
  auto p = std::make_shared<Proc>();
  p->k = Proc::K::Susp;
  p->cell = std::make_shared<const SuspCell>(type, std::move(free_names), std::move(make));
  return p;
}

ProcPtr bot_proc(const Type& type, BotWhy why) {
  std::vector<Var> binders;
  auto args = type.args();
  for (size_t i = 0; i < args.size(); i++)
    binders.push_back(Var{"w" + std::to_string(i), args[i]});
  return lam(std::move(binders), bot(why));
}

ProcPtr force(const ProcPtr& p) {
  if (p->k == Proc::K::Lam) return p;
  return p->cell->get();
}

Type proc_type(const ProcPtr& p) {
  if (p->k == Proc::K::Susp) return p->cell->type();
  std::vector<Type> args;
  args.reserve(p->binders.size());
  for (const auto& b : p->binders) args.push_back(b.type);
  return Type::arrows(args);
}

bool flagged(BotWhy w) { return w != BotWhy::Bottom; }

namespace {

void fv_expr(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out);
void fv_ground(const GroundPtr& g, std::set<std::string>& bound, std::set<std::string>& out);

void fv_proc(const ProcPtr& p, std::set<std::string>& bound, std::set<std::string>& out) {
  if (p->k == Proc::K::Susp) {
    for (const auto& n : p->cell->free_names())
      if (!bound.count(n)) out.insert(n);
    return;
  }
  std::vector<std::string> added;
  for (const auto& b : p->binders)
    if (bound.insert(b.name).second) added.push_back(b.name);
  fv_expr(p->body, bound, out);
  for (const auto& n : added) bound.erase(n);
}

void fv_ground(const GroundPtr& g, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (g->k) {
    case Ground::K::Expr:
      fv_expr(g->expr, bound, out);
      break;
    case Ground::K::VarApp:
      if (!bound.count(g->head.name)) out.insert(g->head.name);
      for (const auto& q : g->args) fv_proc(q, bound, out);
      break;
    case Ground::K::Redex:
      fv_proc(g->fun, bound, out);
      for (const auto& q : g->args) fv_proc(q, bound, out);
      break;
  }
}

void fv_expr(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  if (e->k != Expr::K::Case) return;
  fv_ground(e->scrut, bound, out);
  for (const auto& [i, b] : e->branches.overrides) fv_expr(b, bound, out);
  if (e->branches.def == BranchFamily::Default::Gen)
    for (const auto& n : e->branches.gen->free_names())
      if (!bound.count(n)) out.insert(n);
}

}  // namespace

std::set<std::string> free_vars(const ExprPtr& e) {
  std::set<std::string> bound, out;
  fv_expr(e, bound, out);
  return out;
}

std::set<std::string> free_vars(const GroundPtr& g) {
  std::set<std::string> bound, out;
  fv_ground(g, bound, out);
  return out;
}

std::set<std::string> free_vars(const ProcPtr& p) {
  std::set<std::string> bound, out;
  fv_proc(p, bound, out);
  return out;
}

std::set<std::string> free_vars(const Meta& t) {
  if (auto* p = std::get_if<ProcPtr>(&t)) return free_vars(*p);
  if (auto* e = std::get_if<ExprPtr>(&t)) return free_vars(*e);
  return free_vars(std::get<GroundPtr>(t));
}

namespace {

bool term_expr(const ExprPtr& e, int depth);

bool term_proc(const ProcPtr& p, int depth) {
  if (depth <= 0) return true;
  return term_expr(force(p)->body, depth);
}

bool term_expr(const ExprPtr& e, int depth) {
  if (e->k != Expr::K::Case) return true;
  if (depth <= 0) return true;
  if (e->scrut->k != Ground::K::VarApp) return false;
  for (const auto& q : e->scrut->args)
    if (!term_proc(q, depth - 1)) return false;
  for (const auto& [i, b] : e->branches.overrides)
    if (!term_expr(b, depth - 1)) return false;
  return true;
}

}  // namespace

bool is_term(const Meta& t, int depth) {
  if (auto* p = std::get_if<ProcPtr>(&t)) return term_proc(*p, depth);
  if (auto* e = std::get_if<ExprPtr>(&t)) return term_expr(*e, depth);
  const auto& g = std::get<GroundPtr>(t);
  if (g->k == Ground::K::Redex) return false;
  if (g->k == Ground::K::Expr) return term_expr(g->expr, depth);
  for (const auto& q : g->args)
    if (!term_proc(q, depth - 1)) return false;
  return true;
}

namespace {

using TypeEnv = std::map<std::string, Type>;

void tc_expr(const ExprPtr& e, const TypeEnv& env);

Type tc_proc(const ProcPtr& p, const TypeEnv& env) {
  if (p->k == Proc::K::Susp) return p->cell->type();
  TypeEnv inner = env;
  for (const auto& b : p->binders) {
    if (inner.count(b.name) && !(inner.at(b.name) == b.type))
      throw std::runtime_error("rebinding changes type of " + b.name);
    inner[b.name] = b.type;
  }
  tc_expr(p->body, inner);
  return proc_type(p);
}

void tc_args(const Type& fn, const std::vector<ProcPtr>& args, const TypeEnv& env,
             const std::string& what) {
  Type t = fn;
  for (const auto& q : args) {
    if (t.is_base()) throw std::runtime_error(what + ": too many arguments");
    Type qt = tc_proc(q, env);
    if (!(qt == t.arg()))
      throw std::runtime_error(what + ": argument type " + qt.str() + " does not match " +
                               t.arg().str());
    t = t.result();
  }
  if (!t.is_base()) throw std::runtime_error(what + ": not fully applied");
}

void tc_ground(const GroundPtr& g, const TypeEnv& env) {
  switch (g->k) {
    case Ground::K::Expr:
      tc_expr(g->expr, env);
      return;
    case Ground::K::VarApp: {
      auto it = env.find(g->head.name);
      if (it == env.end()) throw std::runtime_error("unbound variable " + g->head.name);
      if (!(it->second == g->head.type))
        throw std::runtime_error("variable " + g->head.name + " used at wrong type");
      tc_args(it->second, g->args, env, "application of " + g->head.name);
      return;
    }
    case Ground::K::Redex: {
      Type ft = tc_proc(g->fun, env);
      if (size_t(ft.arity()) != g->args.size())
        throw std::runtime_error("redex must consume all binders");
      tc_args(ft, g->args, env, "redex");
      return;
    }
  }
}

void tc_expr(const ExprPtr& e, const TypeEnv& env) {
  if (e->k != Expr::K::Case) return;
  tc_ground(e->scrut, env);
  for (const auto& [i, b] : e->branches.overrides) tc_expr(b, env);
}

}  // namespace

void typecheck(const Meta& t, const std::map<std::string, Type>& env) {
  if (auto* p = std::get_if<ProcPtr>(&t)) {
    tc_proc(*p, env);
    return;
  }
  if (auto* e = std::get_if<ExprPtr>(&t)) {
    tc_expr(*e, env);
    return;
  }
  tc_ground(std::get<GroundPtr>(t), env);
}

Type type_of(const Meta& t, const std::map<std::string, Type>& env) {
  if (auto* p = std::get_if<ProcPtr>(&t)) return tc_proc(*p, env);
  typecheck(t, env);
  return Type::base();
}

std::string NameSupply::fresh(const std::string& base) {
  if (!avoid_.count(base)) {
    avoid_.insert(base);
    return base;
  }
  for (uint64_t i = 1;; i++) {
    std::string cand = base + "~" + std::to_string(i);
    if (!avoid_.count(cand)) {
      avoid_.insert(cand);
      return cand;
    }
  }
}

}  // namespace nsp
