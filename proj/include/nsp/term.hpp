#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nsp/types.hpp"

namespace nsp {

// Nested sequential procedures and their meta-term calculus share one node
// family.  Terms (normal forms) are the meta-terms without redexes whose case
// scrutinees are variable-headed applications; is_term() checks this.
//
// Possibly-infinite trees are realized by two lazy devices: suspended
// procedures (Proc::K::Susp, forced on demand, memoized) and on-demand branch
// generators inside BranchFamily.  Everything else is immutable and eager.

struct Expr;
struct Ground;
struct Proc;
using ExprPtr = std::shared_ptr<const Expr>;
using GroundPtr = std::shared_ptr<const Ground>;
using ProcPtr = std::shared_ptr<const Proc>;

struct Var {
  std::string name;
  Type type;

  bool operator==(const Var& o) const { return name == o.name; }
  bool operator<(const Var& o) const { return name < o.name; }
};

// Bottom leaves distinguish the genuine undefined from artifacts of bounded
// computation: Cut marks depth/branch truncation, Fuel marks an exhausted
// head-reduction budget.  Verdicts may rely on genuine values only.
enum class BotWhy : uint8_t { Bottom, Cut, Fuel };

class FamilyGen {
public:
  FamilyGen(std::set<std::string> free, std::function<ExprPtr(uint64_t)> fn)
      : free_(std::move(free)), fn_(std::move(fn)) {}
  ExprPtr at(uint64_t i) const;
  const std::set<std::string>& free_names() const { return free_; }

private:
  std::set<std::string> free_;
  std::function<ExprPtr(uint64_t)> fn_;
  mutable std::map<uint64_t, ExprPtr> memo_;
  mutable std::mutex mu_;
};

// An infinite sequence of branches (i => e_i | i in N): finitely many explicit
// overrides plus a total default rule.  Lookup is override-first.
struct BranchFamily {
  enum class Default : uint8_t { AllBot, Affine, Gen };

  std::map<uint64_t, ExprPtr> overrides;
  Default def = Default::AllBot;
  int64_t offset = 0;                    // Affine: i => i + offset
  std::shared_ptr<const FamilyGen> gen;  // Gen: i => gen(i), memoized
  bool elided = false;                   // a truncation dropped branches here

  ExprPtr at(uint64_t i) const;
  bool closed_form() const { return def != Default::Gen; }

  static BranchFamily all_bot();
  static BranchFamily affine(int64_t offset);
  static BranchFamily generator(std::set<std::string> free, std::function<ExprPtr(uint64_t)> fn);
  BranchFamily with(uint64_t i, ExprPtr e) const;
};

struct Expr {
  enum class K : uint8_t { Bot, Num, Case };
  K k;
  BotWhy why = BotWhy::Bottom;  // Bot
  uint64_t num = 0;             // Num
  GroundPtr scrut;              // Case
  BranchFamily branches;        // Case
};

struct Ground {
  enum class K : uint8_t { Expr, VarApp, Redex };
  K k;
  ExprPtr expr;                // Expr
  Var head{"", Type::base()};  // VarApp
  ProcPtr fun;                 // Redex; empty args is the explicit "()" form
  std::vector<ProcPtr> args;   // VarApp / Redex
};

// Suspended procedure: forced at most once, result memoized.  The cell records
// the type and free-variable set so substitution and typing need not force it.
class SuspCell {
public:
  SuspCell(Type type, std::set<std::string> free, std::function<ProcPtr()> make)
      : type_(type), free_(std::move(free)), make_(std::move(make)) {}
  const Type& type() const { return type_; }
  const std::set<std::string>& free_names() const { return free_; }
  ProcPtr get() const;

private:
  Type type_;
  std::set<std::string> free_;
  std::function<ProcPtr()> make_;
  mutable ProcPtr memo_;
  mutable std::mutex mu_;
};

struct Proc {
  enum class K : uint8_t { Lam, Susp };
  K k;
  std::vector<Var> binders;  // Lam
  ExprPtr body;              // Lam
  std::shared_ptr<const SuspCell> cell;
};

ExprPtr bot(BotWhy why = BotWhy::Bottom);
ExprPtr num(uint64_t n);
ExprPtr case_of(GroundPtr scrut, BranchFamily branches);
GroundPtr ground(ExprPtr e);
GroundPtr var_app(Var head, std::vector<ProcPtr> args = {});
GroundPtr redex(ProcPtr fun, std::vector<ProcPtr> args = {});
ProcPtr lam(std::vector<Var> binders, ExprPtr body);
ProcPtr suspend(Type type, std::set<std::string> free_names, std::function<ProcPtr()> make);
// lambda x~vec . bot, the canonical bottom procedure of a type
ProcPtr bot_proc(const Type& type, BotWhy why = BotWhy::Bottom);

ProcPtr force(const ProcPtr& p);
Type proc_type(const ProcPtr& p);
bool flagged(BotWhy w);  // Cut or Fuel

// Meta-terms of the three syntactic categories.
using Meta = std::variant<ProcPtr, ExprPtr, GroundPtr>;

// depth counts nested case levels; branch_bound caps explicit branch indices;
// fuel is the head-reduction budget per evaluated node.
struct Bounds {
  int depth = 8;
  uint64_t branch_bound = 4;
  int fuel = 100000;

  Bounds cut() const { return Bounds{depth - 1, branch_bound, fuel}; }
};

// Free variables; forces nothing (uses SuspCell::free_names).
std::set<std::string> free_vars(const ExprPtr& e);
std::set<std::string> free_vars(const GroundPtr& g);
std::set<std::string> free_vars(const ProcPtr& p);
std::set<std::string> free_vars(const Meta& t);

// Normal-form check on the eager fragment, exploring lazy parts to `depth`.
bool is_term(const Meta& t, int depth = 16);

// Typechecking (tests and the s-expression reader use this); throws
// std::runtime_error on violations.  Susp nodes are trusted to their
// declared type; expressions have base type by construction.
void typecheck(const Meta& t, const std::map<std::string, Type>& env);
Type type_of(const Meta& t, const std::map<std::string, Type>& env);

// Deterministic supply of names not colliding with a fixed avoid set.
class NameSupply {
public:
  explicit NameSupply(std::set<std::string> avoid = {}) : avoid_(std::move(avoid)) {}
  std::string fresh(const std::string& base);
  void reserve(const std::string& name) { avoid_.insert(name); }

private:
  std::set<std::string> avoid_;
};

}  // namespace nsp
