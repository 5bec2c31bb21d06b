#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace nsp {

// Simple types over the single base type N.  Immutable, structurally shared;
// level and width are cached at construction.
class Type {
public:
  Type() : Type(base()) {}

  static Type base();
  static Type arrow(const Type& arg, const Type& result);
  // sigma_0, ..., sigma_{r-1} -> N
  static Type arrows(const std::vector<Type>& args);
  // pure(0) = N, pure(k+1) = pure(k) -> N
  static Type pure(int k);
  // homogeneous type of sublevel (k,l): rho(0,l) = N,
  // rho(k+1,l) = rho(k,l), ..., rho(k,l) -> N with l arguments
  static Type rho(int k, int l);

  bool is_base() const { return !n_->arg; }
  bool is_arrow() const { return bool(n_->arg); }
  Type arg() const;
  Type result() const;
  int level() const { return n_->level; }
  int width() const { return n_->width; }

  // uncurried view: argument list of the maximal sigma_0,...,sigma_{r-1} -> N form
  std::vector<Type> args() const;
  int arity() const;

  std::string str() const;

  bool operator==(const Type& o) const;
  bool operator!=(const Type& o) const { return !(*this == o); }

private:
  struct Node {
    std::shared_ptr<const Node> arg, result;
    int level = 0, width = 0;
  };
  explicit Type(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

// Sublevel (k,l) = (level, width), ordered lexicographically; the base type
// has sublevel 0, written here as (0,0).
struct Sublevel {
  int level = 0;
  int width = 0;

  bool operator==(const Sublevel& o) const { return level == o.level && width == o.width; }
  bool operator<(const Sublevel& o) const {
    return level < o.level || (level == o.level && width < o.width);
  }
  bool operator<=(const Sublevel& o) const { return *this < o || *this == o; }
};

inline Sublevel sublevel_of(const Type& t) { return Sublevel{t.level(), t.width()}; }

}  // namespace nsp
