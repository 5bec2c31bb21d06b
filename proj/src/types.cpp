#include "nsp/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace nsp {

Type Type::base() {
  static const auto n = std::make_shared<const Node>();
  return Type(n);
}

Type Type::arrow(const Type& arg, const Type& result) {
  auto n = std::make_shared<Node>();
  n->arg = arg.n_;
  n->result = result.n_;
  n->level = std::max(arg.level() + 1, result.level());
  // width of sigma_0,...,sigma_{r-1} -> N is max(r, w(sigma_0), ..., w(sigma_{r-1}))
  int r = 1 + result.arity();
  n->width = std::max(r, arg.width());
  Type rest = result;
  while (rest.is_arrow()) {
    n->width = std::max(n->width, rest.arg().width());
    rest = rest.result();
  }
  return Type(std::shared_ptr<const Node>(std::move(n)));
}

Type Type::arrows(const std::vector<Type>& args) {
  Type t = base();
  for (auto it = args.rbegin(); it != args.rend(); ++it) t = arrow(*it, t);
  return t;
}

Type Type::pure(int k) {
  Type t = base();
  for (int i = 0; i < k; i++) t = arrow(t, base());
  return t;
}

Type Type::rho(int k, int l) {
  if (l < 1) throw std::invalid_argument("rho: width must be >= 1");
  Type t = base();
  for (int i = 0; i < k; i++) t = arrows(std::vector<Type>(size_t(l), t));
  return t;
}

Type Type::arg() const {
  if (is_base()) throw std::logic_error("Type::arg on base type");
  return Type(n_->arg);
}

Type Type::result() const {
  if (is_base()) throw std::logic_error("Type::result on base type");
  return Type(n_->result);
}

std::vector<Type> Type::args() const {
  std::vector<Type> out;
  Type t = *this;
  while (t.is_arrow()) {
    out.push_back(t.arg());
    t = t.result();
  }
  return out;
}

int Type::arity() const {
  int r = 0;
  for (auto n = n_; n->arg; n = n->result) r++;
  return r;
}

std::string Type::str() const {
  if (is_base()) return "N";
  std::string a = arg().str();
  if (arg().is_arrow()) a = "(" + a + ")";
  return a + " -> " + result().str();
}

bool Type::operator==(const Type& o) const {
  if (n_ == o.n_) return true;
  if (is_base() || o.is_base()) return is_base() && o.is_base();
  if (n_->level != o.n_->level || n_->width != o.n_->width) return false;
  return arg() == o.arg() && result() == o.result();
}

}  // namespace nsp
