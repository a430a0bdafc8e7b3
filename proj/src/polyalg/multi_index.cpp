#include "homog/multi_index.hpp"

#include <numeric>
#include <ostream>
#include <sstream>

#include "homog/errors.hpp"

namespace homog {

MultiIndex::MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

MultiIndex::MultiIndex(std::vector<int> entries) : e_(std::move(entries)) {
  for (int v : e_) {
    if (v < 0) throw ContractViolation("multi-index entries must be non-negative");
    order_ += v;
  }
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis) {
  MultiIndex a(dim);
  a.set(axis, 1);
  return a;
}

void MultiIndex::set(std::size_t i, int value) {
  if (value < 0) throw ContractViolation("multi-index entries must be non-negative");
  order_ += value - e_[i];
  e_[i] = value;
}

void MultiIndex::increment(std::size_t i, int by) { set(i, e_[i] + by); }

bool MultiIndex::divides(const MultiIndex& other) const {
  if (dim() != other.dim()) return false;
  for (std::size_t i = 0; i < e_.size(); ++i)
    if (e_[i] > other.e_[i]) return false;
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (dim() != other.dim()) throw ContractViolation("multi-index dimension mismatch");
  MultiIndex r = *this;
  for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += other.e_[i];
  r.order_ += other.order_;
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (!other.divides(*this)) throw ContractViolation("multi-index subtraction underflow");
  MultiIndex r = *this;
  for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= other.e_[i];
  r.order_ -= other.order_;
  return r;
}

bool operator<(const MultiIndex& a, const MultiIndex& b) {
  if (a.order_ != b.order_) return a.order_ < b.order_;
  // within one order: larger leading exponent first
  return a.e_ > b.e_;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& a) {
  os << '(';
  for (std::size_t i = 0; i < a.dim(); ++i) os << (i ? "," : "") << a[i];
  return os << ')';
}

namespace {

void enumerate(std::size_t dim, std::size_t axis, int remaining, std::vector<int>& cur,
               std::vector<MultiIndex>& out) {
  if (axis + 1 == dim) {
    cur[axis] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[axis] = v;
    enumerate(dim, axis + 1, remaining - v, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_order(std::size_t dim, int m) {
  if (dim == 0) throw ContractViolation("dimension must be >= 1");
  std::vector<MultiIndex> out;
  if (m < 0) return out;
  std::vector<int> cur(dim, 0);
  enumerate(dim, 0, m, cur, out);
  return out;
}

std::vector<MultiIndex> multi_indices_up_to(std::size_t dim, int m) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= m; ++k) {
    auto level = multi_indices_of_order(dim, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

Integer factorial(unsigned n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

Integer factorial(const MultiIndex& alpha) {
  Integer r = 1;
  for (int v : alpha.entries()) r *= factorial(static_cast<unsigned>(v));
  return r;
}

Integer multinomial(const MultiIndex& alpha) {
  return factorial(static_cast<unsigned>(alpha.order())) / factorial(alpha);
}

Integer binomial(unsigned n, unsigned k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

Integer binomial(const MultiIndex& alpha, const MultiIndex& beta) {
  if (!beta.divides(alpha)) return 0;
  Integer r = 1;
  for (std::size_t i = 0; i < alpha.dim(); ++i)
    r *= binomial(static_cast<unsigned>(alpha[i]), static_cast<unsigned>(beta[i]));
  return r;
}

long long homogeneous_dim(std::size_t dim, int m) {
  if (m < 0) return 0;
  return binomial(static_cast<unsigned>(m + dim - 1), static_cast<unsigned>(dim - 1)).get_si();
}

}  // namespace homog
