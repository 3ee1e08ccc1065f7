#pragma once

// Sparse multivariate polynomials over a real scalar type.
//
// Terms are stored in a map keyed by exponent multi-index and ordered by the
// graded-lexicographic order below. Only nonzero coefficients are stored.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace invpop {

/// Exponent vector of a monomial x^alpha.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int n) : exps_(static_cast<size_t>(n), 0) {}
  MultiIndex(std::initializer_list<int> e) : exps_(e) { check(); }
  explicit MultiIndex(std::vector<int> e) : exps_(std::move(e)) { check(); }

  static MultiIndex unit(int n, int i, int power = 1) {
    MultiIndex a(n);
    a.exps_.at(static_cast<size_t>(i)) = power;
    return a;
  }

  int size() const { return static_cast<int>(exps_.size()); }
  int degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }
  bool is_zero() const { return degree() == 0; }
  int operator[](int i) const { return exps_[static_cast<size_t>(i)]; }
  int& operator[](int i) { return exps_[static_cast<size_t>(i)]; }
  const std::vector<int>& exponents() const { return exps_; }

  MultiIndex operator+(const MultiIndex& o) const {
    if (o.size() != size()) throw std::invalid_argument("MultiIndex: size mismatch");
    MultiIndex r(*this);
    for (int i = 0; i < size(); ++i) r[i] += o[i];
    return r;
  }

  /// Graded-lex: lower total degree first; within a degree, larger leading
  /// exponent first, so the degree-1 block reads x1, x2, ..., xn.
  std::strong_ordering operator<=>(const MultiIndex& o) const {
    if (auto c = degree() <=> o.degree(); c != 0) return c;
    if (auto c = size() <=> o.size(); c != 0) return c;
    for (size_t i = 0; i < exps_.size(); ++i)
      if (exps_[i] != o.exps_[i]) return o.exps_[i] <=> exps_[i];
    return std::strong_ordering::equal;
  }
  bool operator==(const MultiIndex& o) const = default;

  /// Embeds into a larger variable space at the given offset.
  MultiIndex embed(int n_total, int offset) const {
    MultiIndex r(n_total);
    for (int i = 0; i < size(); ++i) r[offset + i] = (*this)[i];
    return r;
  }

 private:
  void check() const {
    for (int e : exps_)
      if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
  }
  std::vector<int> exps_;
};

enum class Norm { l1, l2, linf };

inline const char* to_string(Norm k) {
  switch (k) {
    case Norm::l1: return "l1";
    case Norm::l2: return "l2";
    case Norm::linf: return "linf";
  }
  return "?";
}

template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Point = PointT<double>;

template <typename Scalar>
class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, Scalar>;

  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("Polynomial: negative variable count");
  }

  static Polynomial constant(int n, Scalar c) {
    Polynomial p(n);
    p.add_term(MultiIndex(n), c);
    return p;
  }
  static Polynomial variable(int n, int i) {
    Polynomial p(n);
    p.add_term(MultiIndex::unit(n, i), Scalar(1));
    return p;
  }
  static Polynomial monomial(const MultiIndex& a, Scalar c = Scalar(1)) {
    Polynomial p(a.size());
    p.add_term(a, c);
    return p;
  }

  int num_vars() const { return n_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t num_terms() const { return terms_.size(); }

  int degree() const {
    int d = 0;
    for (const auto& [a, c] : terms_) d = std::max(d, a.degree());
    return d;
  }

  Scalar coeff(const MultiIndex& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? Scalar(0) : it->second;
  }
  Scalar constant_term() const { return coeff(MultiIndex(n_)); }

  /// Adds c to the coefficient of x^a; exact zeros are pruned.
  void add_term(const MultiIndex& a, Scalar c) {
    if (a.size() != n_) throw std::invalid_argument("Polynomial: monomial size mismatch");
    if (c == Scalar(0)) return;
    auto [it, inserted] = terms_.emplace(a, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Scalar(0)) terms_.erase(it);
    }
  }
  void set_coeff(const MultiIndex& a, Scalar c) {
    if (a.size() != n_) throw std::invalid_argument("Polynomial: monomial size mismatch");
    if (c == Scalar(0))
      terms_.erase(a);
    else
      terms_[a] = c;
  }

  Polynomial& operator+=(const Polynomial& q) {
    check_same(q);
    for (const auto& [a, c] : q.terms_) add_term(a, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& q) {
    check_same(q);
    for (const auto& [a, c] : q.terms_) add_term(a, -c);
    return *this;
  }
  Polynomial& operator*=(Scalar s) {
    if (s == Scalar(0)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      it = it->second == Scalar(0) ? terms_.erase(it) : std::next(it);
    }
    return *this;
  }

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, Scalar s) { return p *= s; }
  friend Polynomial operator*(Scalar s, Polynomial p) { return p *= s; }
  friend Polynomial operator-(Polynomial p) { return p *= Scalar(-1); }

  friend Polynomial operator*(const Polynomial& p, const Polynomial& q) {
    p.check_same(q);
    Polynomial r(p.n_);
    for (const auto& [a, c] : p.terms_)
      for (const auto& [b, e] : q.terms_) r.add_term(a + b, c * e);
    return r;
  }

  Polynomial pow(int k) const {
    if (k < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
    Polynomial r = constant(n_, Scalar(1));
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& x) const {
    return evaluate(x);
  }

  template <typename Derived>
  Scalar evaluate(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != n_) throw std::invalid_argument("Polynomial::evaluate: dimension mismatch");
    Scalar s(0);
    for (const auto& [a, c] : terms_) {
      Scalar m = c;
      for (int i = 0; i < n_; ++i)
        for (int k = 0; k < a[i]; ++k) m *= x(i);
      s += m;
    }
    return s;
  }

  /// Partial derivative with respect to x_i.
  Polynomial derivative(int i) const {
    if (i < 0 || i >= n_) throw std::invalid_argument("Polynomial::derivative: bad index");
    Polynomial r(n_);
    for (const auto& [a, c] : terms_) {
      if (a[i] == 0) continue;
      MultiIndex b = a;
      b[i] -= 1;
      r.add_term(b, c * Scalar(a[i]));
    }
    return r;
  }

  /// Removes terms with |coeff| <= tol.
  Polynomial pruned(Scalar tol) const {
    Polynomial r(n_);
    for (const auto& [a, c] : terms_)
      if (std::abs(c) > tol) r.terms_.emplace(a, c);
    return r;
  }

  /// Keeps only terms of total degree <= d.
  Polynomial truncated(int d) const {
    Polynomial r(n_);
    for (const auto& [a, c] : terms_)
      if (a.degree() <= d) r.terms_.emplace(a, c);
    return r;
  }

  /// Re-expresses the polynomial in a space of n_total variables, mapping
  /// x_i to x_{offset+i}.
  Polynomial embed(int n_total, int offset) const {
    Polynomial r(n_total);
    for (const auto& [a, c] : terms_) r.terms_.emplace(a.embed(n_total, offset), c);
    return r;
  }

  bool operator==(const Polynomial& o) const = default;

 private:
  void check_same(const Polynomial& q) const {
    if (q.n_ != n_) throw std::invalid_argument("Polynomial: variable count mismatch");
  }

  int n_ = 0;
  TermMap terms_;
};

using Polynomiald = Polynomial<double>;

/// p(scale .* u + offset) as a polynomial in u.
template <typename Scalar>
Polynomial<Scalar> compose_affine(const Polynomial<Scalar>& p, const PointT<Scalar>& scale,
                                  const PointT<Scalar>& offset) {
  const int n = p.num_vars();
  if (scale.size() != n || offset.size() != n)
    throw std::invalid_argument("compose_affine: dimension mismatch");
  // Powers of each univariate factor (scale_i u_i + offset_i)^k, cached per variable.
  std::vector<std::vector<Polynomial<Scalar>>> powers(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Polynomial<Scalar> lin = Polynomial<Scalar>::variable(n, i) * scale(i) +
                             Polynomial<Scalar>::constant(n, offset(i));
    powers[i].push_back(Polynomial<Scalar>::constant(n, Scalar(1)));
    for (int k = 1; k <= p.degree(); ++k) powers[i].push_back(powers[i].back() * lin);
  }
  Polynomial<Scalar> r(n);
  for (const auto& [a, c] : p.terms()) {
    Polynomial<Scalar> t = Polynomial<Scalar>::constant(n, c);
    for (int i = 0; i < n; ++i)
      if (a[i] > 0) t = t * powers[i][static_cast<size_t>(a[i])];
    r += t;
  }
  return r;
}

/// p'(u) = p(u + y).
template <typename Scalar>
Polynomial<Scalar> shift(const Polynomial<Scalar>& p, const PointT<Scalar>& y) {
  return compose_affine(p, PointT<Scalar>::Ones(p.num_vars()).eval(), y);
}

/// Coefficient norm. The l2 value is the sum of squared coefficients (no
/// square root). With exclude_constant the x^0 coefficient is ignored.
template <typename Scalar>
Scalar coeff_norm(const Polynomial<Scalar>& p, Norm k, bool exclude_constant) {
  Scalar s(0);
  for (const auto& [a, c] : p.terms()) {
    if (exclude_constant && a.is_zero()) continue;
    switch (k) {
      case Norm::l1: s += std::abs(c); break;
      case Norm::l2: s += c * c; break;
      case Norm::linf: s = std::max<Scalar>(s, std::abs(c)); break;
    }
  }
  return s;
}

template <typename Scalar>
std::vector<Polynomial<Scalar>> gradient(const Polynomial<Scalar>& p) {
  std::vector<Polynomial<Scalar>> g;
  for (int i = 0; i < p.num_vars(); ++i) g.push_back(p.derivative(i));
  return g;
}

template <typename Scalar>
std::vector<std::vector<Polynomial<Scalar>>> hessian(const Polynomial<Scalar>& p) {
  const int n = p.num_vars();
  std::vector<std::vector<Polynomial<Scalar>>> h(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Polynomial<Scalar> di = p.derivative(i);
    for (int j = 0; j < n; ++j) h[i].push_back(di.derivative(j));
  }
  return h;
}

template <typename Scalar, typename Derived>
PointT<Scalar> gradient_at(const Polynomial<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  PointT<Scalar> g(p.num_vars());
  for (int i = 0; i < p.num_vars(); ++i) g(i) = p.derivative(i).evaluate(x);
  return g;
}

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hessian_at(
    const Polynomial<Scalar>& p, const Eigen::MatrixBase<Derived>& x) {
  const int n = p.num_vars();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> H(n, n);
  auto h = hessian(p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H(i, j) = h[i][j].evaluate(x);
  return H;
}

inline std::vector<std::string> default_var_names(int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) v.push_back("x" + std::to_string(i + 1));
  return v;
}

/// "x1^2*x3" style monomial text; "1" for the zero index.
inline std::string monomial_string(const MultiIndex& a, const std::vector<std::string>& names) {
  std::string s;
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += names.at(static_cast<size_t>(i));
    if (a[i] > 1) s += "^" + std::to_string(a[i]);
  }
  return s.empty() ? "1" : s;
}

inline std::string format_number(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// Human-readable form, parseable by the problem-file grammar.
template <typename Scalar>
std::string to_string(const Polynomial<Scalar>& p, const std::vector<std::string>& names,
                      int digits = 17) {
  if (p.is_zero()) return "0";
  std::string s;
  for (const auto& [a, c] : p.terms()) {
    double v = static_cast<double>(c);
    bool neg = v < 0;
    double mag = std::abs(v);
    if (s.empty())
      s += neg ? "-" : "";
    else
      s += neg ? " - " : " + ";
    if (a.is_zero()) {
      s += format_number(mag, digits);
    } else if (mag == 1.0) {
      s += monomial_string(a, names);
    } else {
      s += format_number(mag, digits) + "*" + monomial_string(a, names);
    }
  }
  return s;
}

template <typename Scalar>
std::string to_string(const Polynomial<Scalar>& p) {
  return to_string(p, default_var_names(p.num_vars()));
}

}  // namespace invpop
