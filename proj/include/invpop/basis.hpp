#pragma once

// Monomial bases and the structure matrices of moment / localizing matrices.
//
// For a basis v_d(x) of N^n_d in graded-lex order, the moment map has blocks
// B_alpha with sum_alpha B_alpha x^alpha = v_d(x) v_d(x)^T and the localizing
// map for g has blocks C_alpha with sum_alpha C_alpha x^alpha = g(x) v_d v_d^T.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "invpop/polyalg.hpp"

namespace invpop {

/// s(d) = C(n+d, n).
inline long long basis_size(int n, int d) {
  if (d < 0) return 0;
  long long r = 1;
  for (int k = 1; k <= d; ++k) r = r * (n + k) / k;
  return r;
}

class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int n, int d) : n_(n), d_(d) {
    if (n < 1) throw std::invalid_argument("MonomialBasis: n must be >= 1");
    if (d < 0) throw std::invalid_argument("MonomialBasis: d must be >= 0");
    MultiIndex cur(n);
    // All exponent vectors with |alpha| <= d, then sorted.
    std::vector<MultiIndex> all;
    fill(cur, 0, d, all);
    std::sort(all.begin(), all.end());
    list_ = std::move(all);
    for (size_t i = 0; i < list_.size(); ++i) index_.emplace(list_[i], static_cast<int>(i));
  }

  int num_vars() const { return n_; }
  int degree() const { return d_; }
  int size() const { return static_cast<int>(list_.size()); }
  const MultiIndex& operator[](int i) const { return list_[static_cast<size_t>(i)]; }
  const std::vector<MultiIndex>& list() const { return list_; }

  /// Position of a, or -1 if absent.
  int index_of(const MultiIndex& a) const {
    auto it = index_.find(a);
    return it == index_.end() ? -1 : it->second;
  }

  template <typename Derived>
  PointT<typename Derived::Scalar> evaluate(const Eigen::MatrixBase<Derived>& x) const {
    using Scalar = typename Derived::Scalar;
    PointT<Scalar> v(size());
    for (int k = 0; k < size(); ++k)
      v(k) = Polynomial<Scalar>::monomial(list_[static_cast<size_t>(k)]).evaluate(x);
    return v;
  }

 private:
  static void fill(MultiIndex& cur, int var, int budget, std::vector<MultiIndex>& out) {
    if (var == cur.size()) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      cur[var] = e;
      fill(cur, var + 1, budget - e, out);
    }
    cur[var] = 0;
  }

  int n_ = 0;
  int d_ = 0;
  std::vector<MultiIndex> list_;
  std::map<MultiIndex, int> index_;
};

inline MonomialBasis enumerate_monomials(int n, int d) { return MonomialBasis(n, d); }

/// Dense-on-demand sparse symmetric matrix entry.
template <typename Scalar>
struct StructureEntry {
  int row;
  int col;
  Scalar value;
};

template <typename Scalar>
class StructureMap {
 public:
  using Entries = std::vector<StructureEntry<Scalar>>;

  StructureMap() = default;
  explicit StructureMap(MonomialBasis basis) : basis_(std::move(basis)) {}

  const MonomialBasis& basis() const { return basis_; }
  int dim() const { return basis_.size(); }
  /// Blocks keyed by alpha. Entries list both (r,c) and (c,r) for r != c.
  const std::map<MultiIndex, Entries>& blocks() const { return blocks_; }

  void add(const MultiIndex& alpha, int r, int c, Scalar v) {
    if (v == Scalar(0)) return;
    blocks_[alpha].push_back({r, c, v});
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense_block(const MultiIndex& alpha) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> B =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim(), dim());
    auto it = blocks_.find(alpha);
    if (it != blocks_.end())
      for (const auto& e : it->second) B(e.row, e.col) += e.value;
    return B;
  }

 private:
  MonomialBasis basis_;
  std::map<MultiIndex, Entries> blocks_;
};

using StructureMapd = StructureMap<double>;

/// Localizing structure for g over N^n_d; g = 1 gives the moment structure.
template <typename Scalar>
StructureMap<Scalar> localizing_structure(const Polynomial<Scalar>& g, int d) {
  if (d < 0) throw std::invalid_argument("localizing_structure: d must be >= 0");
  MonomialBasis basis(g.num_vars(), d);
  StructureMap<Scalar> map(basis);
  for (int r = 0; r < basis.size(); ++r)
    for (int c = 0; c < basis.size(); ++c) {
      MultiIndex rc = basis[r] + basis[c];
      for (const auto& [gamma, gc] : g.terms()) map.add(rc + gamma, r, c, gc);
    }
  return map;
}

template <typename Scalar = double>
StructureMap<Scalar> moment_structure(int n, int d) {
  return localizing_structure(Polynomial<Scalar>::constant(n, Scalar(1)), d);
}

/// Finite moment vector z_alpha. Only stored indices exist; lookups of
/// missing indices throw.
template <typename Scalar>
class MomentVector {
 public:
  MomentVector() = default;
  explicit MomentVector(int n) : n_(n) {}

  int num_vars() const { return n_; }
  const std::map<MultiIndex, Scalar>& entries() const { return entries_; }
  bool contains(const MultiIndex& a) const { return entries_.count(a) > 0; }
  void set(const MultiIndex& a, Scalar v) {
    if (a.size() != n_) throw std::invalid_argument("MomentVector: index size mismatch");
    entries_[a] = v;
  }
  Scalar at(const MultiIndex& a) const {
    auto it = entries_.find(a);
    if (it == entries_.end())
      throw std::out_of_range("MomentVector: missing moment for index " +
                              monomial_string(a, default_var_names(n_)));
    return it->second;
  }
  Scalar mass() const { return at(MultiIndex(n_)); }

  /// Moments of a finite atomic measure sum_k w_k delta_{x_k} up to order.
  static MomentVector from_atoms(const std::vector<PointT<Scalar>>& atoms,
                                 const std::vector<Scalar>& weights, int order) {
    if (atoms.empty()) throw std::invalid_argument("MomentVector::from_atoms: no atoms");
    const int n = static_cast<int>(atoms.front().size());
    MomentVector z(n);
    MonomialBasis basis(n, order);
    for (const auto& a : basis.list()) {
      Scalar s(0);
      auto mono = Polynomial<Scalar>::monomial(a);
      for (size_t k = 0; k < atoms.size(); ++k) s += weights[k] * mono.evaluate(atoms[k]);
      z.set(a, s);
    }
    return z;
  }

 private:
  int n_ = 0;
  std::map<MultiIndex, Scalar> entries_;
};

using MomentVectord = MomentVector<double>;

/// sum_alpha z_alpha * blocks[alpha].
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> assemble(const StructureMap<Scalar>& map,
                                                              const MomentVector<Scalar>& z) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(map.dim(), map.dim());
  for (const auto& [alpha, entries] : map.blocks()) {
    Scalar za = z.at(alpha);
    for (const auto& e : entries) M(e.row, e.col) += za * e.value;
  }
  return M;
}

/// Riesz functional L_z(p) = sum_alpha p_alpha z_alpha.
template <typename Scalar>
Scalar riesz(const MomentVector<Scalar>& z, const Polynomial<Scalar>& p) {
  Scalar s(0);
  for (const auto& [a, c] : p.terms()) s += c * z.at(a);
  return s;
}

/// v(x)^T G v(x) as a polynomial.
template <typename Scalar, typename Derived>
Polynomial<Scalar> gram_polynomial(const MonomialBasis& basis, const Eigen::MatrixBase<Derived>& G) {
  if (G.rows() != basis.size() || G.cols() != basis.size())
    throw std::invalid_argument("gram_polynomial: Gram size does not match basis");
  Polynomial<Scalar> p(basis.num_vars());
  for (int r = 0; r < basis.size(); ++r)
    for (int c = 0; c < basis.size(); ++c) p.add_term(basis[r] + basis[c], G(r, c));
  return p;
}

}  // namespace invpop
