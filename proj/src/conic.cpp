#include "invpop/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

namespace invpop::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int ConicProblem::add_free(int count) {
  int first = num_free_;
  num_free_ += count;
  return first;
}

int ConicProblem::add_nonneg(int count) {
  int first = num_nonneg_;
  num_nonneg_ += count;
  return first;
}

int ConicProblem::add_psd_block(int size) {
  if (size < 1) throw std::invalid_argument("ConicProblem: PSD block size must be >= 1");
  psd_blocks_.push_back(size);
  return static_cast<int>(psd_blocks_.size()) - 1;
}

int ConicProblem::add_equality(LinearForm form, double rhs) {
  equalities_.push_back({std::move(form), rhs});
  return static_cast<int>(equalities_.size()) - 1;
}

namespace {

void validate_form(const ConicProblem& p, const LinearForm& f, const std::string& where) {
  for (const auto& [i, c] : f.free_terms())
    if (i < 0 || i >= p.num_free())
      throw std::invalid_argument(where + ": free variable index out of range");
  for (const auto& [i, c] : f.nonneg_terms())
    if (i < 0 || i >= p.num_nonneg())
      throw std::invalid_argument(where + ": nonnegative variable index out of range");
  for (const auto& t : f.psd_terms()) {
    if (t.block < 0 || t.block >= static_cast<int>(p.psd_blocks().size()))
      throw std::invalid_argument(where + ": PSD block index out of range");
    int s = p.psd_blocks()[static_cast<size_t>(t.block)];
    if (t.row < 0 || t.row >= s || t.col < 0 || t.col >= s)
      throw std::invalid_argument(where + ": PSD entry out of range");
  }
}

}  // namespace

void ConicProblem::validate() const {
  validate_form(*this, objective_, "objective");
  for (size_t i = 0; i < equalities_.size(); ++i)
    validate_form(*this, equalities_[i].form, "equality " + std::to_string(i));
}

void ConicProblem::dump(std::ostream& os) const {
  os << "# invpop conic problem\n";
  os << "sense " << (sense == Sense::minimize ? "min" : "max") << "\n";
  os << "free " << num_free_ << "\n";
  os << "nonneg " << num_nonneg_ << "\n";
  os << "psd " << psd_blocks_.size();
  for (int s : psd_blocks_) os << " " << s;
  os << "\n";
  os << "equalities " << equalities_.size() << "\n";
  os.precision(17);
  auto dump_form = [&](const std::string& tag, const LinearForm& f) {
    for (const auto& [i, c] : f.free_terms()) os << tag << " f " << i << " " << c << "\n";
    for (const auto& [i, c] : f.nonneg_terms()) os << tag << " l " << i << " " << c << "\n";
    for (const auto& t : f.psd_terms())
      os << tag << " s " << t.block << " " << t.row << " " << t.col << " " << t.coeff << "\n";
  };
  os << "objective_constant " << objective_constant << "\n";
  dump_form("obj", objective_);
  for (size_t i = 0; i < equalities_.size(); ++i) {
    os << "rhs " << i << " " << equalities_[i].rhs << "\n";
    dump_form("a " + std::to_string(i), equalities_[i].form);
  }
}

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::max_iter: return "max_iter";
    case Status::numerical_trouble: return "numerical_trouble";
  }
  return "?";
}

namespace {

// Upper-triangle entry of a symmetric coefficient matrix: A(r,c) = A(c,r) = a.
struct SymEntry {
  int r;
  int c;
  double a;
};

double pair_sym(const std::vector<SymEntry>& A, const MatrixXd& G) {
  double s = 0.0;
  for (const auto& e : A) s += e.r == e.c ? e.a * G(e.r, e.r) : e.a * (G(e.r, e.c) + G(e.c, e.r));
  return s;
}

// Accumulates a linear form's PSD terms into upper-triangle entries per block.
std::map<int, std::vector<SymEntry>> collect_psd(const LinearForm& f) {
  std::map<int, std::map<std::pair<int, int>, double>> acc;
  for (const auto& t : f.psd_terms()) {
    int r = std::min(t.row, t.col), c = std::max(t.row, t.col);
    acc[t.block][{r, c}] += r == c ? t.coeff : 0.5 * t.coeff;
  }
  std::map<int, std::vector<SymEntry>> out;
  for (const auto& [k, m] : acc)
    for (const auto& [rc, a] : m)
      if (a != 0.0) out[k].push_back({rc.first, rc.second, a});
  return out;
}

struct Block {
  int size = 0;
  MatrixXd C;
  std::vector<int> rows;                     // equality rows touching this block
  std::vector<std::vector<SymEntry>> coeffs;  // aligned with rows
};

// Compiled problem in minimization form.
struct Compiled {
  int m = 0;
  VectorXd b;
  MatrixXd Af;  // m x nf (reduced)
  VectorXd cf;
  std::vector<int> free_map;  // reduced column -> original free index
  MatrixXd Al;
  VectorXd cl;
  std::vector<Block> blocks;
  std::vector<int> row_map;  // compiled row -> original equality index
  double sign = 1.0;         // +1 minimize, -1 maximize
  bool trivially_infeasible = false;
};

// Drops equality rows that are linear combinations of earlier ones (e.g.
// the same relation generated twice through products of constraints). An
// inconsistent right-hand side on a dropped row marks the problem infeasible.
std::vector<int> independent_rows(const ConicProblem& p, const std::vector<int>& rows, bool& inconsistent) {
  const int m = static_cast<int>(rows.size());
  if (m < 2) return rows;
  std::vector<int> offset{p.num_free() + p.num_nonneg()};
  for (int s : p.psd_blocks()) offset.push_back(offset.back() + s * (s + 1) / 2);
  MatrixXd At = MatrixXd::Zero(offset.back(), m);
  VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const auto& eq = p.equalities()[static_cast<size_t>(rows[static_cast<size_t>(i)])];
    b(i) = eq.rhs;
    for (const auto& [j, c] : eq.form.free_terms()) At(j, i) += c;
    for (const auto& [j, c] : eq.form.nonneg_terms()) At(p.num_free() + j, i) += c;
    for (const auto& t : eq.form.psd_terms()) {
      int r = std::min(t.row, t.col), c = std::max(t.row, t.col);
      const int s = p.psd_blocks()[static_cast<size_t>(t.block)];
      At(offset[static_cast<size_t>(t.block)] + r * s - r * (r - 1) / 2 + (c - r), i) += t.coeff;
    }
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(At);
  const double scale = std::max(1.0, At.cwiseAbs().maxCoeff());
  qr.setThreshold(1e-11 * scale / std::max(1.0, std::sqrt(static_cast<double>(At.rows()))));
  const int rank = static_cast<int>(qr.rank());
  if (rank == m) return rows;
  std::vector<int> keep, drop;
  for (int j = 0; j < m; ++j) (j < rank ? keep : drop).push_back(qr.colsPermutation().indices()(j));
  std::sort(keep.begin(), keep.end());
  MatrixXd Ak(At.rows(), rank);
  VectorXd bk(rank);
  for (int j = 0; j < rank; ++j) {
    Ak.col(j) = At.col(keep[static_cast<size_t>(j)]);
    bk(j) = b(keep[static_cast<size_t>(j)]);
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qk(Ak);
  for (int i : drop) {
    VectorXd lambda = qk.solve(At.col(i));
    if (std::abs(b(i) - lambda.dot(bk)) > 1e-8 * (1.0 + std::abs(b(i)) + bk.cwiseAbs().maxCoeff())) inconsistent = true;
  }
  std::vector<int> out;
  for (int j : keep) out.push_back(rows[static_cast<size_t>(j)]);
  return out;
}

Compiled compile(const ConicProblem& p) {
  Compiled cp;
  cp.sign = p.sense == Sense::minimize ? 1.0 : -1.0;
  const int nf = p.num_free(), nl = p.num_nonneg();

  std::vector<int> rows;
  for (int i = 0; i < p.num_equalities(); ++i) {
    const auto& eq = p.equalities()[static_cast<size_t>(i)];
    if (eq.form.empty()) {
      if (std::abs(eq.rhs) > 0.0) cp.trivially_infeasible = true;
      continue;
    }
    rows.push_back(i);
  }
  rows = independent_rows(p, rows, cp.trivially_infeasible);
  cp.row_map = rows;
  cp.m = static_cast<int>(rows.size());
  cp.b = VectorXd::Zero(cp.m);
  MatrixXd Af_full = MatrixXd::Zero(cp.m, nf);
  cp.Al = MatrixXd::Zero(cp.m, nl);
  cp.blocks.resize(p.psd_blocks().size());
  for (size_t k = 0; k < p.psd_blocks().size(); ++k) {
    cp.blocks[k].size = p.psd_blocks()[k];
    cp.blocks[k].C = MatrixXd::Zero(p.psd_blocks()[k], p.psd_blocks()[k]);
  }
  for (int i = 0; i < cp.m; ++i) {
    const auto& eq = p.equalities()[static_cast<size_t>(rows[static_cast<size_t>(i)])];
    cp.b(i) = eq.rhs;
    for (const auto& [j, c] : eq.form.free_terms()) Af_full(i, j) += c;
    for (const auto& [j, c] : eq.form.nonneg_terms()) cp.Al(i, j) += c;
    for (auto& [k, entries] : collect_psd(eq.form)) {
      cp.blocks[static_cast<size_t>(k)].rows.push_back(i);
      cp.blocks[static_cast<size_t>(k)].coeffs.push_back(std::move(entries));
    }
  }
  VectorXd cf_full = VectorXd::Zero(nf);
  cp.cl = VectorXd::Zero(nl);
  for (const auto& [j, c] : p.objective().free_terms()) cf_full(j) += cp.sign * c;
  for (const auto& [j, c] : p.objective().nonneg_terms()) cp.cl(j) += cp.sign * c;
  for (const auto& [k, entries] : collect_psd(p.objective())) {
    MatrixXd& C = cp.blocks[static_cast<size_t>(k)].C;
    for (const auto& e : entries) {
      C(e.r, e.c) += cp.sign * e.a;
      if (e.r != e.c) C(e.c, e.r) += cp.sign * e.a;
    }
  }

  // Drop linearly dependent free columns; they only re-parametrize the same
  // image and would make the Newton system singular.
  if (nf > 0 && cp.m > 0) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(Af_full);
    double scale = std::max(1.0, Af_full.cwiseAbs().maxCoeff());
    qr.setThreshold(1e-11 * scale / std::max(1.0, std::sqrt(static_cast<double>(cp.m))));
    int rank = static_cast<int>(qr.rank());
    std::vector<int> keep;
    for (int j = 0; j < rank; ++j) keep.push_back(qr.colsPermutation().indices()(j));
    std::sort(keep.begin(), keep.end());
    cp.free_map = keep;
  } else {
    for (int j = 0; j < nf; ++j)
      if (cp.m > 0) cp.free_map.push_back(j);
  }
  cp.Af.resize(cp.m, static_cast<int>(cp.free_map.size()));
  cp.cf.resize(static_cast<int>(cp.free_map.size()));
  for (size_t j = 0; j < cp.free_map.size(); ++j) {
    cp.Af.col(static_cast<int>(j)) = Af_full.col(cp.free_map[j]);
    cp.cf(static_cast<int>(j)) = cf_full(cp.free_map[j]);
  }
  return cp;
}

struct Iterate {
  VectorXd xf, xl, y, sl;
  std::vector<MatrixXd> X, S;
};

double max_step_psd(const MatrixXd& X, const MatrixXd& dX) {
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd T = llt.matrixL().solve(dX);
  T = llt.matrixL().solve(T.transpose()).transpose();
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step_lp(const VectorXd& x, const VectorXd& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i)
    if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
  return a;
}

double min_eig(const MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eig(const MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

class InteriorPoint {
 public:
  InteriorPoint(const Compiled& cp, const SolverConfig& cfg) : cp_(cp), cfg_(cfg) {}

  ConicSolution run();

 private:
  VectorXd apply_A(const VectorXd& xf, const VectorXd& xl, const std::vector<MatrixXd>& X) const {
    VectorXd r = cp_.Af * xf + cp_.Al * xl;
    for (size_t k = 0; k < cp_.blocks.size(); ++k) {
      const Block& B = cp_.blocks[k];
      for (size_t t = 0; t < B.rows.size(); ++t) r(B.rows[t]) += pair_sym(B.coeffs[t], X[k]);
    }
    return r;
  }

  MatrixXd adjoint(size_t k, const VectorXd& y) const {
    const Block& B = cp_.blocks[k];
    MatrixXd M = MatrixXd::Zero(B.size, B.size);
    for (size_t t = 0; t < B.rows.size(); ++t) {
      double yi = y(B.rows[t]);
      if (yi == 0.0) continue;
      for (const auto& e : B.coeffs[t]) {
        M(e.r, e.c) += yi * e.a;
        if (e.r != e.c) M(e.c, e.r) += yi * e.a;
      }
    }
    return M;
  }

  struct Residuals {
    VectorXd rp, rf, rl;
    std::vector<MatrixXd> Rd;
    double pobj = 0, dobj = 0, pinf = 0, dinf = 0, compl_gap = 0, mu = 0;
  };

  Residuals residuals(const Iterate& it) const;
  bool factor(const Iterate& it);
  void solve_newton(const VectorXd& h, const VectorXd& rf, VectorXd& dy, VectorXd& dxf) const;
  void direction(const Iterate& it, const Residuals& res, const std::vector<MatrixXd>& Rc,
                 const VectorXd& rcl, Iterate& d) const;

  const Compiled& cp_;
  const SolverConfig& cfg_;
  double normb_ = 0, normc_ = 0;
  int nvar_cone_ = 0;

  // Factorization state for the current iterate.
  MatrixXd M_;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  bool use_lu_ = false;
  std::vector<MatrixXd> Sinv_;
  // Nesterov-Todd scaling W with W S W = X.
  std::vector<MatrixXd> W_;
  VectorXd D_;
};

InteriorPoint::Residuals InteriorPoint::residuals(const Iterate& it) const {
  Residuals r;
  r.rp = cp_.b - apply_A(it.xf, it.xl, it.X);
  r.rf = cp_.cf - cp_.Af.transpose() * it.y;
  r.rl = cp_.cl - cp_.Al.transpose() * it.y - it.sl;
  double dn2 = r.rf.squaredNorm() + r.rl.squaredNorm();
  r.pobj = cp_.cf.dot(it.xf) + cp_.cl.dot(it.xl);
  r.compl_gap = it.xl.dot(it.sl);
  r.Rd.resize(cp_.blocks.size());
  for (size_t k = 0; k < cp_.blocks.size(); ++k) {
    r.Rd[k] = cp_.blocks[k].C - adjoint(k, it.y) - it.S[k];
    dn2 += r.Rd[k].squaredNorm();
    r.pobj += (cp_.blocks[k].C.cwiseProduct(it.X[k])).sum();
    r.compl_gap += (it.X[k].cwiseProduct(it.S[k])).sum();
  }
  r.dobj = cp_.b.dot(it.y);
  r.pinf = r.rp.norm() / (1.0 + normb_);
  r.dinf = std::sqrt(dn2) / (1.0 + normc_);
  r.mu = nvar_cone_ > 0 ? r.compl_gap / nvar_cone_ : 0.0;
  return r;
}

bool InteriorPoint::factor(const Iterate& it) {
  const int m = cp_.m;
  M_ = MatrixXd::Zero(m, m);
  Sinv_.assign(cp_.blocks.size(), MatrixXd());
  W_.assign(cp_.blocks.size(), MatrixXd());
  for (size_t k = 0; k < cp_.blocks.size(); ++k) {
    const Block& B = cp_.blocks[k];
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(it.S[k]);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0) return false;
    const MatrixXd& Q = es.eigenvectors();
    const VectorXd r = es.eigenvalues().cwiseSqrt();
    Sinv_[k] = Q * es.eigenvalues().cwiseInverse().asDiagonal() * Q.transpose();
    MatrixXd Sh = Q * r.asDiagonal() * Q.transpose();
    MatrixXd Shi = Q * r.cwiseInverse().asDiagonal() * Q.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> ec(Sh * it.X[k] * Sh);
    MatrixXd Ch = ec.eigenvectors() * ec.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                  ec.eigenvectors().transpose();
    W_[k] = Shi * Ch * Shi;
    W_[k] = 0.5 * (W_[k] + W_[k].transpose());
    const MatrixXd& Wk = W_[k];
    MatrixXd G(B.size, B.size);
    for (size_t t = 0; t < B.rows.size(); ++t) {
      // G = W A_t W, accumulated entry by entry of the sparse A_t.
      G.setZero();
      for (const auto& e : B.coeffs[t]) {
        G.noalias() += e.a * Wk.col(e.r) * Wk.row(e.c);
        if (e.r != e.c) G.noalias() += e.a * Wk.col(e.c) * Wk.row(e.r);
      }
      int i = B.rows[t];
      for (size_t u = t; u < B.rows.size(); ++u) {
        double v = pair_sym(B.coeffs[u], G);
        int j = B.rows[u];
        M_(i, j) += v;
        if (j != i) M_(j, i) += v;
      }
    }
  }
  if (cp_.Al.cols() > 0) {
    D_ = it.xl.cwiseQuotient(it.sl);
    M_.noalias() += cp_.Al * D_.asDiagonal() * cp_.Al.transpose();
  }

  use_lu_ = false;
  const int nf = static_cast<int>(cp_.Af.cols());
  bool ok = false;
  // With free variables the augmented system [[M, Af], [Af', 0]] is factored
  // directly; eliminating them through Af' M^-1 Af loses primal feasibility
  // once M becomes ill-conditioned near the optimum.
  if (nf == 0) {
    double diag_scale = m > 0 ? std::max(1.0, M_.diagonal().cwiseAbs().maxCoeff()) : 1.0;
    for (double reg : {0.0, 1e-14, 1e-12, 1e-10}) {
      MatrixXd Mr = M_;
      Mr.diagonal().array() += reg * diag_scale;
      llt_.compute(Mr);
      if (llt_.info() == Eigen::Success && (llt_.matrixLLT().diagonal().array() > 0).all()) {
        ok = true;
        break;
      }
    }
  }
  if (!ok) {
    MatrixXd K = MatrixXd::Zero(m + nf, m + nf);
    K.topLeftCorner(m, m) = M_;
    K.topRightCorner(m, nf) = cp_.Af;
    K.bottomLeftCorner(nf, m) = cp_.Af.transpose();
    lu_.compute(K);
    use_lu_ = true;
  }
  return true;
}

void InteriorPoint::solve_newton(const VectorXd& h, const VectorXd& rf, VectorXd& dy,
                                 VectorXd& dxf) const {
  const int m = cp_.m;
  const int nf = static_cast<int>(cp_.Af.cols());
  auto raw_solve = [&](const VectorXd& h1, const VectorXd& r1, VectorXd& y1, VectorXd& x1) {
    if (use_lu_) {
      VectorXd rhs(m + nf);
      rhs << h1, r1;
      VectorXd sol = lu_.solve(rhs);
      y1 = sol.head(m);
      x1 = sol.tail(nf);
      return;
    }
    x1 = VectorXd::Zero(0);
    y1 = llt_.solve(h1);
  };
  raw_solve(h, rf, dy, dxf);
  // Iterative refinement against the unregularized system.
  for (int pass = 0; pass < 2; ++pass) {
    VectorXd e1 = h - M_ * dy - cp_.Af * dxf;
    VectorXd e2 = rf - cp_.Af.transpose() * dy;
    if (e1.norm() + e2.norm() <= 1e-15 * (1.0 + h.norm() + rf.norm())) break;
    VectorXd cy, cx;
    raw_solve(e1, e2, cy, cx);
    dy += cy;
    dxf += cx;
  }
}

void InteriorPoint::direction(const Iterate& it, const Residuals& res,
                              const std::vector<MatrixXd>& Rc, const VectorXd& rcl,
                              Iterate& d) const {
  // h = rp - A_l((rcl - x rl)/s) - sum_k A_k(Rc S^-1 - X Rd S^-1)
  VectorXd h = res.rp;
  if (cp_.Al.cols() > 0) {
    VectorXd t = (rcl - it.xl.cwiseProduct(res.rl)).cwiseQuotient(it.sl);
    h -= cp_.Al * t;
  }
  std::vector<MatrixXd> T(cp_.blocks.size());
  for (size_t k = 0; k < cp_.blocks.size(); ++k) {
    MatrixXd RS = Rc[k] * Sinv_[k];
    T[k] = 0.5 * (RS + RS.transpose()) - W_[k] * res.Rd[k] * W_[k];
    const Block& B = cp_.blocks[k];
    for (size_t t = 0; t < B.rows.size(); ++t) h(B.rows[t]) -= pair_sym(B.coeffs[t], T[k]);
  }
  solve_newton(h, res.rf, d.y, d.xf);
  if (cp_.Al.cols() > 0) {
    d.sl = res.rl - cp_.Al.transpose() * d.y;
    d.xl = (rcl - it.xl.cwiseProduct(d.sl)).cwiseQuotient(it.sl);
  } else {
    d.sl.resize(0);
    d.xl.resize(0);
  }
  d.S.resize(cp_.blocks.size());
  d.X.resize(cp_.blocks.size());
  for (size_t k = 0; k < cp_.blocks.size(); ++k) {
    d.S[k] = res.Rd[k] - adjoint(k, d.y);
    MatrixXd RS = Rc[k] * Sinv_[k];
    MatrixXd dX = 0.5 * (RS + RS.transpose()) - W_[k] * d.S[k] * W_[k];
    d.X[k] = 0.5 * (dX + dX.transpose());
  }
  // Refinement against the primal equation itself: an ill-conditioned Schur
  // complement otherwise leaves A dx != rp and the primal residual stalls.
  const double scale = 1e-14 * (1.0 + res.rp.norm());
  for (int pass = 0; pass < 3; ++pass) {
    VectorXd e = res.rp - apply_A(d.xf, d.xl, d.X);
    if (e.norm() <= scale) break;
    VectorXd h = e, cy, cx;
    solve_newton(h, VectorXd::Zero(cp_.Af.cols()), cy, cx);
    d.y += cy;
    d.xf += cx;
    if (cp_.Al.cols() > 0) {
      VectorXd csl = -(cp_.Al.transpose() * cy);
      d.sl += csl;
      d.xl -= it.xl.cwiseProduct(csl).cwiseQuotient(it.sl);
    }
    for (size_t k = 0; k < cp_.blocks.size(); ++k) {
      MatrixXd cS = -adjoint(k, cy);
      MatrixXd cX = -W_[k] * cS * W_[k];
      d.S[k] += cS;
      d.X[k] += 0.5 * (cX + cX.transpose());
    }
  }
}

ConicSolution InteriorPoint::run() {
  const int m = cp_.m;
  const int nf = static_cast<int>(cp_.Af.cols());
  const int nl = static_cast<int>(cp_.Al.cols());
  normb_ = cp_.b.norm();
  double c2 = cp_.cf.squaredNorm() + cp_.cl.squaredNorm();
  for (const auto& B : cp_.blocks) c2 += B.C.squaredNorm();
  normc_ = std::sqrt(c2);
  nvar_cone_ = nl;
  for (const auto& B : cp_.blocks) nvar_cone_ += B.size;

  // Starting point: scaled identities, in the spirit of standard infeasible
  // path-following codes.
  Iterate it;
  it.xf = VectorXd::Zero(nf);
  it.y = VectorXd::Zero(m);
  it.X.resize(cp_.blocks.size());
  it.S.resize(cp_.blocks.size());
  for (size_t k = 0; k < cp_.blocks.size(); ++k) {
    const Block& B = cp_.blocks[k];
    const double s = B.size;
    double ratio = 0.0, amax = 0.0;
    for (size_t t = 0; t < B.rows.size(); ++t) {
      double fn2 = 0.0;
      for (const auto& e : B.coeffs[t]) fn2 += (e.r == e.c ? 1.0 : 2.0) * e.a * e.a;
      double fn = std::sqrt(fn2);
      ratio = std::max(ratio, (1.0 + std::abs(cp_.b(B.rows[t]))) / (1.0 + fn));
      amax = std::max(amax, fn);
    }
    double xi = std::max({10.0, std::sqrt(s), s * ratio});
    double eta = std::max({10.0, std::sqrt(s), amax, B.C.norm()});
    it.X[k] = xi * MatrixXd::Identity(B.size, B.size);
    it.S[k] = eta * MatrixXd::Identity(B.size, B.size);
  }
  if (nl > 0) {
    double ratio = 0.0, amax = 0.0;
    for (int i = 0; i < m; ++i) {
      double fn = cp_.Al.row(i).norm();
      ratio = std::max(ratio, (1.0 + std::abs(cp_.b(i))) / (1.0 + fn));
      amax = std::max(amax, fn);
    }
    double xi = std::max({10.0, std::sqrt(double(nl)), double(nl) * ratio});
    double eta = std::max({10.0, std::sqrt(double(nl)), amax, cp_.cl.norm()});
    it.xl = VectorXd::Constant(nl, xi);
    it.sl = VectorXd::Constant(nl, eta);
  } else {
    it.xl.resize(0);
    it.sl.resize(0);
  }

  ConicSolution out;
  Iterate best = it;
  double best_merit = std::numeric_limits<double>::infinity();
  Residuals best_res;
  int stall = 0;
  Status status = Status::max_iter;
  int iter = 0;

  auto merit_of = [&](const Residuals& r) {
    double g = std::abs(r.pobj - r.dobj) / (1.0 + std::abs(r.pobj));
    return std::max({r.pinf / cfg_.feas_tol, r.dinf / cfg_.feas_tol, g / cfg_.gap_tol});
  };

  Residuals res = residuals(it);
  for (iter = 0; iter < cfg_.max_iter; ++iter) {
    res = residuals(it);
    double merit = merit_of(res);
    if (merit < best_merit) {
      best_merit = merit;
      best = it;
      best_res = res;
    }
    const double gap_abs = std::max(std::abs(res.pobj - res.dobj), res.compl_gap);
    if (cfg_.verbose) {
      std::fprintf(stderr, "%3d pobj %+.10e dobj %+.10e pinf %.2e dinf %.2e gap %.2e mu %.2e |y| %.2e\n",
                   iter, res.pobj, res.dobj, res.pinf, res.dinf, gap_abs, res.mu, it.y.norm());
    }
    if (res.pinf <= cfg_.feas_tol && res.dinf <= cfg_.feas_tol &&
        gap_abs <= cfg_.gap_tol * (1.0 + std::abs(res.pobj))) {
      status = Status::optimal;
      best = it;
      best_res = res;
      break;
    }
    // Farkas certificate for primal infeasibility: y with b'y = 1 and
    // -A'y in the dual cone.
    if (res.dobj > 0) {
      VectorXd yh = it.y / res.dobj;
      double viol = (cp_.Af.transpose() * yh).norm();
      if (nl > 0) viol = std::max(viol, (cp_.Al.transpose() * yh).cwiseMax(0.0).maxCoeff());
      for (size_t k = 0; k < cp_.blocks.size(); ++k)
        viol = std::max(viol, std::max(0.0, max_eig(adjoint(k, yh))));
      if (viol <= cfg_.feas_tol && res.dinf * (1.0 + normc_) / res.dobj <= cfg_.feas_tol) {
        status = Status::infeasible;
        best = it;
        best_res = res;
        break;
      }
    }
    // Certificate of dual infeasibility: x in K with Ax = 0 and c'x < 0.
    if (res.pobj < 0) {
      double scale = -res.pobj;
      VectorXd Ax = apply_A(it.xf, it.xl, it.X);
      if (Ax.norm() / scale <= cfg_.feas_tol && res.pinf * (1.0 + normb_) / scale <= cfg_.feas_tol) {
        status = Status::unbounded;
        best = it;
        best_res = res;
        break;
      }
    }

    if (!factor(it)) {
      if (cfg_.verbose) std::fprintf(stderr, "dual slack lost definiteness\n");
      status = Status::numerical_trouble;
      break;
    }

    // Predictor.
    std::vector<MatrixXd> Rc(cp_.blocks.size());
    for (size_t k = 0; k < cp_.blocks.size(); ++k) Rc[k] = -it.X[k] * it.S[k];
    VectorXd rcl = -it.xl.cwiseProduct(it.sl);
    Iterate da;
    direction(it, res, Rc, rcl, da);
    double ap = 1.0, ad = 1.0;
    for (size_t k = 0; k < cp_.blocks.size(); ++k) {
      ap = std::min(ap, max_step_psd(it.X[k], da.X[k]));
      ad = std::min(ad, max_step_psd(it.S[k], da.S[k]));
    }
    if (nl > 0) {
      ap = std::min(ap, max_step_lp(it.xl, da.xl));
      ad = std::min(ad, max_step_lp(it.sl, da.sl));
    }
    // A short step on either side means little progress; measuring the
    // predicted gap with the common step length keeps enough centering.
    ap = ad = std::min(ap, ad);
    double mu_aff = 0.0;
    if (nvar_cone_ > 0) {
      double g = (it.xl + ap * da.xl).dot(it.sl + ad * da.sl);
      for (size_t k = 0; k < cp_.blocks.size(); ++k)
        g += ((it.X[k] + ap * da.X[k]).cwiseProduct(it.S[k] + ad * da.S[k])).sum();
      mu_aff = g / nvar_cone_;
    }
    double sigma = res.mu > 0 ? std::pow(std::clamp(mu_aff / res.mu, 0.0, 1.0), 3) : 0.0;
    // Some centering is always kept; a pure Newton step near the optimum
    // loses primal feasibility on degenerate problems.
    sigma = std::clamp(sigma, 1e-4, 1.0);

    // Corrector.
    for (size_t k = 0; k < cp_.blocks.size(); ++k) {
      Rc[k] = sigma * res.mu * MatrixXd::Identity(cp_.blocks[k].size, cp_.blocks[k].size) -
              it.X[k] * it.S[k] - da.X[k] * da.S[k];
    }
    if (nl > 0)
      rcl = VectorXd::Constant(nl, sigma * res.mu) - it.xl.cwiseProduct(it.sl) -
            da.xl.cwiseProduct(da.sl);
    Iterate d;
    direction(it, res, Rc, rcl, d);
    if (!d.y.allFinite() || !d.xf.allFinite()) {
      if (cfg_.verbose) std::fprintf(stderr, "non-finite search direction\n");
      status = Status::numerical_trouble;
      break;
    }
    ap = std::numeric_limits<double>::infinity();
    ad = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < cp_.blocks.size(); ++k) {
      ap = std::min(ap, max_step_psd(it.X[k], d.X[k]));
      ad = std::min(ad, max_step_psd(it.S[k], d.S[k]));
    }
    if (nl > 0) {
      ap = std::min(ap, max_step_lp(it.xl, d.xl));
      ad = std::min(ad, max_step_lp(it.sl, d.sl));
    }
    const double gamma = 0.9 + 0.09 * std::min(std::min(ap, 1.0), std::min(ad, 1.0));
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (cfg_.verbose) std::fprintf(stderr, "    sigma %.2e step %.2e / %.2e\n", sigma, ap, ad);

    it.xf += ap * d.xf;
    if (nl > 0) {
      it.xl += ap * d.xl;
      it.sl += ad * d.sl;
    }
    it.y += ad * d.y;
    for (size_t k = 0; k < cp_.blocks.size(); ++k) {
      it.X[k] += ap * d.X[k];
      it.X[k] = 0.5 * (it.X[k] + it.X[k].transpose());
      it.S[k] += ad * d.S[k];
      it.S[k] = 0.5 * (it.S[k] + it.S[k].transpose());
    }
    if (std::max(ap, ad) < 1e-7) {
      if (++stall >= 5) {
        if (cfg_.verbose) std::fprintf(stderr, "step length stalled\n");
        status = Status::numerical_trouble;
        break;
      }
    } else {
      stall = 0;
    }
    if (!it.y.allFinite() || it.y.norm() > 1e14) {
      if (cfg_.verbose) std::fprintf(stderr, "dual iterate diverged\n");
      status = Status::numerical_trouble;
      break;
    }
  }
  if (status == Status::max_iter && iter >= cfg_.max_iter) status = Status::max_iter;

  const Iterate& fin = best;
  const Residuals& fr = best_res;
  out.status = status;
  out.iterations = iter;
  out.free = fin.xf;
  out.nonneg = fin.xl;
  out.psd = fin.X;
  out.dual_nonneg_slack = fin.sl;
  out.dual_psd_slack = fin.S;
  out.primal_residual = fr.pinf;
  out.dual_residual = fr.dinf;
  out.objective_value = cp_.sign * fr.pobj;
  out.dual_objective = cp_.sign * fr.dobj;
  out.gap = std::abs(fr.pobj - fr.dobj);
  out.dual = cp_.sign * fin.y;
  return out;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverConfig& cfg) {
  problem.validate();
  if (problem.num_equalities() == 0 && problem.num_free() + problem.num_nonneg() == 0 &&
      problem.psd_blocks().empty())
    throw std::invalid_argument("conic::solve: structurally empty problem");

  Compiled cp = compile(problem);
  ConicSolution sol;
  if (cp.trivially_infeasible) {
    sol.status = Status::infeasible;
  } else if (cp.m == 0) {
    // No constraints: feasible iff the objective cannot decrease on the cone.
    sol.status = Status::optimal;
    bool unb = cp.cf.cwiseAbs().maxCoeff() > 0.0 || (cp.cl.array() < 0).any();
    for (const auto& B : cp.blocks) unb = unb || min_eig(B.C) < 0;
    if (cp.cf.size() > 0 && cp.cf.cwiseAbs().maxCoeff() > 0.0) unb = true;
    if (unb) sol.status = Status::unbounded;
    sol.nonneg = Eigen::VectorXd::Zero(problem.num_nonneg());
    for (int s : problem.psd_blocks()) sol.psd.push_back(Eigen::MatrixXd::Zero(s, s));
  } else {
    InteriorPoint ip(cp, cfg);
    sol = ip.run();
  }

  // Re-expand to the caller's indexing.
  Eigen::VectorXd red_free = sol.free;
  sol.free = Eigen::VectorXd::Zero(problem.num_free());
  // Dropped dependent columns stay at zero.
  for (size_t j = 0; j < cp.free_map.size() && static_cast<int>(j) < red_free.size(); ++j)
    sol.free(cp.free_map[j]) = red_free(static_cast<int>(j));
  Eigen::VectorXd full_dual = Eigen::VectorXd::Zero(problem.num_equalities());
  for (int i = 0; i < cp.m && i < sol.dual.size(); ++i) full_dual(cp.row_map[static_cast<size_t>(i)]) = sol.dual(i);
  sol.dual = full_dual;
  if (sol.nonneg.size() != problem.num_nonneg()) sol.nonneg = Eigen::VectorXd::Zero(problem.num_nonneg());
  if (sol.psd.size() != problem.psd_blocks().size()) {
    sol.psd.clear();
    for (int s : problem.psd_blocks()) sol.psd.push_back(Eigen::MatrixXd::Zero(s, s));
  }
  sol.objective_value += problem.objective_constant;
  sol.dual_objective += problem.objective_constant;
  return sol;
}

double evaluate(const LinearForm& form, const ConicSolution& sol) {
  double s = 0.0;
  for (const auto& [i, c] : form.free_terms()) s += c * sol.free(i);
  for (const auto& [i, c] : form.nonneg_terms()) s += c * sol.nonneg(i);
  for (const auto& t : form.psd_terms()) s += t.coeff * sol.psd[static_cast<size_t>(t.block)](t.row, t.col);
  return s;
}

CheckReport check_solution(const ConicProblem& problem, const ConicSolution& sol,
                           const SolverConfig& cfg) {
  CheckReport rep;
  std::ostringstream msg;
  for (int i = 0; i < problem.num_equalities(); ++i) {
    const auto& eq = problem.equalities()[static_cast<size_t>(i)];
    double r = std::abs(evaluate(eq.form, sol) - eq.rhs);
    rep.max_equality_residual = std::max(rep.max_equality_residual, r / (1.0 + std::abs(eq.rhs)));
  }
  if (rep.max_equality_residual > cfg.feas_tol)
    rep.violations.push_back("equality residual " + std::to_string(rep.max_equality_residual));
  rep.min_nonneg = sol.nonneg.size() > 0 ? sol.nonneg.minCoeff() : 0.0;
  if (rep.min_nonneg < -cfg.feas_tol)
    rep.violations.push_back("negative nonnegative variable " + std::to_string(rep.min_nonneg));
  for (size_t k = 0; k < sol.psd.size(); ++k) {
    double e = min_eig(sol.psd[k]);
    rep.min_psd_eig.push_back(e);
    if (e < cfg.psd_eig_floor)
      rep.violations.push_back("PSD block " + std::to_string(k) + " min eigenvalue " + std::to_string(e));
  }
  rep.primal_objective = evaluate(problem.objective(), sol) + problem.objective_constant;
  double dobj = problem.objective_constant;
  for (int i = 0; i < problem.num_equalities(); ++i)
    dobj += problem.equalities()[static_cast<size_t>(i)].rhs * sol.dual(i);
  rep.dual_objective = dobj;
  rep.gap = std::abs(rep.primal_objective - rep.dual_objective);
  if (sol.status == Status::optimal && rep.gap > cfg.gap_tol * (1.0 + std::abs(rep.primal_objective)))
    rep.violations.push_back("duality gap " + std::to_string(rep.gap));
  return rep;
}

}  // namespace invpop::conic
