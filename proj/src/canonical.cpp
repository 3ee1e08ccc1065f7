#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/QR>

#include "invpop/inverse.hpp"

namespace invpop {

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n == 0) return x;
  std::vector<bool> passive(static_cast<size_t>(n), false);
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.norm());
  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (passive[static_cast<size_t>(j)]) idx.push_back(j);
    z = Eigen::VectorXd::Zero(n);
    if (idx.empty()) return;
    Eigen::MatrixXd Ap(A.rows(), static_cast<int>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<int>(k)) = A.col(idx[k]);
    Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    for (size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<int>(k));
  };
  for (int outer = 0; outer < max_iter; ++outer) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    int t = -1;
    double wmax = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[static_cast<size_t>(j)] && w(j) > wmax) {
        wmax = w(j);
        t = j;
      }
    if (t < 0) break;
    passive[static_cast<size_t>(t)] = true;
    for (int inner = 0; inner < max_iter; ++inner) {
      Eigen::VectorXd z;
      solve_passive(z);
      bool ok = true;
      for (int j = 0; j < n; ++j)
        if (passive[static_cast<size_t>(j)] && z(j) <= 0) ok = false;
      if (ok) {
        x = z;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        if (passive[static_cast<size_t>(j)] && z(j) <= 0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      x += alpha * (z - x);
      for (int j = 0; j < n; ++j)
        if (passive[static_cast<size_t>(j)] && x(j) <= 1e-15) {
          passive[static_cast<size_t>(j)] = false;
          x(j) = 0.0;
        }
    }
  }
  return x;
}

namespace {

bool usable(conic::Status s) {
  return s == conic::Status::optimal || s == conic::Status::numerical_trouble || s == conic::Status::max_iter;
}

// Fills f~, certificate and moments from a solve built around y.
// ft_centered is f~(. + y) with the constant term of shift(f, y).
void finish_centered(const InverseProblem& p, const FeasibleSet& cert_set, const CertificateLayout& layout,
                     const std::vector<int>& row_eq, const conic::ConicSolution& sol,
                     const Polynomiald& ft_centered, const conic::SolverConfig& cfg, InverseSolution& res) {
  const int n = p.num_vars();
  res.f_tilde = shift(ft_centered, Point(-p.y));
  res.f_tilde.set_coeff(MultiIndex(n), p.f.constant_term());
  res.certificate_set = cert_set;
  res.certificate = uncenter(extract_certificate(layout, sol, n, true, cfg.psd_eig_floor), p.y);
  Polynomiald target = res.f_tilde - Polynomiald::constant(n, res.f_tilde(p.y) - p.epsilon);
  res.report = verify(target, res.certificate, cert_set, 1e-6, cfg.psd_eig_floor);
  res.dual_moments = MomentVectord(n);
  for (int r = 0; r < layout.row_basis.size(); ++r)
    res.dual_moments.set(layout.row_basis[r], -sol.dual(row_eq[static_cast<size_t>(r)]));
  res.z0 = res.dual_moments.mass();
  if (res.report.pass)
    res.status = sol.status == conic::Status::optimal ? InverseStatus::optimal : InverseStatus::inaccurate;
  else
    res.status = InverseStatus::failed;
}

void active_cone(const InverseProblem& p, const Polynomiald& fs, const Eigen::VectorXd& b,
                 CanonicalSolution& cs) {
  const int n = p.num_vars();
  std::vector<Eigen::VectorXd> cols;
  for (int j = 0; j < p.K.num_inequalities(); ++j) {
    const Polynomiald& g = p.K.inequalities()[static_cast<size_t>(j)];
    if (std::abs(g(p.y)) <= 1e-8) {
      cs.active_set.push_back(j + 1);
      cols.push_back(gradient_at(g, p.y));
    }
  }
  for (size_t i = 0; i < p.K.equalities().size(); ++i) {
    cs.active_equalities.push_back(static_cast<int>(i));
    Eigen::VectorXd gi = gradient_at(p.K.equalities()[i], p.y);
    cols.push_back(gi);
    cols.push_back(-gi);
  }
  Eigen::VectorXd target = gradient_at(fs, Point(Point::Zero(n))) + b;
  Eigen::MatrixXd G(n, static_cast<int>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) G.col(static_cast<int>(k)) = cols[k];
  cs.theta = nnls(G, target);
  cs.cone_residual = cols.empty() ? target.norm() : (G * cs.theta - target).norm();
}

}  // namespace

std::pair<InverseSolution, CanonicalSolution> solve_canonical_l1(const InverseProblem& p0,
                                                                 const conic::SolverConfig& cfg, bool cross_check) {
  if (p0.norm != Norm::l1) throw std::invalid_argument("canonical form is defined for the l1 norm only");
  if (!p0.assume_box) throw std::invalid_argument("canonical form requires assume_box (K - y within [-1,1]^n)");
  InverseProblem p = p0;
  p.frame = Frame::centered;
  p.validate();
  const int n = p.num_vars();
  const int d0 = p.d0();
  const FeasibleSet cert_set = p.certificate_set();
  const FeasibleSet Kc = cert_set.centered_at(p.y);
  const Polynomiald fs = shift(p.f, p.y);

  conic::ConicProblem prob;
  CertificateLayout L =
      add_certificate(prob, Kc, p.d, p.epsilon == 0.0 ? vanishing_constant_blocks(Kc) : std::vector<int>{});
  int bp = prob.add_nonneg(n), bm = prob.add_nonneg(n);
  int lam = d0 >= 2 ? prob.add_nonneg(n) : -1;
  std::vector<int> row_eq;
  for (int r = 0; r < L.row_basis.size(); ++r) {
    const MultiIndex& beta = L.row_basis[r];
    conic::LinearForm form = L.rows[static_cast<size_t>(r)];
    double rhs = beta.is_zero() ? p.epsilon : fs.coeff(beta);
    if (beta.degree() == 1) {
      int i = 0;
      while (beta[i] == 0) ++i;
      form.add_nonneg(bp + i, -1.0).add_nonneg(bm + i, 1.0);
    } else if (lam >= 0 && beta.degree() == 2) {
      for (int i = 0; i < n; ++i)
        if (beta[i] == 2) form.add_nonneg(lam + i, -1.0);
    }
    row_eq.push_back(prob.add_equality(form, rhs));
  }
  for (int i = 0; i < n; ++i) {
    prob.objective().add_nonneg(bp + i, 1.0).add_nonneg(bm + i, 1.0);
    if (lam >= 0) prob.objective().add_nonneg(lam + i, 1.0);
  }
  conic::ConicSolution sol = conic::solve(prob, cfg);

  InverseSolution res;
  CanonicalSolution cs;
  res.d = p.d;
  res.norm = Norm::l1;
  res.frame = Frame::centered;
  res.epsilon = p.epsilon;
  res.solver_status = sol.status;
  res.dual_objective = std::numeric_limits<double>::quiet_NaN();
  if (p0.frame != Frame::centered) res.notes.push_back("canonical form measures distance around y");
  if (sol.status == conic::Status::infeasible) {
    res.status = InverseStatus::infeasible;
    return {res, cs};
  }
  if (!usable(sol.status)) return {res, cs};

  cs.b = sol.nonneg.segment(bp, n) - sol.nonneg.segment(bm, n);
  cs.lambda = lam >= 0 ? Eigen::VectorXd(sol.nonneg.segment(lam, n)) : Eigen::VectorXd::Zero(n);
  Polynomiald ftc = fs;
  for (int i = 0; i < n; ++i) {
    ftc.add_term(MultiIndex::unit(n, i), cs.b(i));
    ftc.add_term(MultiIndex::unit(n, i, 2), cs.lambda(i));
  }
  res.rho = sol.objective_value;
  res.rho_recomputed = coeff_norm(Polynomiald(ftc - fs), Norm::l1, true);
  finish_centered(p, cert_set, L, row_eq, sol, ftc, cfg, res);
  active_cone(p, fs, cs.b, cs);

  cs.full_rho = std::numeric_limits<double>::quiet_NaN();
  if (cross_check) {
    InverseSolution full = solve_inverse(p, cfg, false);
    if (full.status == InverseStatus::optimal || full.status == InverseStatus::inaccurate) {
      cs.full_rho = full.rho;
      cs.cross_checked = true;
      if (std::abs(full.rho - res.rho) > 1e-6 * (1 + res.rho))
        res.notes.push_back("canonical and unrestricted rho differ by " +
                            format_number(std::abs(full.rho - res.rho), 3));
    }
  }
  return {res, cs};
}

namespace {

// Returns the lower value (0 or -1) of each variable's binary equality.
std::vector<double> binary_domain(const FeasibleSet& K) {
  const int n = K.num_vars();
  if (K.num_inequalities() > 0) throw std::invalid_argument("zero-one form: K must be given by equalities only");
  std::vector<double> lower(static_cast<size_t>(n), std::numeric_limits<double>::quiet_NaN());
  for (const auto& h : K.equalities()) {
    int var = -1;
    double lead = 0.0;
    for (int i = 0; i < n; ++i) {
      double c = h.coeff(MultiIndex::unit(n, i, 2));
      if (c != 0.0) {
        if (var >= 0) throw std::invalid_argument("zero-one form: equality mixes variables");
        var = i;
        lead = c;
      }
    }
    if (var < 0) throw std::invalid_argument("zero-one form: equality is not of the form x_i^2 - x_i or x_i^2 - 1");
    Polynomiald xi = Polynomiald::variable(n, var);
    Polynomiald one = Polynomiald::constant(n, 1.0);
    Polynomiald r01 = h - (xi * xi - xi) * lead;
    Polynomiald rpm = h - (xi * xi - one) * lead;
    double lo;
    if (coeff_norm(r01, Norm::linf, false) <= 1e-12 * std::abs(lead))
      lo = 0.0;
    else if (coeff_norm(rpm, Norm::linf, false) <= 1e-12 * std::abs(lead))
      lo = -1.0;
    else
      throw std::invalid_argument("zero-one form: equality is not of the form x_i^2 - x_i or x_i^2 - 1");
    if (!std::isnan(lower[static_cast<size_t>(var)]))
      throw std::invalid_argument("zero-one form: variable constrained twice");
    lower[static_cast<size_t>(var)] = lo;
  }
  for (double v : lower)
    if (std::isnan(v)) throw std::invalid_argument("zero-one form: every variable needs a binary equality");
  return lower;
}

}  // namespace

std::pair<InverseSolution, CanonicalSolution> solve_zero_one(const InverseProblem& p,
                                                             const conic::SolverConfig& cfg) {
  p.validate();
  const int n = p.num_vars();
  std::vector<double> lower = binary_domain(p.K);
  Eigen::VectorXd sign(n);
  for (int i = 0; i < n; ++i) {
    double lo = lower[static_cast<size_t>(i)];
    if (std::abs(p.y(i) - lo) <= 1e-8)
      sign(i) = 1.0;
    else if (std::abs(p.y(i) - 1.0) <= 1e-8)
      sign(i) = -1.0;
    else
      throw std::invalid_argument("zero-one form: y is not binary");
  }
  const FeasibleSet Kc = p.K.centered_at(p.y);
  const Polynomiald fs = shift(p.f, p.y);
  conic::ConicProblem prob;
  CertificateLayout L =
      add_certificate(prob, Kc, p.d, p.epsilon == 0.0 ? vanishing_constant_blocks(Kc) : std::vector<int>{});
  int beta = prob.add_nonneg(n);
  std::vector<int> row_eq;
  for (int r = 0; r < L.row_basis.size(); ++r) {
    const MultiIndex& a = L.row_basis[r];
    conic::LinearForm form = L.rows[static_cast<size_t>(r)];
    if (a.degree() == 1) {
      int i = 0;
      while (a[i] == 0) ++i;
      form.add_nonneg(beta + i, -sign(i));
    }
    row_eq.push_back(prob.add_equality(form, a.is_zero() ? p.epsilon : fs.coeff(a)));
  }
  for (int i = 0; i < n; ++i) prob.objective().add_nonneg(beta + i, 1.0);
  conic::ConicSolution sol = conic::solve(prob, cfg);

  InverseSolution res;
  CanonicalSolution cs;
  res.d = p.d;
  res.norm = Norm::l1;
  res.frame = p.frame;
  res.epsilon = p.epsilon;
  res.solver_status = sol.status;
  res.dual_objective = std::numeric_limits<double>::quiet_NaN();
  if (sol.status == conic::Status::infeasible) {
    res.status = InverseStatus::infeasible;
    return {res, cs};
  }
  if (!usable(sol.status)) return {res, cs};
  cs.b = sign.cwiseProduct(sol.nonneg.segment(beta, n));
  cs.lambda = Eigen::VectorXd::Zero(n);
  Polynomiald ftc = fs;
  for (int i = 0; i < n; ++i) ftc.add_term(MultiIndex::unit(n, i), cs.b(i));
  res.rho = sol.objective_value;
  res.rho_recomputed = cs.b.cwiseAbs().sum();
  finish_centered(p, p.K, L, row_eq, sol, ftc, cfg, res);
  active_cone(p, fs, cs.b, cs);
  return {res, cs};
}

}  // namespace invpop
