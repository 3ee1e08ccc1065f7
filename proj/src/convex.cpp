#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "invpop/inverse.hpp"

namespace invpop {

Polynomiald QuadraticModel::polynomial() const {
  const int n = static_cast<int>(b.size());
  Polynomiald p = Polynomiald::constant(n, c);
  for (int i = 0; i < n; ++i) {
    p.add_term(MultiIndex::unit(n, i), b(i));
    p.add_term(MultiIndex::unit(n, i, 2), 0.5 * A(i, i));
    for (int j = i + 1; j < n; ++j) p.add_term(MultiIndex::unit(n, i) + MultiIndex::unit(n, j), A(i, j));
  }
  return p;
}

QuadraticModel quadratic_model(const Polynomiald& p, const Point& y) {
  QuadraticModel m;
  m.c = p(y);
  m.b = gradient_at(p, y);
  m.A = hessian_at(p, y);
  return m;
}

MembershipResult convexity_certificate(const Polynomiald& p, const FeasibleSet& K, int d,
                                       const conic::SolverConfig& cfg) {
  return membership(hessian_form(p), doubled_set(K), d, cfg);
}

namespace {

// Adds deviation variables for e_k - t_k and accumulates ||.||_norm into the
// objective (l2 is the sum of squares).
void add_deviation(conic::ConicProblem& prob, Norm norm, const std::vector<conic::LinearForm>& exprs,
                   const std::vector<double>& targets) {
  const int m = static_cast<int>(exprs.size());
  if (m == 0) return;
  if (norm == Norm::l2) {
    for (int k = 0; k < m; ++k) {
      int W = prob.add_psd_block(2);
      prob.add_equality(conic::LinearForm().add_psd(W, 1, 1, 1.0), 1.0);
      conic::LinearForm row;
      row.add_psd(W, 0, 1, 1.0);
      for (const auto& [i, c] : exprs[static_cast<size_t>(k)].free_terms()) row.add_free(i, -c);
      for (const auto& [i, c] : exprs[static_cast<size_t>(k)].nonneg_terms()) row.add_nonneg(i, -c);
      for (const auto& t : exprs[static_cast<size_t>(k)].psd_terms()) row.add_psd(t.block, t.row, t.col, -t.coeff);
      prob.add_equality(row, -targets[static_cast<size_t>(k)]);
      prob.objective().add_psd(W, 0, 0, 1.0);
    }
    return;
  }
  int p = prob.add_nonneg(m), q = prob.add_nonneg(m);
  for (int k = 0; k < m; ++k) {
    conic::LinearForm row = exprs[static_cast<size_t>(k)];
    row.add_nonneg(p + k, -1.0).add_nonneg(q + k, 1.0);
    prob.add_equality(row, targets[static_cast<size_t>(k)]);
  }
  if (norm == Norm::l1) {
    for (int k = 0; k < m; ++k) prob.objective().add_nonneg(p + k, 1.0).add_nonneg(q + k, 1.0);
    return;
  }
  int lam = prob.add_nonneg(1), s = prob.add_nonneg(m);
  for (int k = 0; k < m; ++k)
    prob.add_equality(
        conic::LinearForm().add_nonneg(lam, 1.0).add_nonneg(p + k, -1.0).add_nonneg(q + k, -1.0).add_nonneg(s + k, -1.0),
        0.0);
  prob.objective().add_nonneg(lam, 1.0);
}

bool usable(conic::Status s) {
  return s == conic::Status::optimal || s == conic::Status::numerical_trouble || s == conic::Status::max_iter;
}

}  // namespace

ConvexQuadraticResult solve_convex_quadratic(const InverseProblem& p, const conic::SolverConfig& cfg) {
  if (p.target_degree >= 0 && p.target_degree != 2)
    throw std::invalid_argument("convex-quadratic method needs target_degree 2");
  const int n = p.num_vars();
  if (p.y.size() != n) throw std::invalid_argument("y has the wrong dimension");
  const FeasibleSet K = p.certificate_set();
  if (!K.contains(p.y)) throw std::invalid_argument("y is not feasible");
  for (int j = 0; j < K.num_inequalities(); ++j) {
    const Polynomiald& g = K.inequalities()[static_cast<size_t>(j)];
    bool concave = g.degree() <= 1;
    if (g.degree() == 2) {
      Eigen::MatrixXd H = hessian_at(g, Point(Point::Zero(n)));
      concave = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().maxCoeff() <= 1e-12;
    }
    if (!concave)
      throw std::invalid_argument("constraint g_" + std::to_string(j + 1) +
                                  " is not concave; use the general solve with --convex (Hessian certificate)");
  }
  for (const auto& h : K.equalities())
    if (h.degree() > 1)
      throw std::invalid_argument("nonlinear equality constraint; use the general solve with --convex");

  ConvexQuadraticResult out;
  out.original = quadratic_model(p.f, p.y);
  InverseSolution& res = out.solution;
  res.d = 1;
  res.norm = p.norm;
  res.frame = Frame::centered;
  res.epsilon = p.epsilon;
  res.certificate_set = K;
  res.dual_objective = std::numeric_limits<double>::quiet_NaN();
  if (p.frame != Frame::centered) res.notes.push_back("convex-quadratic distance is measured around y");
  if (p.f.degree() > 2) res.notes.push_back("terms of degree > 2 are dropped from the model");

  // Columns of the b-step: active inequality gradients (lambda >= 0) and
  // equality gradients (free sign).
  std::vector<Eigen::VectorXd> grads;
  std::vector<bool> is_eq;
  for (int j = 0; j < K.num_inequalities(); ++j) {
    const Polynomiald& g = K.inequalities()[static_cast<size_t>(j)];
    if (std::abs(g(p.y)) <= 1e-8) {
      out.active_set.push_back(j + 1);
      grads.push_back(gradient_at(g, p.y));
      is_eq.push_back(false);
    }
  }
  for (const auto& h : K.equalities()) {
    grads.push_back(gradient_at(h, p.y));
    is_eq.push_back(true);
  }
  const int na = static_cast<int>(out.active_set.size());
  const int nc = static_cast<int>(grads.size());

  // Step 1: min || b - G lambda ||.
  conic::ConicProblem lp;
  int lam = lp.add_nonneg(na);
  int mu = lp.add_free(nc - na);
  {
    std::vector<conic::LinearForm> exprs(static_cast<size_t>(n));
    std::vector<double> targets(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < nc; ++k) {
        if (is_eq[static_cast<size_t>(k)])
          exprs[static_cast<size_t>(i)].add_free(mu + k - na, grads[static_cast<size_t>(k)](i));
        else
          exprs[static_cast<size_t>(i)].add_nonneg(lam + k, grads[static_cast<size_t>(k)](i));
      }
      targets[static_cast<size_t>(i)] = out.original.b(i);
    }
    add_deviation(lp, p.norm, exprs, targets);
  }
  conic::ConicSolution s1 = conic::solve(lp, cfg);

  // Step 2: min || A~ - A || over A~ PSD, in coefficient space.
  conic::ConicProblem sdp;
  int blk = sdp.add_psd_block(n);
  {
    std::vector<conic::LinearForm> exprs;
    std::vector<double> targets;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double w = i == j ? 0.5 : 1.0;
        exprs.push_back(conic::LinearForm().add_psd(blk, i, j, w));
        targets.push_back(w * out.original.A(i, j));
      }
    add_deviation(sdp, p.norm, exprs, targets);
  }
  conic::ConicSolution s2 = conic::solve(sdp, cfg);

  res.solver_status = s1.status == conic::Status::optimal ? s2.status : s1.status;
  if (!usable(s1.status) || !usable(s2.status)) {
    res.status = InverseStatus::failed;
    return out;
  }

  Eigen::VectorXd lambda = s1.nonneg.segment(lam, na);
  Eigen::VectorXd mult(nc);
  for (int k = 0; k < nc; ++k) mult(k) = k < na ? std::max(0.0, lambda(k)) : s1.free(mu + k - na);
  out.multipliers = mult;

  QuadraticModel& m = out.model;
  m.c = out.original.c;
  m.b = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < nc; ++k) m.b += mult(k) * grads[static_cast<size_t>(k)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s2.psd[static_cast<size_t>(blk)]);
  m.A = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();

  out.rho_linear = coeff_norm(Polynomiald(QuadraticModel{Eigen::MatrixXd::Zero(n, n), m.b - out.original.b, 0.0}.polynomial()),
                              p.norm, true);
  out.rho_quadratic = coeff_norm(
      Polynomiald(QuadraticModel{m.A - out.original.A, Eigen::VectorXd::Zero(n), 0.0}.polynomial()), p.norm, true);
  res.rho = p.norm == Norm::linf ? std::max(s1.objective_value, s2.objective_value)
                                 : s1.objective_value + s2.objective_value;
  Polynomiald ftc = m.polynomial();
  res.rho_recomputed = coeff_norm(Polynomiald(ftc - out.original.polynomial()), p.norm, true);
  res.f_tilde = shift(ftc, Point(-p.y));
  res.f_tilde.set_coeff(MultiIndex(n), p.f.constant_term());

  // Degree-1 certificate around y: f~ - f~(y) + eps = sum lambda_j g_j +
  // sum mu_i h_i + eps + u'(A~ - sum lambda_j H_j)u / 2.
  Eigen::MatrixXd Q = m.A;
  for (int k = 0; k < na; ++k) {
    const Polynomiald& g = K.inequalities()[static_cast<size_t>(out.active_set[static_cast<size_t>(k)] - 1)];
    Q -= mult(k) * hessian_at(g, p.y);
  }
  const FeasibleSet Kc = K.centered_at(p.y);
  PutinarCertificate cert;
  cert.n = n;
  cert.d = 1;
  Eigen::MatrixXd G0 = Eigen::MatrixXd::Zero(n + 1, n + 1);
  G0(0, 0) = p.epsilon;
  G0.bottomRightCorner(n, n) = 0.5 * Q;
  cert.sos.emplace_back(0, G0);
  for (int k = 0; k < na; ++k) {
    int j = out.active_set[static_cast<size_t>(k)];
    MonomialBasis bj(n, 1 - Kc.half_degree(j));
    Eigen::MatrixXd Gj = Eigen::MatrixXd::Zero(bj.size(), bj.size());
    Gj(0, 0) = mult(k);
    cert.sos.emplace_back(j, Gj);
  }
  for (int k = na; k < nc; ++k) cert.free.emplace_back(k - na, Polynomiald::constant(n, mult(k)));
  res.certificate = uncenter(cert, p.y);
  Polynomiald target = res.f_tilde - Polynomiald::constant(n, res.f_tilde(p.y) - p.epsilon);
  res.report = verify(target, res.certificate, K, 1e-6, cfg.psd_eig_floor);

  Polynomiald L = res.f_tilde;
  for (int k = 0; k < na; ++k)
    L -= mult(k) * K.inequalities()[static_cast<size_t>(out.active_set[static_cast<size_t>(k)] - 1)];
  for (int k = na; k < nc; ++k) L -= mult(k) * K.equalities()[static_cast<size_t>(k - na)];
  out.lagrangian_gradient = gradient_at(L, p.y);
  out.lagrangian_hessian = hessian_at(L, p.y);

  const bool opt = s1.status == conic::Status::optimal && s2.status == conic::Status::optimal;
  res.status = res.report.pass ? (opt ? InverseStatus::optimal : InverseStatus::inaccurate) : InverseStatus::failed;
  return out;
}

}  // namespace invpop
