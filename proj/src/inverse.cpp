#include "invpop/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace invpop {

const char* to_string(Frame f) { return f == Frame::original ? "original" : "centered"; }

const char* to_string(InverseStatus s) {
  switch (s) {
    case InverseStatus::optimal: return "optimal";
    case InverseStatus::inaccurate: return "inaccurate";
    case InverseStatus::infeasible: return "infeasible";
    case InverseStatus::failed: return "failed";
  }
  return "?";
}

void InverseProblem::validate(double tol) const {
  const int n = num_vars();
  if (n < 1) throw std::invalid_argument("objective has no variables");
  if (K.num_vars() != n) throw std::invalid_argument("feasible set and objective disagree on variable count");
  if (y.size() != n) throw std::invalid_argument("point y has length " + std::to_string(y.size()) +
                                                 ", expected " + std::to_string(n));
  if (epsilon < 0) throw std::invalid_argument("epsilon must be nonnegative");
  if (target_degree >= 0 && target_degree < f.degree())
    throw std::invalid_argument("target degree " + std::to_string(target_degree) +
                                " is below deg f; use the convex-quadratic path to drop terms");
  if (d0() < 1) throw std::invalid_argument("objective must have degree >= 1");
  if (2 * d < d0())
    throw std::invalid_argument("degree bound d=" + std::to_string(d) + " too small: need 2d >= " +
                                std::to_string(d0()));
  FeasibleSet Kc = certificate_set();
  if (d < Kc.max_half_degree())
    throw std::invalid_argument("degree bound d=" + std::to_string(d) + " is below the constraint half-degree " +
                                std::to_string(Kc.max_half_degree()));
  double viol = K.violation(y);
  if (viol > tol)
    throw std::invalid_argument("point y violates the constraints by " + format_number(viol, 6));
  if (assume_box) {
    Point yn = frame == Frame::original ? y : Point(Point::Zero(n));
    if (yn.cwiseAbs().maxCoeff() > 1 + tol)
      throw std::invalid_argument("assume_box: y lies outside [-1,1]^n");
  }
  for (const auto& a : structural) {
    if (a.size() != n) throw std::invalid_argument("structural monomial has wrong variable count");
    if (a.degree() > d0()) throw std::invalid_argument("structural monomial exceeds the target degree");
  }
  if (box) {
    if (static_cast<int>(box->lower.size()) != n || static_cast<int>(box->upper.size()) != n)
      throw std::invalid_argument("box has wrong dimension");
  }
}

FeasibleSet InverseProblem::certificate_set() const {
  FeasibleSet Kb = K;
  if (assume_box) {
    const int n = num_vars();
    for (int i = 0; i < n; ++i) {
      Polynomiald xi = Polynomiald::variable(n, i);
      if (frame == Frame::centered) xi -= Polynomiald::constant(n, y(i));
      Kb.add_inequality(Polynomiald::constant(n, 1.0) - xi * xi);
    }
  }
  return Kb;
}

Polynomiald InverseProblem::f_norm_frame() const { return frame == Frame::original ? f : shift(f, y); }

std::map<MultiIndex, std::vector<std::pair<MultiIndex, double>>> transfer_map(
    const InverseProblem& p, const std::vector<MultiIndex>& monomials) {
  std::map<MultiIndex, std::vector<std::pair<MultiIndex, double>>> T;
  for (const auto& a : monomials) {
    auto& row = T[a];
    if (p.frame == Frame::centered) {
      row.emplace_back(a, 1.0);
      continue;
    }
    Polynomiald s = shift(Polynomiald::monomial(a), p.y);
    for (const auto& [beta, c] : s.terms()) row.emplace_back(beta, c);
  }
  return T;
}

namespace {

struct MonomialSplit {
  std::vector<MultiIndex> free;
  std::vector<MultiIndex> pinned;
};

MonomialSplit split_monomials(const InverseProblem& p) {
  MonomialSplit s;
  MonomialBasis b(p.num_vars(), p.d0());
  for (const auto& a : b.list()) {
    if (a.is_zero()) continue;
    (p.structural.count(a) ? s.pinned : s.free).push_back(a);
  }
  return s;
}

// Linear map from a polynomial's coefficients over `monomials` to the
// coefficients of a derived polynomial, stored per output monomial.
using Spread = std::map<MultiIndex, std::vector<std::pair<int, double>>>;

}  // namespace

FeasibleSet doubled_set(const FeasibleSet& K) {
  const int n = K.num_vars();
  FeasibleSet D(2 * n);
  for (const auto& g : K.inequalities()) D.add_inequality(g.embed(2 * n, 0));
  for (const auto& h : K.equalities()) D.add_equality(h.embed(2 * n, 0));
  Polynomiald sphere = Polynomiald::constant(2 * n, 1.0);
  for (int i = 0; i < n; ++i) sphere -= Polynomiald::variable(2 * n, n + i).pow(2);
  D.add_equality(sphere);
  return D;
}

Polynomiald hessian_form(const Polynomiald& p) {
  const int n = p.num_vars();
  Polynomiald e = p.embed(2 * n, 0);
  Polynomiald q(2 * n);
  for (int i = 0; i < n; ++i) {
    Polynomiald di = e.derivative(i);
    for (int j = 0; j < n; ++j) {
      Polynomiald dij = di.derivative(j);
      if (dij.is_zero()) continue;
      q += dij * Polynomiald::variable(2 * n, n + i) * Polynomiald::variable(2 * n, n + j);
    }
  }
  return q;
}

conic::ConicProblem build_primal(const InverseProblem& p, PrimalLayout* out) {
  p.validate();
  const int n = p.num_vars();
  const int d = p.d;
  conic::ConicProblem prob;
  PrimalLayout L;
  L.centered_set = p.certificate_set().centered_at(p.y);
  // With epsilon = 0 the certified polynomial vanishes at y, which pins the
  // constant Gram entries to zero; removing them keeps the program strictly
  // feasible.
  std::vector<int> reduced;
  if (p.epsilon == 0.0) reduced = vanishing_constant_blocks(L.centered_set);
  L.certificate = add_certificate(prob, L.centered_set, d, reduced);

  MonomialSplit split = split_monomials(p);
  L.free_monomials = split.free;
  L.pinned_monomials = split.pinned;
  const int nfree = static_cast<int>(split.free.size());
  int first = nfree > 0 ? prob.add_free(nfree) : 0;
  for (int k = 0; k < nfree; ++k) L.free_var.push_back(first + k);

  const Polynomiald fn = p.f_norm_frame();
  std::vector<MultiIndex> all = split.free;
  all.insert(all.end(), split.pinned.begin(), split.pinned.end());
  auto T = transfer_map(p, all);

  // Certificate rows: cert_beta - sum_a T(a,beta) f~_a = pinned part, beta != 0.
  const MonomialBasis& rows = L.certificate.row_basis;
  std::vector<conic::LinearForm> forms = L.certificate.rows;
  std::vector<double> rhs(forms.size(), 0.0);
  rhs[0] = p.epsilon;
  for (int k = 0; k < nfree; ++k)
    for (const auto& [beta, c] : T.at(split.free[static_cast<size_t>(k)])) {
      if (beta.is_zero()) continue;
      forms[static_cast<size_t>(rows.index_of(beta))].add_free(L.free_var[static_cast<size_t>(k)], -c);
    }
  for (const auto& a : split.pinned)
    for (const auto& [beta, c] : T.at(a)) {
      if (beta.is_zero()) continue;
      rhs[static_cast<size_t>(rows.index_of(beta))] += c * fn.coeff(a);
    }
  for (size_t r = 0; r < forms.size(); ++r) L.row_equality.push_back(prob.add_equality(forms[r], rhs[r]));

  // Distance to f.
  switch (p.norm) {
    case Norm::l1: {
      for (int k = 0; k < nfree; ++k) {
        int v = prob.add_nonneg(2);
        prob.add_equality(conic::LinearForm()
                              .add_free(L.free_var[static_cast<size_t>(k)], 1.0)
                              .add_nonneg(v, -1.0)
                              .add_nonneg(v + 1, 1.0),
                          fn.coeff(split.free[static_cast<size_t>(k)]));
        prob.objective().add_nonneg(v, 1.0).add_nonneg(v + 1, 1.0);
      }
      break;
    }
    case Norm::linf: {
      int lam = prob.add_nonneg(1);
      prob.objective().add_nonneg(lam, 1.0);
      for (int k = 0; k < nfree; ++k) {
        int v = prob.add_nonneg(3);
        prob.add_equality(conic::LinearForm()
                              .add_free(L.free_var[static_cast<size_t>(k)], 1.0)
                              .add_nonneg(v, -1.0)
                              .add_nonneg(v + 1, 1.0),
                          fn.coeff(split.free[static_cast<size_t>(k)]));
        prob.add_equality(conic::LinearForm()
                              .add_nonneg(lam, 1.0)
                              .add_nonneg(v, -1.0)
                              .add_nonneg(v + 1, -1.0)
                              .add_nonneg(v + 2, -1.0),
                          0.0);
      }
      break;
    }
    case Norm::l2: {
      // [[t, delta], [delta, 1]] >= 0 with delta = f~_a - f_a, so t >= delta^2.
      for (int k = 0; k < nfree; ++k) {
        int blk = prob.add_psd_block(2);
        prob.add_equality(conic::LinearForm().add_psd(blk, 1, 1, 1.0), 1.0);
        prob.add_equality(conic::LinearForm()
                              .add_psd(blk, 0, 1, 1.0)
                              .add_free(L.free_var[static_cast<size_t>(k)], -1.0),
                          -fn.coeff(split.free[static_cast<size_t>(k)]));
        prob.objective().add_psd(blk, 0, 0, 1.0);
      }
      break;
    }
  }

  if (p.require_convex) {
    std::map<MultiIndex, int> var_of;
    for (int k = 0; k < nfree; ++k) var_of[split.free[static_cast<size_t>(k)]] = L.free_var[static_cast<size_t>(k)];
    if (p.d0() <= 2) {
      // Constant Hessian: a PSD block equal to it entry by entry.
      int H = prob.add_psd_block(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          MultiIndex a = MultiIndex::unit(n, i) + MultiIndex::unit(n, j);
          double scale = i == j ? 2.0 : 1.0;
          conic::LinearForm form;
          form.add_psd(H, i, j, 1.0);
          double r = 0.0;
          if (var_of.count(a))
            form.add_free(var_of[a], -scale);
          else
            r = scale * fn.coeff(a);
          prob.add_equality(form, r);
        }
    } else {
      FeasibleSet D = doubled_set(L.centered_set);
      if (basis_size(2 * n, d) > p.convexity_cap)
        throw std::invalid_argument("convexity certificate basis size " + std::to_string(basis_size(2 * n, d)) +
                                    " exceeds the cap " + std::to_string(p.convexity_cap));
      CertificateLayout C = add_certificate(prob, D, d);
      std::vector<conic::LinearForm> cf = C.rows;
      std::vector<double> crhs(cf.size(), 0.0);
      for (const auto& a : all) {
        // Norm-frame monomial written around y, then its Hessian form.
        Polynomiald P(n);
        for (const auto& [beta, c] : T.at(a)) P.add_term(beta, c);
        Polynomiald q = hessian_form(P);
        for (const auto& [gamma, c] : q.terms()) {
          int r = C.row_basis.index_of(gamma);
          if (r < 0) throw std::logic_error("convexity row outside the certificate support");
          if (var_of.count(a))
            cf[static_cast<size_t>(r)].add_free(var_of[a], -c);
          else
            crhs[static_cast<size_t>(r)] += c * fn.coeff(a);
        }
      }
      for (size_t r = 0; r < cf.size(); ++r) prob.add_equality(cf[r], crhs[r]);
      L.convexity = std::move(C);
    }
  }
  if (out) *out = std::move(L);
  return prob;
}

conic::ConicProblem build_dual(const InverseProblem& p) {
  p.validate();
  if (p.require_convex) throw std::invalid_argument("build_dual: convexity-constrained programs have no dual builder");
  const int n = p.num_vars();
  const int d = p.d;
  conic::ConicProblem prob;
  FeasibleSet Kc = p.certificate_set().centered_at(p.y);
  MonomialBasis rows(n, 2 * d);
  int z = prob.add_free(rows.size());
  auto zv = [&](const MultiIndex& a) {
    int r = rows.index_of(a);
    if (r < 0) throw std::logic_error("build_dual: moment index outside N^n_2d");
    return z + r;
  };

  // Mirror of the primal reduction: the rows and columns of the constant
  // monomial are dropped from the same moment and localizing matrices.
  std::vector<int> reduced;
  if (p.epsilon == 0.0) reduced = vanishing_constant_blocks(Kc);
  for (int j = 0; j <= Kc.num_inequalities(); ++j) {
    auto map = localizing_structure(Kc.generator(j), d - Kc.half_degree(j));
    const int skip = std::find(reduced.begin(), reduced.end(), j) != reduced.end() ? 1 : 0;
    if (map.dim() == skip) continue;
    int W = prob.add_psd_block(map.dim() - skip);
    std::map<std::pair<int, int>, conic::LinearForm> link;
    for (const auto& [alpha, entries] : map.blocks())
      for (const auto& e : entries)
        if (e.row <= e.col) link[{e.row, e.col}].add_free(zv(alpha), -e.value);
    for (int r = skip; r < map.dim(); ++r)
      for (int c = r; c < map.dim(); ++c) {
        conic::LinearForm form = link.count({r, c}) ? link[{r, c}] : conic::LinearForm();
        form.add_psd(W, r - skip, c - skip, 1.0);
        prob.add_equality(form, 0.0);
      }
  }
  // Ideal rows L_z(h_i u^g) = 0. Products h_i h_k make some of them linear
  // combinations of others; those are skipped so the system keeps full row rank.
  Eigen::MatrixXd span(rows.size(), 0);
  for (size_t i = 0; i < Kc.equalities().size(); ++i) {
    MonomialBasis fb(n, 2 * (d - Kc.equality_half_degree(static_cast<int>(i))));
    for (const auto& g : fb.list()) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(rows.size());
      for (const auto& [delta, hc] : Kc.equalities()[i].terms()) v(zv(g + delta) - z) += hc;
      const double scale = v.norm();
      Eigen::VectorXd r = v - span * (span.transpose() * v);
      r -= span * (span.transpose() * r);
      if (r.norm() <= 1e-9 * scale) continue;
      span.conservativeResize(Eigen::NoChange, span.cols() + 1);
      span.col(span.cols() - 1) = r / r.norm();
      conic::LinearForm form;
      for (const auto& [delta, hc] : Kc.equalities()[i].terms()) form.add_free(zv(g + delta), hc);
      prob.add_equality(form, 0.0);
    }
  }

  MonomialSplit split = split_monomials(p);
  auto T = transfer_map(p, split.free);
  const Polynomiald fn = p.f_norm_frame();
  auto moment_form = [&](const MultiIndex& a) {
    conic::LinearForm m;
    for (const auto& [beta, c] : T.at(a))
      if (!beta.is_zero()) m.add_free(zv(beta), c);
    return m;
  };
  switch (p.norm) {
    case Norm::l1:
      for (const auto& a : split.free) {
        int s = prob.add_nonneg(2);
        prob.add_equality(moment_form(a).add_nonneg(s, 1.0), 1.0);
        conic::LinearForm neg;
        for (const auto& [beta, c] : T.at(a))
          if (!beta.is_zero()) neg.add_free(zv(beta), -c);
        prob.add_equality(neg.add_nonneg(s + 1, 1.0), 1.0);
      }
      break;
    case Norm::linf: {
      conic::LinearForm total;
      for (const auto& a : split.free) {
        int uv = prob.add_nonneg(2);
        prob.add_equality(moment_form(a).add_nonneg(uv, -1.0).add_nonneg(uv + 1, 1.0), 0.0);
        total.add_nonneg(uv, 1.0).add_nonneg(uv + 1, 1.0);
      }
      int s = prob.add_nonneg(1);
      prob.add_equality(total.add_nonneg(s, 1.0), 1.0);
      break;
    }
    case Norm::l2:
      for (const auto& a : split.free) {
        int D = prob.add_psd_block(2);
        prob.add_equality(conic::LinearForm().add_psd(D, 0, 0, 1.0), 1.0);
        prob.add_equality(moment_form(a).add_psd(D, 0, 1, 2.0), 0.0);
        prob.objective().add_psd(D, 1, 1, -1.0);
      }
      break;
  }

  // max L_z(f'(0) - f' - eps) with f' = f(. + y).
  Polynomiald fs = shift(p.f, p.y);
  prob.objective().add_free(zv(MultiIndex(n)), -p.epsilon);
  for (const auto& [beta, c] : fs.terms())
    if (!beta.is_zero()) prob.objective().add_free(zv(beta), -c);
  prob.sense = conic::Sense::maximize;
  return prob;
}

namespace {

bool usable(conic::Status s) {
  return s == conic::Status::optimal || s == conic::Status::numerical_trouble || s == conic::Status::max_iter;
}

}  // namespace

InverseSolution solve_inverse(const InverseProblem& p, const conic::SolverConfig& cfg, bool cross_check_dual) {
  PrimalLayout L;
  conic::ConicProblem prob = build_primal(p, &L);
  const int n = p.num_vars();
  InverseSolution res;
  res.d = p.d;
  res.norm = p.norm;
  res.frame = p.frame;
  res.epsilon = p.epsilon;
  res.certificate_set = p.certificate_set();

  conic::ConicSolution sol = conic::solve(prob, cfg);
  res.solver_status = sol.status;
  if (sol.status == conic::Status::infeasible) {
    res.status = InverseStatus::infeasible;
    res.notes.push_back("no degree-" + std::to_string(p.d) + " certificate exists for any admissible objective");
    return res;
  }
  if (!usable(sol.status)) {
    res.status = InverseStatus::failed;
    return res;
  }

  const Polynomiald fn = p.f_norm_frame();
  Polynomiald ftn(n);
  ftn.add_term(MultiIndex(n), fn.constant_term());
  for (const auto& a : L.pinned_monomials) ftn.add_term(a, fn.coeff(a));
  for (size_t k = 0; k < L.free_monomials.size(); ++k) ftn.add_term(L.free_monomials[k], sol.free(L.free_var[k]));
  if (p.frame == Frame::original) {
    res.f_tilde = ftn;
  } else {
    res.f_tilde = shift(ftn, Point(-p.y));
    res.f_tilde.set_coeff(MultiIndex(n), p.f.constant_term());
  }
  res.rho = sol.objective_value;
  res.rho_recomputed = coeff_norm(Polynomiald(ftn - fn), p.norm, true);

  PutinarCertificate centered = extract_certificate(L.certificate, sol, n, true, cfg.psd_eig_floor);
  res.certificate = uncenter(centered, p.y);
  Polynomiald target = res.f_tilde - Polynomiald::constant(n, res.f_tilde(p.y) - p.epsilon);
  res.report = verify(target, res.certificate, res.certificate_set, 1e-6, cfg.psd_eig_floor);

  res.dual_moments = MomentVectord(n);
  for (int r = 0; r < L.certificate.row_basis.size(); ++r)
    res.dual_moments.set(L.certificate.row_basis[r], -sol.dual(L.row_equality[static_cast<size_t>(r)]));
  res.z0 = res.dual_moments.mass();

  if (res.report.pass)
    res.status = sol.status == conic::Status::optimal ? InverseStatus::optimal : InverseStatus::inaccurate;
  else
    res.status = InverseStatus::failed;
  if (std::abs(res.rho - res.rho_recomputed) > 1e-6 * (1 + std::abs(res.rho)))
    res.notes.push_back("objective and recomputed distance differ by " +
                        format_number(std::abs(res.rho - res.rho_recomputed), 3));

  if (cross_check_dual && !p.require_convex) {
    conic::ConicSolution ds = conic::solve(build_dual(p), cfg);
    if (usable(ds.status)) {
      res.dual_objective = ds.objective_value;
      res.dual_solved = true;
      if (ds.status != conic::Status::optimal)
        res.notes.push_back(std::string("dual program stopped with status ") + conic::to_string(ds.status));
    } else {
      res.dual_objective = std::numeric_limits<double>::quiet_NaN();
      res.notes.push_back(std::string("dual program status ") + conic::to_string(ds.status));
    }
  } else {
    res.dual_objective = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

InverseSolution solve_structural(const InverseProblem& p, const conic::SolverConfig& cfg) {
  return solve_inverse(p, cfg, true);
}

GapBound optimality_gap_bound(const InverseSolution& sol, const InverseProblem& p,
                              const std::optional<Point>& xstar_hint) {
  GapBound g;
  const int n = p.num_vars();
  const double fy = p.f(p.y);
  g.upper = fy;
  if (p.norm == Norm::l2) {
    g.available = false;
    g.lower = -std::numeric_limits<double>::infinity();
    g.note = "no coefficient bound is available for the l2 norm";
    return g;
  }
  // Per-variable magnitude bound M_i on |x_i| (original) or |x_i - y_i| (centered) over K.
  std::optional<Eigen::VectorXd> M;
  if (xstar_hint) {
    M = p.frame == Frame::original ? Eigen::VectorXd(xstar_hint->cwiseAbs())
                                   : Eigen::VectorXd((*xstar_hint - p.y).cwiseAbs());
    g.source = "hint";
  } else if (p.assume_box) {
    M = Eigen::VectorXd::Ones(n);
    g.source = "assume_box";
  } else if (p.box) {
    Eigen::VectorXd m(n);
    for (int i = 0; i < n; ++i) {
      double lo = p.box->lower[static_cast<size_t>(i)], hi = p.box->upper[static_cast<size_t>(i)];
      if (p.frame == Frame::centered) {
        lo -= p.y(i);
        hi -= p.y(i);
      }
      m(i) = std::max(std::abs(lo), std::abs(hi));
    }
    M = m;
    g.source = "box";
  } else {
    throw std::invalid_argument("optimality_gap_bound: needs a box, assume_box or a minimizer hint");
  }
  // f(y) - f* <= eps + sum_a |f~_a - f_a| (|x*^a| + |y^a|), the y term vanishing in the centered frame.
  MonomialBasis b(n, p.d0());
  double best = 0.0;
  for (const auto& a : b.list()) {
    if (a.is_zero()) continue;
    double mx = 1.0, my = 1.0;
    for (int i = 0; i < n; ++i) {
      mx *= std::pow((*M)(i), a[i]);
      my *= std::pow(std::abs(p.y(i)), a[i]);
    }
    double term = p.frame == Frame::original ? mx + my : mx;
    best = std::max(best, term);
  }
  // l1: ||f~ - f||_1 max_a term; linf: s(d0) max_a term bounds the sum.
  g.factor = p.norm == Norm::l1 ? best : static_cast<double>(b.size()) * best;
  g.available = true;
  g.lower = fy - p.epsilon - sol.rho * g.factor;
  return g;
}

ForwardResult forward_solve(const Polynomiald& f, const FeasibleSet& K, int d, const conic::SolverConfig& cfg) {
  const int n = f.num_vars();
  if (2 * d < f.degree()) throw std::invalid_argument("forward_solve: need 2d >= deg f");
  conic::ConicProblem prob;
  CertificateLayout L = add_certificate(prob, K, d);
  int t = prob.add_free(1);
  std::vector<int> row_eq;
  for (int r = 0; r < L.row_basis.size(); ++r) {
    conic::LinearForm form = L.rows[static_cast<size_t>(r)];
    if (r == 0) form.add_free(t, 1.0);
    row_eq.push_back(prob.add_equality(form, f.coeff(L.row_basis[r])));
  }
  prob.objective().add_free(t, 1.0);
  prob.sense = conic::Sense::maximize;
  conic::ConicSolution sol = conic::solve(prob, cfg);
  ForwardResult res;
  res.status = sol.status;
  if (!usable(sol.status)) return res;
  res.lower_bound = sol.objective_value;
  // Moments from the multipliers, normalized so that z_0 = 1.
  double z0 = sol.dual(row_eq[0]);
  if (std::abs(z0) < 1e-12) return res;
  MonomialBasis b1(n, 1);
  Eigen::VectorXd w(b1.size());
  Eigen::MatrixXd M1(b1.size(), b1.size());
  for (int r = 0; r < b1.size(); ++r) {
    w(r) = sol.dual(row_eq[static_cast<size_t>(L.row_basis.index_of(b1[r]))]) / z0;
    for (int c = 0; c < b1.size(); ++c)
      M1(r, c) = sol.dual(row_eq[static_cast<size_t>(L.row_basis.index_of(b1[r] + b1[c]))]) / z0;
  }
  res.rank_one_residual = (M1 - w * w.transpose()).norm();
  if (res.rank_one_residual <= 1e-4) res.minimizer = Point(w.tail(n));
  return res;
}

SweepResult hierarchy_sweep(const InverseProblem& p, int d_first, int d_last, const conic::SolverConfig& cfg) {
  SweepResult out;
  std::optional<double> prev;
  for (int d = d_first; d <= d_last; ++d) {
    SweepEntry e;
    e.d = d;
    try {
      InverseProblem q = p;
      q.d = d;
      InverseSolution s = solve_inverse(q, cfg, false);
      e.status = s.status;
      e.rho = s.rho;
      e.z0 = s.z0;
      if (s.status == InverseStatus::optimal || s.status == InverseStatus::inaccurate) {
        if (prev && e.rho > *prev + 1e-6) out.monotone = false;
        prev = e.rho;
      }
    } catch (const std::exception& ex) {
      e.status = InverseStatus::failed;
      e.error = ex.what();
    }
    out.entries.push_back(e);
  }
  return out;
}

InverseProblem box_scaled(const InverseProblem& p, const Box& box) {
  const int n = p.num_vars();
  if (static_cast<int>(box.lower.size()) != n || static_cast<int>(box.upper.size()) != n)
    throw std::invalid_argument("box_scaled: box has wrong dimension");
  Point scale(n), offset(n);
  for (int i = 0; i < n; ++i) {
    double lo = box.lower[static_cast<size_t>(i)], hi = box.upper[static_cast<size_t>(i)];
    if (!(hi > lo)) throw std::invalid_argument("box_scaled: empty box");
    scale(i) = 0.5 * (hi - lo);
    offset(i) = 0.5 * (hi + lo);
  }
  InverseProblem q = p;
  q.f = compose_affine(p.f, scale, offset);
  q.K = p.K.composed(scale, offset);
  q.y = (p.y - offset).cwiseQuotient(scale);
  q.box = Box{std::vector<double>(static_cast<size_t>(n), -1.0), std::vector<double>(static_cast<size_t>(n), 1.0)};
  return q;
}

}  // namespace invpop
