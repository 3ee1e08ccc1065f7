#include "invpop/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace invpop {

namespace {

int half(int deg) { return (deg + 1) / 2; }

double round_digits(double v, int digits) {
  if (digits >= 17 || !std::isfinite(v)) return v;
  return std::stod(format_number(v, digits));
}

}  // namespace

void FeasibleSet::add_inequality(Polynomiald g) {
  if (g.num_vars() != n_) throw std::invalid_argument("FeasibleSet: inequality has wrong variable count");
  ineq_.push_back(std::move(g));
}

void FeasibleSet::add_equality(Polynomiald h) {
  if (h.num_vars() != n_) throw std::invalid_argument("FeasibleSet: equality has wrong variable count");
  eq_.push_back(std::move(h));
}

int FeasibleSet::half_degree(int j) const {
  if (j == 0) return 0;
  return half(ineq_.at(static_cast<size_t>(j - 1)).degree());
}

int FeasibleSet::equality_half_degree(int i) const { return half(eq_.at(static_cast<size_t>(i)).degree()); }

int FeasibleSet::max_half_degree() const {
  int v = 0;
  for (const auto& g : ineq_) v = std::max(v, half(g.degree()));
  for (const auto& h : eq_) v = std::max(v, half(h.degree()));
  return v;
}

Polynomiald FeasibleSet::generator(int j) const {
  if (j == 0) return Polynomiald::constant(n_, 1.0);
  return ineq_.at(static_cast<size_t>(j - 1));
}

double FeasibleSet::violation(const Point& x) const {
  double v = 0.0;
  for (const auto& g : ineq_) v = std::max(v, -g(x));
  for (const auto& h : eq_) v = std::max(v, std::abs(h(x)));
  return v;
}

FeasibleSet FeasibleSet::shifted(const Point& y) const {
  return composed(Point::Ones(n_), y);
}

FeasibleSet FeasibleSet::centered_at(const Point& y, double tol) const {
  FeasibleSet K = shifted(y);
  auto snap = [&](Polynomiald& g) {
    const MultiIndex zero(n_);
    if (std::abs(g.coeff(zero)) <= tol * (1.0 + coeff_norm(g, Norm::linf, false))) g.set_coeff(zero, 0.0);
  };
  for (auto& g : K.ineq_) snap(g);
  for (auto& h : K.eq_) snap(h);
  return K;
}

FeasibleSet FeasibleSet::composed(const Point& scale, const Point& offset) const {
  FeasibleSet K(n_);
  for (const auto& g : ineq_) K.add_inequality(compose_affine(g, scale, offset));
  for (const auto& h : eq_) K.add_equality(compose_affine(h, scale, offset));
  return K;
}

Polynomiald reconstruct(const PutinarCertificate& cert, const FeasibleSet& K) {
  const int n = K.num_vars();
  Polynomiald r(n);
  for (const auto& [j, G] : cert.sos) {
    if (j < 0 || j > K.num_inequalities())
      throw std::invalid_argument("reconstruct: SOS index out of range");
    int deg = cert.d - K.half_degree(j);
    if (deg < 0) throw std::invalid_argument("reconstruct: degree bound below constraint half-degree");
    MonomialBasis b(n, deg);
    if (G.rows() != b.size() || G.cols() != b.size())
      throw std::invalid_argument("reconstruct: Gram size does not match basis of degree " +
                                  std::to_string(deg));
    r += gram_polynomial<double>(b, G) * K.generator(j);
  }
  for (const auto& [i, phi] : cert.free) {
    if (i < 0 || i >= static_cast<int>(K.equalities().size()))
      throw std::invalid_argument("reconstruct: equality index out of range");
    r += phi * K.equalities()[static_cast<size_t>(i)];
  }
  return r;
}

CertificateReport verify(const Polynomiald& target, const PutinarCertificate& cert,
                         const FeasibleSet& K, double tol, double eig_floor) {
  CertificateReport rep;
  rep.residual_poly = target - reconstruct(cert, K);
  rep.residual_norm = coeff_norm(rep.residual_poly, Norm::linf, false);
  rep.min_gram_eig = std::numeric_limits<double>::infinity();
  for (const auto& [j, G] : cert.sos) {
    if (G.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()), Eigen::EigenvaluesOnly);
    rep.min_gram_eig = std::min(rep.min_gram_eig, es.eigenvalues()(0));
  }
  if (!std::isfinite(rep.min_gram_eig)) rep.min_gram_eig = 0.0;
  rep.pass = rep.residual_norm <= tol && rep.min_gram_eig >= eig_floor;
  return rep;
}

CertificateLayout add_certificate(conic::ConicProblem& prob, const FeasibleSet& K, int d,
                                  const std::vector<int>& reduced) {
  const int n = K.num_vars();
  if (d < K.max_half_degree())
    throw std::invalid_argument("certificate degree bound " + std::to_string(d) +
                                " is below the constraint half-degree " + std::to_string(K.max_half_degree()));
  CertificateLayout L;
  L.d = d;
  L.row_basis = MonomialBasis(n, 2 * d);
  L.rows.assign(static_cast<size_t>(L.row_basis.size()), conic::LinearForm());
  for (int j = 0; j <= K.num_inequalities(); ++j) {
    int deg = d - K.half_degree(j);
    auto map = localizing_structure(K.generator(j), deg);
    int skip = std::find(reduced.begin(), reduced.end(), j) != reduced.end() ? 1 : 0;
    int size = map.dim() - skip;
    int block = size > 0 ? prob.add_psd_block(size) : -1;
    L.sos_index.push_back(j);
    L.gram_block.push_back(block);
    L.gram_basis.push_back(map.basis());
    L.gram_skip.push_back(skip);
    if (block < 0) continue;
    for (const auto& [alpha, entries] : map.blocks()) {
      int row = L.row_basis.index_of(alpha);
      if (row < 0) throw std::logic_error("add_certificate: localizing support exceeds 2d");
      for (const auto& e : entries) {
        if (e.row < skip || e.col < skip) continue;
        L.rows[static_cast<size_t>(row)].add_psd(block, e.row - skip, e.col - skip, e.value);
      }
    }
  }
  for (size_t i = 0; i < K.equalities().size(); ++i) {
    const Polynomiald& h = K.equalities()[i];
    MonomialBasis fb(n, 2 * (d - K.equality_half_degree(static_cast<int>(i))));
    int off = prob.add_free(fb.size());
    L.free_index.push_back(static_cast<int>(i));
    L.free_offset.push_back(off);
    L.free_basis.push_back(fb);
    for (int k = 0; k < fb.size(); ++k)
      for (const auto& [delta, hc] : h.terms()) {
        int row = L.row_basis.index_of(fb[k] + delta);
        if (row < 0) throw std::logic_error("add_certificate: multiplier support exceeds 2d");
        L.rows[static_cast<size_t>(row)].add_free(off + k, hc);
      }
  }
  return L;
}

std::vector<int> vanishing_constant_blocks(const FeasibleSet& K, double tol) {
  std::vector<int> out{0};
  const Point origin = Point::Zero(K.num_vars());
  for (int j = 1; j <= K.num_inequalities(); ++j)
    if (K.generator(j)(origin) > tol) out.push_back(j);
  return out;
}

PutinarCertificate extract_certificate(const CertificateLayout& layout, const conic::ConicSolution& sol,
                                       int n, bool project, double eig_floor) {
  PutinarCertificate cert;
  cert.n = n;
  cert.d = layout.d;
  for (size_t k = 0; k < layout.gram_block.size(); ++k) {
    const int full = layout.gram_basis[k].size();
    const int skip = layout.gram_skip.empty() ? 0 : layout.gram_skip[k];
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(full, full);
    if (layout.gram_block[k] >= 0) {
      const Eigen::MatrixXd& B = sol.psd.at(static_cast<size_t>(layout.gram_block[k]));
      G.bottomRightCorner(full - skip, full - skip) = 0.5 * (B + B.transpose());
    }
    if (project && G.size() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
      if (es.eigenvalues()(0) >= eig_floor && es.eigenvalues()(0) < 0) {
        Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        G = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
      }
    }
    cert.sos.emplace_back(layout.sos_index[k], G);
  }
  for (size_t k = 0; k < layout.free_offset.size(); ++k) {
    Polynomiald phi(n);
    const MonomialBasis& fb = layout.free_basis[k];
    for (int t = 0; t < fb.size(); ++t) phi.add_term(fb[t], sol.free(layout.free_offset[k] + t));
    cert.free.emplace_back(layout.free_index[k], phi);
  }
  return cert;
}

const char* to_string(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::feasible: return "feasible";
    case MembershipStatus::infeasible: return "infeasible";
    case MembershipStatus::unknown: return "unknown";
  }
  return "?";
}

MembershipResult membership(const Polynomiald& p, const FeasibleSet& K, int d,
                            const conic::SolverConfig& cfg) {
  if (p.num_vars() != K.num_vars()) throw std::invalid_argument("membership: variable count mismatch");
  MembershipResult res;
  if (p.degree() > 2 * d) {
    res.status = MembershipStatus::infeasible;
    res.solver_status = conic::Status::infeasible;
    return res;
  }
  conic::ConicProblem prob;
  CertificateLayout L = add_certificate(prob, K, d);
  for (int r = 0; r < L.row_basis.size(); ++r)
    prob.add_equality(L.rows[static_cast<size_t>(r)], p.coeff(L.row_basis[r]));
  // Minimal trace keeps the dual strictly feasible.
  for (size_t k = 0; k < L.gram_block.size(); ++k)
    for (int i = 0; i < L.gram_basis[k].size(); ++i) prob.objective().add_psd(L.gram_block[k], i, i, 1.0);
  conic::ConicSolution sol = conic::solve(prob, cfg);
  res.solver_status = sol.status;
  if (sol.status == conic::Status::infeasible) {
    res.status = MembershipStatus::infeasible;
    return res;
  }
  if (sol.status != conic::Status::optimal && sol.status != conic::Status::numerical_trouble &&
      sol.status != conic::Status::max_iter)
    return res;
  res.certificate = extract_certificate(L, sol, K.num_vars(), true, cfg.psd_eig_floor);
  res.report = verify(p, res.certificate, K, 1e-6, cfg.psd_eig_floor);
  res.status = res.report.pass ? MembershipStatus::feasible : MembershipStatus::unknown;
  return res;
}

std::vector<std::pair<double, Polynomiald>> sos_factorization(const MonomialBasis& basis,
                                                              const Eigen::MatrixXd& G, double drop) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
  std::vector<std::pair<double, Polynomiald>> out;
  for (int k = es.eigenvalues().size() - 1; k >= 0; --k) {
    double lam = es.eigenvalues()(k);
    if (lam < drop) continue;
    Polynomiald q(basis.num_vars());
    for (int i = 0; i < basis.size(); ++i) q.add_term(basis[i], es.eigenvectors()(i, k));
    out.emplace_back(lam, q);
  }
  return out;
}

Eigen::MatrixXd basis_shift_matrix(const MonomialBasis& basis, const Point& t) {
  const int s = basis.size();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(s, s);
  for (int r = 0; r < s; ++r) {
    Polynomiald q = shift(Polynomiald::monomial(basis[r]), t);
    for (const auto& [a, c] : q.terms()) T(r, basis.index_of(a)) = c;
  }
  return T;
}

PutinarCertificate uncenter(const PutinarCertificate& cert, const Point& y) {
  PutinarCertificate out;
  out.n = cert.n;
  out.d = cert.d;
  Point minus_y = -y;
  for (const auto& [j, G] : cert.sos) {
    int deg = 0;
    // Gram size determines the basis degree.
    while (basis_size(cert.n, deg) < G.rows()) ++deg;
    MonomialBasis b(cert.n, deg);
    Eigen::MatrixXd L = basis_shift_matrix(b, minus_y);
    out.sos.emplace_back(j, L.transpose() * G * L);
  }
  for (const auto& [i, phi] : cert.free) out.free.emplace_back(i, shift(phi, minus_y));
  return out;
}

nlohmann::json terms_json(const Polynomiald& p, const std::vector<std::string>& names, int digits) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [a, c] : p.terms())
    arr.push_back({{"monomial", monomial_string(a, names)},
                   {"exponent", a.exponents()},
                   {"coeff", round_digits(c, digits)}});
  return arr;
}

nlohmann::json to_json(const PutinarCertificate& cert) {
  nlohmann::json j;
  j["n"] = cert.n;
  j["d"] = cert.d;
  j["sos"] = nlohmann::json::array();
  for (const auto& [idx, G] : cert.sos) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < G.rows(); ++r) {
      std::vector<double> row(static_cast<size_t>(G.cols()));
      for (int c = 0; c < G.cols(); ++c) row[static_cast<size_t>(c)] = G(r, c);
      rows.push_back(row);
    }
    j["sos"].push_back({{"constraint", idx}, {"gram", rows}});
  }
  j["free"] = nlohmann::json::array();
  for (const auto& [idx, phi] : cert.free)
    j["free"].push_back({{"equality", idx}, {"terms", terms_json(phi, default_var_names(cert.n))}});
  return j;
}

PutinarCertificate certificate_from_json(const nlohmann::json& j) {
  PutinarCertificate cert;
  cert.n = j.at("n").get<int>();
  cert.d = j.at("d").get<int>();
  for (const auto& s : j.at("sos")) {
    const auto& rows = s.at("gram");
    const int m = static_cast<int>(rows.size());
    Eigen::MatrixXd G(m, m);
    for (int r = 0; r < m; ++r) {
      if (static_cast<int>(rows[static_cast<size_t>(r)].size()) != m)
        throw std::invalid_argument("certificate_from_json: Gram matrix is not square");
      for (int c = 0; c < m; ++c) G(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
    }
    cert.sos.emplace_back(s.at("constraint").get<int>(), G);
  }
  for (const auto& f : j.at("free")) {
    Polynomiald phi(cert.n);
    for (const auto& t : f.at("terms"))
      phi.add_term(MultiIndex(t.at("exponent").get<std::vector<int>>()), t.at("coeff").get<double>());
    cert.free.emplace_back(f.at("equality").get<int>(), phi);
  }
  return cert;
}

}  // namespace invpop
