#include "report.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace invpop::cli {

namespace {

constexpr int kDigits = 12;

json terms(const Polynomiald& p, const std::vector<std::string>& vars) { return terms_json(p, vars, kDigits); }

json index_list(const std::vector<int>& v) {
  json a = json::array();
  for (int i : v) a.push_back(i);
  return a;
}

}  // namespace

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v, kDigits));
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
  return a;
}

json options_json(const ProblemFile& pf) {
  const InverseProblem& p = pf.problem;
  json o;
  o["d"] = p.d;
  o["norm"] = to_string(p.norm);
  o["epsilon"] = number(p.epsilon);
  o["assume_box"] = p.assume_box;
  o["convex"] = p.require_convex;
  o["target_degree"] = p.d0();
  o["frame"] = to_string(p.frame);
  json pinned = json::array();
  for (const auto& a : p.structural) pinned.push_back(monomial_string(a, pf.vars));
  o["structural"] = pinned;
  if (p.box) {
    json b = json::array();
    for (size_t i = 0; i < p.box->lower.size(); ++i) b.push_back({number(p.box->lower[i]), number(p.box->upper[i])});
    o["box"] = b;
  } else {
    o["box"] = nullptr;
  }
  o["method"] = pf.method;
  return o;
}

json certificate_summary(const PutinarCertificate& cert, const CertificateReport& rep) {
  json c;
  c["d"] = cert.d;
  c["residual_norm"] = number(rep.residual_norm);
  c["min_gram_eig"] = number(rep.min_gram_eig);
  c["pass"] = rep.pass;
  json blocks = json::array();
  for (const auto& [j, G] : cert.sos) {
    double eig = 0.0;
    if (G.size() > 0) eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G, Eigen::EigenvaluesOnly).eigenvalues()(0);
    blocks.push_back({{"constraint", j}, {"size", G.rows()}, {"min_eig", number(eig)}});
  }
  c["blocks"] = blocks;
  json free = json::array();
  for (const auto& [i, phi] : cert.free)
    free.push_back({{"equality", i}, {"degree", phi.is_zero() ? 0 : phi.degree()}, {"terms", static_cast<int>(phi.num_terms())}});
  c["free"] = free;
  return c;
}

json solution_json(const InverseSolution& s, const ProblemFile& pf) {
  json j;
  j["status"] = to_string(s.status);
  j["solver_status"] = conic::to_string(s.solver_status);
  j["d"] = s.d;
  j["rho"] = number(s.rho);
  j["rho_recomputed"] = number(s.rho_recomputed);
  j["dual_objective"] = s.dual_solved ? number(s.dual_objective) : json(nullptr);
  j["z0"] = number(s.z0);
  j["f"] = terms(pf.problem.f, pf.vars);
  j["f_tilde"] = terms(s.f_tilde, pf.vars);
  j["f_tilde_text"] = to_string(s.f_tilde, pf.vars, kDigits);
  j["certificate"] = certificate_summary(s.certificate, s.report);
  j["notes"] = s.notes;
  return j;
}

json gap_json(const GapBound& g) {
  json j;
  j["available"] = g.available;
  j["lower"] = g.available ? number(g.lower) : json(nullptr);
  j["upper"] = g.available ? number(g.upper) : json(nullptr);
  j["factor"] = g.available ? number(g.factor) : json(nullptr);
  j["source"] = g.source;
  j["note"] = g.note;
  return j;
}

json canonical_json(const CanonicalSolution& c) {
  json j;
  j["b"] = vector_json(c.b);
  j["lambda"] = vector_json(c.lambda);
  j["theta"] = vector_json(c.theta);
  j["active_set"] = index_list(c.active_set);
  j["active_equalities"] = index_list(c.active_equalities);
  j["cone_residual"] = number(c.cone_residual);
  j["full_rho"] = c.cross_checked ? number(c.full_rho) : json(nullptr);
  return j;
}

json sweep_json(const SweepResult& r) {
  json j;
  json entries = json::array();
  for (const auto& e : r.entries) {
    json x{{"d", e.d}, {"rho", number(e.rho)}, {"status", to_string(e.status)}, {"z0", number(e.z0)}};
    if (!e.error.empty()) x["error"] = e.error;
    entries.push_back(x);
  }
  j["entries"] = entries;
  j["monotone"] = r.monotone;
  return j;
}

json convex_json(const ConvexQuadraticResult& r, const ProblemFile& pf) {
  json j = solution_json(r.solution, pf);
  j["A"] = matrix_json(r.model.A);
  j["b"] = vector_json(r.model.b);
  j["c"] = number(r.model.c);
  j["multipliers"] = vector_json(r.multipliers);
  j["active_set"] = index_list(r.active_set);
  j["rho_linear"] = number(r.rho_linear);
  j["rho_quadratic"] = number(r.rho_quadratic);
  j["lagrangian_gradient"] = vector_json(r.lagrangian_gradient);
  return j;
}

json forward_json(const ForwardResult& r) {
  json j;
  j["solver_status"] = conic::to_string(r.status);
  j["lower_bound"] = number(r.lower_bound);
  j["minimizer"] = r.minimizer ? vector_json(*r.minimizer) : json(nullptr);
  j["rank_one_residual"] = number(r.rank_one_residual);
  return j;
}

json oracle_json(const oracle::OracleResult& r, const std::string& mode) {
  json j;
  j["mode"] = mode;
  j["value"] = number(r.value);
  j["argmin"] = vector_json(r.argmin);
  j["resolution"] = number(r.resolution);
  j["samples"] = r.samples;
  j["feasible"] = r.feasible;
  return j;
}

}  // namespace invpop::cli
