// Acceptance suite: one PASS/FAIL line per criterion.
//
// Exit status is 0 when every failing criterion is a documented known
// failure whose analysed cause is confirmed at run time; --strict makes any
// FAIL fatal.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "invpop/instances.hpp"
#include "invpop/inverse.hpp"
#include "invpop/oracle.hpp"

using namespace invpop;

namespace {

using P = Polynomiald;

P var(int n, int i) { return P::variable(n, i); }
P cst(int n, double v) { return P::constant(n, v); }

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

Box square(double lo, double hi, int n = 2) {
  return Box{std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

bool solved(const InverseSolution& s) {
  return s.status == InverseStatus::optimal || s.status == InverseStatus::inaccurate;
}

double coeff_gap(const P& a, const P& b) { return coeff_norm(P(a - b), Norm::linf, false); }

std::string num(double v, int digits = 6) { return format_number(v, digits); }

/// Bounding box of the feasible grid points of K in a search box, padded by
/// two grid steps.
Box feasible_hull(const FeasibleSet& K, const Box& search, double step) {
  const int n = K.num_vars();
  Box out{std::vector<double>(n, INFINITY), std::vector<double>(n, -INFINITY)};
  std::vector<long> steps(n), k(n, 0);
  for (int i = 0; i < n; ++i) steps[i] = std::lround((search.upper[i] - search.lower[i]) / step);
  Point x(n);
  for (;;) {
    for (int i = 0; i < n; ++i) x(i) = search.lower[i] + k[i] * step;
    if (K.contains(x, 0.0))
      for (int i = 0; i < n; ++i) {
        out.lower[i] = std::min(out.lower[i], x(i));
        out.upper[i] = std::max(out.upper[i], x(i));
      }
    int i = 0;
    while (i < n && ++k[i] > steps[i]) k[i++] = 0;
    if (i == n) break;
  }
  for (int i = 0; i < n; ++i) {
    out.lower[i] = std::max(search.lower[i], out.lower[i] - 2 * step);
    out.upper[i] = std::min(search.upper[i], out.upper[i] + 2 * step);
  }
  return out;
}

/// Every inverse solution computed by the suite, with the data needed to
/// sample its certified inequality.
struct Emitted {
  std::string name;
  InverseSolution sol;
  Point y;
  std::optional<Box> box;  // empty: enumerate a binary domain
};

struct Suite {
  std::vector<Emitted> emitted;
  std::vector<std::pair<std::string, std::vector<double>>> sweeps;
  /// Membership certificates: name, residual, pass.
  std::vector<std::tuple<std::string, double, bool>> memberships;

  InverseSolution solve(const std::string& name, const InverseProblem& p, std::optional<Box> box) {
    InverseSolution s = solve_inverse(p);
    emitted.push_back({name, s, p.y, std::move(box)});
    return s;
  }

  void keep(const std::string& name, const InverseSolution& s, const InverseProblem& p, std::optional<Box> box) {
    emitted.push_back({name, s, p.y, std::move(box)});
  }

  std::vector<double> sweep(const std::string& name, InverseProblem p, int a, int b, std::optional<Box> box,
                            std::vector<InverseSolution>* out = nullptr) {
    std::vector<double> rho;
    for (int d = a; d <= b; ++d) {
      p.d = d;
      auto s = solve(name + " d=" + std::to_string(d), p, box);
      rho.push_back(s.rho);
      if (out) out->push_back(s);
    }
    sweeps.emplace_back(name, rho);
    return rho;
  }
};

struct Outcome {
  Outcome() = default;
  Outcome(bool p, std::string d, std::string k = {}) : pass(p), detail(std::move(d)), known(std::move(k)) {}
  bool pass = false;
  std::string detail;
  /// Set when the failure matches its documented cause.
  std::string known;
};

Outcome c1(Suite& S) {
  std::vector<InverseSolution> sols;
  auto rho = S.sweep("ex1a", instances::ex1a(), 1, 3, square(0.5, 2), &sols);
  const double want[] = {2, 2, 0};
  bool ok = true;
  for (int k = 0; k < 3; ++k) ok = ok && solved(sols[k]) && std::abs(rho[k] - want[k]) <= 1e-4;
  double fgap = coeff_gap(sols[2].f_tilde, instances::ex1a().f);
  ok = ok && fgap <= 1e-5;
  return {ok, "rho = (" + num(rho[0]) + ", " + num(rho[1]) + ", " + num(rho[2]) + "), |f~ - f| at d=3 = " + num(fgap, 3)};
}

/// sigma0 = 1/5 + 2/5 (x1 - x2)^2, multipliers 4/5, 2/5, 2/5.
PutinarCertificate claimed_rep_b() {
  PutinarCertificate c;
  c.n = 2;
  c.d = 1;
  Eigen::MatrixXd G0 = Eigen::MatrixXd::Zero(3, 3);
  G0(0, 0) = 0.2;
  G0(1, 1) = G0(2, 2) = 0.4;
  G0(1, 2) = G0(2, 1) = -0.4;
  c.sos.emplace_back(0, G0);
  c.sos.emplace_back(1, Eigen::MatrixXd::Constant(1, 1, 0.8));
  c.sos.emplace_back(2, Eigen::MatrixXd::Constant(1, 1, 0.4));
  c.sos.emplace_back(3, Eigen::MatrixXd::Constant(1, 1, 0.4));
  return c;
}

Outcome c2(Suite& S) {
  const FeasibleSet K = instances::ex1b().K;
  const P target = var(2, 0) + var(2, 1) - cst(2, 2);
  auto m = membership(target, K, 1);
  bool member = m.status == MembershipStatus::feasible && m.report.pass && m.report.residual_norm <= 1e-6;
  if (m.status == MembershipStatus::feasible) S.memberships.emplace_back("rep B d=1", m.report.residual_norm, m.report.pass);
  auto claimed = verify(target, claimed_rep_b(), K);
  double c0 = claimed.residual_poly.constant_term();
  P rest = claimed.residual_poly;
  rest.set_coeff(MultiIndex(2), 0.0);
  bool identity = std::abs(std::abs(c0) - 0.6) <= 1e-9 && coeff_norm(rest, Norm::linf, false) <= 1e-9;
  // The same target at d=2, for the record.
  auto m2 = membership(target, K, 2);
  if (m2.status == MembershipStatus::feasible) S.memberships.emplace_back("rep B d=2", m2.report.residual_norm, m2.report.pass);
  Outcome o;
  o.pass = member && identity;
  o.detail = std::string("membership d=1: ") + to_string(m.status) + " (solver " + conic::to_string(m.solver_status) +
             "); claimed identity residual constant = " + num(c0, 9) + (identity ? " (3/5 confirmed)" : " (NOT 3/5)") +
             "; d=2: " + to_string(m2.status) +
             (m2.status == MembershipStatus::feasible ? " res " + num(m2.report.residual_norm, 3) : "");
  // sigma0(1,1) = -(b1 + b2)/2 forces every multiplier to zero at d=1,
  // leaving the linear x1 + x2 - 2 as sigma0: no certificate exists.
  if (!member && identity && m.status == MembershipStatus::infeasible)
    o.known = "no degree-1 certificate exists on rep B (evaluate sigma0 at (1,1)); the claimed identity is off by 3/5";
  return o;
}

Outcome c3(Suite& S) {
  InverseProblem p = instances::ex2();
  auto s = S.solve("ex2 d=2", p, square(0.5, 2));
  double a1 = s.f_tilde.coeff(MultiIndex({1, 0}));
  bool ok = solved(s) && s.rho >= 0.1724 && s.rho <= 0.1744 && a1 >= 0.8256 && a1 <= 0.8276;
  auto fw = forward_solve(s.f_tilde, p.certificate_set(), 2);
  double dist = fw.minimizer ? (*fw.minimizer - pt({1.1, 1 / 1.1})).norm() : INFINITY;
  ok = ok && dist <= 1e-2;
  p.d = 3;
  auto s3 = S.solve("ex2 d=3", p, square(0.5, 2));
  S.sweeps.emplace_back("ex2", std::vector<double>{s.rho, s3.rho});
  double drift = std::abs(s3.rho - s.rho);
  ok = ok && solved(s3) && drift <= 1e-5;
  std::string xm = fw.minimizer ? "(" + num((*fw.minimizer)(0)) + ", " + num((*fw.minimizer)(1)) + ")" : "none";
  return {ok, "rho_2 = " + num(s.rho) + ", x1 coeff = " + num(a1) + ", forward minimizer " + xm +
                  ", |rho_3 - rho_2| = " + num(drift, 3)};
}

Outcome c4(Suite& S) {
  const Box box = square(-1.8, 1.8);
  auto rho = S.sweep("ex3a", instances::ex3a(), 2, 3, box);
  bool ok = true;
  double fmax = 0;
  for (size_t k = 0; k < 2; ++k) {
    const auto& s = S.emitted[S.emitted.size() - 2 + k].sol;
    ok = ok && solved(s) && std::abs(s.rho - 2) <= 1e-4;
    fmax = std::max(fmax, coeff_norm(s.f_tilde, Norm::linf, false));
  }
  ok = ok && fmax <= 1e-5;

  InverseProblem q = instances::ex3b();
  const P reported = var(2, 0) * 1.26 - var(2, 1).pow(2);
  auto m = membership(reported - cst(2, reported(q.y)), q.K, 2);
  S.memberships.emplace_back("ex3b reported f~", m.report.residual_norm, m.report.pass);
  bool reported_ok = m.status == MembershipStatus::feasible && m.report.pass && m.report.residual_norm <= 1e-6;
  auto s = S.solve("ex3b d=2", q, box);
  bool ceiling = solved(s) && s.rho <= 2 + 1e-6;
  double reported_dist = coeff_norm(P(reported - q.f), Norm::l1, false);
  // Recorded expectation: the reported f~ is farther from f than the trivial f~ = 0.
  bool recorded = reported_dist > coeff_norm(q.f, Norm::l1, false);
  ok = ok && reported_ok && ceiling;
  return {ok, "ex3a rho = (" + num(rho[0]) + ", " + num(rho[1]) + "), max|f~| = " + num(fmax, 3) +
                  "; ex3b reported f~ certificate res " + num(m.report.residual_norm, 3) + ", our rho_2 = " +
                  num(s.rho) + " <= 2; reported f~ distance " + num(reported_dist) +
                  (recorded ? " > ||f||_1 = 2 (recorded)" : " (unexpected)")};
}

Outcome c5(Suite& S) {
  InverseProblem p = instances::maxcut5();
  auto s = S.solve("maxcut5", p, std::nullopt);
  auto A = [&](int i, int j) { return s.f_tilde.coeff(MultiIndex::unit(5, i) + MultiIndex::unit(5, j)) / 2; };
  bool ok = solved(s);
  double worst = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      double want = (j <= 2) ? 1.0 / 3 : 0.5;
      worst = std::max(worst, std::abs(A(i, j) - want));
    }
  ok = ok && worst <= 1e-3;
  return {ok, "A~12 = " + num(A(0, 1)) + ", A~13 = " + num(A(0, 2)) + ", A~23 = " + num(A(1, 2)) +
                  ", max deviation " + num(worst, 3)};
}

Outcome c6(Suite& S) {
  double worst = 0;
  std::string where;
  int count = 0;
  bool ok = true;
  auto check = [&](const std::string& name, const InverseSolution& s) {
    ++count;
    if (!solved(s) || !s.dual_solved) {
      ok = false;
      where += " " + name + "(unsolved)";
      return;
    }
    double rel = std::abs(s.rho - s.dual_objective) / (1 + s.rho);
    if (rel > worst) worst = rel;
    if (rel > 1e-6) {
      ok = false;
      where += " " + name;
    }
  };
  for (const auto& [name, p] : instances::bundled()) {
    std::optional<Box> box;
    if (name.rfind("ex1", 0) == 0 || name == "ex2") box = square(0.5, 2);
    if (name.rfind("ex3", 0) == 0) box = square(-1.8, 1.8);
    check(name, S.solve(name + " (duality)", p, box));
  }
  std::mt19937 rng(11);
  for (int k = 0; k < 20; ++k) {
    InverseProblem p = instances::random_quadratic_set(rng);
    Box hull = feasible_hull(p.K, square(-3.5, 3.5), 0.02);
    check("random " + std::to_string(k), S.solve("random quadratic " + std::to_string(k), p, hull));
  }
  return {ok, std::to_string(count) + " instances, max |rho - dual| / (1 + rho) = " + num(worst, 3) +
                  (where.empty() ? "" : "; violations:" + where)};
}

Outcome c7(Suite& S) {
  bool ok = true;
  std::string detail;
  int n = 0;
  for (const auto& [name, rho] : S.sweeps) {
    ++n;
    for (size_t k = 1; k < rho.size(); ++k)
      if (rho[k] > rho[k - 1] + 1e-6) {
        ok = false;
        detail += " " + name + " d+" + std::to_string(k);
      }
  }
  return {ok, std::to_string(n) + " sweeps" + (detail.empty() ? ", all nonincreasing" : "; increases:" + detail)};
}

Outcome c8(Suite& S) {
  std::mt19937 rng(12);
  bool ok = true;
  double worst_cone = 0, worst_rho = 0, min_lambda = INFINITY;
  int max_nnz = 0;
  std::string bad;
  for (int k = 0; k < 10; ++k) {
    InverseProblem p = instances::random_box(rng);
    auto [s, c] = solve_canonical_l1(p);
    S.keep("canonical " + std::to_string(k), s, p, square(-1, 1));
    P diff = shift(P(s.f_tilde - p.f), p.y).pruned(1e-6);
    int nnz = 0;
    bool support = true;
    for (const auto& [a, v] : diff.terms()) {
      if (a.is_zero()) continue;
      ++nnz;
      int nz = 0;
      for (int i = 0; i < a.size(); ++i) nz += a[i] > 0;
      support = support && (a.degree() == 1 || (a.degree() == 2 && nz == 1));
    }
    max_nnz = std::max(max_nnz, nnz);
    min_lambda = std::min(min_lambda, c.lambda.size() ? c.lambda.minCoeff() : 0.0);
    worst_cone = std::max(worst_cone, c.cone_residual);
    double drho = c.cross_checked ? std::abs(s.rho - c.full_rho) : INFINITY;
    worst_rho = std::max(worst_rho, drho);
    bool one = solved(s) && support && nnz <= 2 * p.num_vars() && min_lambda >= -1e-8 && c.cone_residual <= 1e-6 &&
               drho <= 1e-6;
    if (!one) bad += " " + std::to_string(k);
    ok = ok && one;
  }
  return {ok, "10 instances: max nonzeros " + std::to_string(max_nnz) + ", min lambda " + num(min_lambda, 3) +
                  ", max cone residual " + num(worst_cone, 3) + ", max |rho - full rho| " + num(worst_rho, 3) +
                  (bad.empty() ? "" : "; failing:" + bad)};
}

Outcome c9(Suite& S) {
  InverseProblem p = instances::bool2();
  auto [s, c] = solve_zero_one(p);
  S.keep("bool2 zero-one", s, p, std::nullopt);
  auto o = oracle::enumerate_min(s.f_tilde, p.K, oracle::binary_values(p.K));
  bool ok = solved(s) && std::abs(s.rho - 2) <= 1e-6 && std::abs(c.b(0) + 1) <= 1e-6 && std::abs(c.b(1) + 1) <= 1e-6 &&
            o.samples == 4 && o.value >= s.f_tilde(p.y) - 1e-6;
  std::string detail = "bool2: b = (" + num(c.b(0)) + ", " + num(c.b(1)) + "), rho = " + num(s.rho);
  std::mt19937 rng(13);
  int good = 0;
  for (int k = 0; k < 10; ++k) {
    InverseProblem q = instances::random_zero_one(rng);
    auto [t, ct] = solve_zero_one(q);
    S.keep("zero-one " + std::to_string(k), t, q, std::nullopt);
    auto e = oracle::enumerate_min(t.f_tilde, q.K, oracle::binary_values(q.K));
    bool one = solved(t) && e.samples == 8 && e.value >= t.f_tilde(q.y) - 1e-6;
    for (int i = 0; i < 3; ++i) one = one && (q.y(i) == 0.0 ? ct.b(i) >= -1e-8 : ct.b(i) <= 1e-8);
    good += one;
  }
  ok = ok && good == 10;
  return {ok, detail + "; random: " + std::to_string(good) + "/10 confirmed by 8-point enumeration with sign pattern"};
}

Outcome c10(Suite& S) {
  bool ok = true;
  std::string bad;
  double slack_min = INFINITY;
  auto check = [&](const std::string& name, const InverseProblem& p, const Box& box) {
    auto s = S.solve(name + " (gap)", p, box);
    auto g = optimality_gap_bound(s, p);
    auto o = oracle::grid_min(p.f, p.certificate_set(), box, 0.01);
    double fy = p.f(p.y);
    bool one = solved(s) && g.available && fy - s.rho * g.factor - 1e-4 <= o.value && o.value <= fy + 1e-4;
    slack_min = std::min(slack_min, o.value - (fy - s.rho * g.factor));
    if (!one) bad += " " + name;
    ok = ok && one;
  };
  InverseProblem e2 = instances::ex2();
  e2.box = Box{{0.5, 0.5}, {2, 2}};
  check("ex2", e2, *e2.box);
  std::mt19937 rng(14);
  for (int k = 0; k < 10; ++k) check("box " + std::to_string(k), instances::random_box(rng), square(-1, 1));
  return {ok, "11 instances, min (f* - lower bound) = " + num(slack_min, 4) + (bad.empty() ? "" : "; failing:" + bad)};
}

Outcome c11(Suite& S) {
  InverseProblem p = instances::ex1a();
  p.d = 2;
  std::vector<double> rho;
  bool ok = true;
  for (double e : {0.0, 0.5, 1.0, 2.5}) {
    p.epsilon = e;
    auto s = S.solve("ex1a eps=" + num(e), p, square(0.5, 2));
    ok = ok && solved(s);
    rho.push_back(s.rho);
  }
  for (size_t k = 1; k < rho.size(); ++k) ok = ok && rho[k] <= rho[k - 1] + 1e-6;
  ok = ok && std::abs(rho[0] - 2) <= 1e-4 && rho.back() <= 1e-6;
  // Smallest epsilon with rho = 0, by bisection.
  double lo = 0, hi = 0.5;
  for (int it = 0; it < 12; ++it) {
    p.epsilon = (lo + hi) / 2;
    (solve_inverse(p, {}, false).rho <= 1e-6 ? hi : lo) = p.epsilon;
  }
  return {ok, "rho = (" + num(rho[0]) + ", " + num(rho[1]) + ", " + num(rho[2]) + ", " + num(rho[3]) +
                  "), rho reaches 0 at epsilon ~ " + num(hi, 4)};
}

Outcome c12(Suite& S) {
  int certs = 0, sampled = 0, enumerated = 0;
  double worst_res = 0, worst_min = INFINITY;
  std::string bad;
  for (const auto& e : S.emitted) {
    if (!solved(e.sol)) continue;
    ++certs;
    const auto& s = e.sol;
    bool one = s.report.pass && s.report.residual_norm <= 1e-6;
    worst_res = std::max(worst_res, s.report.residual_norm);
    P t = s.f_tilde - cst(s.f_tilde.num_vars(), s.f_tilde(e.y) - s.epsilon);
    double lowest;
    if (e.box) {
      auto r = oracle::sample_min(t, s.certificate_set, *e.box, 10000);
      lowest = r.feasible > 0 ? r.value : INFINITY;
      ++sampled;
    } else {
      lowest = oracle::enumerate_min(t, s.certificate_set, oracle::binary_values(s.certificate_set)).value;
      ++enumerated;
    }
    worst_min = std::min(worst_min, lowest);
    one = one && lowest >= -1e-4;
    if (!one) bad += " [" + e.name + "]";
  }
  for (const auto& [name, res, pass] : S.memberships) {
    ++certs;
    worst_res = std::max(worst_res, res);
    if (!pass || res > 1e-6) bad += " [" + name + "]";
  }
  return {bad.empty(), std::to_string(certs) + " certificates, max residual " + num(worst_res, 3) +
                           ", min sampled value " + num(worst_min, 3) + " (" + std::to_string(sampled) + " sampled, " +
                           std::to_string(enumerated) + " enumerated)" + (bad.empty() ? "" : "; failing:" + bad)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  bool strict = false;
  app.add_flag("--strict", strict, "nonzero exit on any FAIL, known or not");
  CLI11_PARSE(app, argc, argv);

  Suite S;
  const std::vector<std::pair<int, std::function<Outcome(Suite&)>>> criteria = {
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7}, {8, c8}, {9, c9}, {10, c10}, {11, c11}, {12, c12}};
  int passed = 0, known = 0, unknown = 0;
  for (const auto& [id, run] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run(S);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), ""};
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), sec);
    if (!o.pass && !o.known.empty()) std::printf("              known failure: %s\n", o.known.c_str());
    std::fflush(stdout);
    if (o.pass) ++passed;
    else if (o.known.empty()) ++unknown;
    else ++known;
  }
  std::printf("%d/%zu PASS, %d known FAIL, %d unexpected FAIL\n", passed, criteria.size(), known, unknown);
  if (unknown > 0 || (strict && known > 0)) return 1;
  return 0;
}
