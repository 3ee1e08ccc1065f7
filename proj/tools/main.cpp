// invpop: command-line front end.
//
//   invpop solve    FILE [--norm l1|l2|linf] [-d N] [--epsilon E] ...
//   invpop sweep    FILE -d A..B
//   invpop certify  FILE [--poly EXPR]
//   invpop forward  FILE [--poly EXPR]
//   invpop convexq  FILE
//   invpop oracle   FILE [--step H | --samples N] [--poly EXPR]
//
// JSON goes to stdout, a short summary to stderr.
// Exit codes: 0 ok, 1 infeasible, 2 parse or validation error, 3 solver trouble.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "invpop/oracle.hpp"
#include "problem_file.hpp"
#include "report.hpp"

using namespace invpop;
using namespace invpop::cli;

namespace {

enum Exit { kOk = 0, kInfeasible = 1, kInput = 2, kSolver = 3 };

struct Flags {
  std::string file;
  std::string norm;
  std::string degree;
  std::optional<double> epsilon;
  bool assume_box = false;
  std::string structural;
  bool convex = false;
  bool json_only = false;
  bool canonical = false;
  bool zero_one = false;
  std::string frame;
  std::optional<int> target_degree;
  std::string poly;
  double step = 0.01;
  long long samples = 0;
  unsigned seed = oracle::kDefaultSeed;
  bool dump_certificate = false;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::pair<int, int> degree_range(const std::string& s) {
  auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      int d = std::stoi(s);
      return {d, d};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw InputError("-d expects INT or A..B, got '" + s + "'");
  }
}

void apply_flags(ProblemFile& pf, const Flags& fl, bool range_ok) {
  if (!fl.norm.empty()) apply_option(pf, "norm", fl.norm);
  if (!fl.degree.empty()) {
    auto [a, b] = degree_range(fl.degree);
    if (a != b && !range_ok) throw InputError("a degree range needs the sweep command");
    pf.problem.d = a;
    pf.options["d"] = fl.degree;
  }
  if (fl.epsilon) apply_option(pf, "epsilon", format_number(*fl.epsilon));
  if (fl.assume_box) apply_option(pf, "assume_box", "true");
  if (!fl.structural.empty()) apply_option(pf, "structural", fl.structural);
  if (fl.convex) apply_option(pf, "convex", "true");
  if (!fl.frame.empty()) apply_option(pf, "frame", fl.frame);
  if (fl.target_degree) apply_option(pf, "target_degree", std::to_string(*fl.target_degree));
  if (fl.canonical && fl.zero_one) throw InputError("--canonical and --zero-one are exclusive");
  if (fl.canonical) apply_option(pf, "method", "canonical");
  if (fl.zero_one) apply_option(pf, "method", "zero-one");
}

int status_exit(InverseStatus s) {
  switch (s) {
    case InverseStatus::optimal: return kOk;
    case InverseStatus::infeasible: return kInfeasible;
    default: return kSolver;
  }
}

int solver_exit(conic::Status s) {
  if (s == conic::Status::optimal) return kOk;
  if (s == conic::Status::infeasible) return kInfeasible;
  return kSolver;
}

json base_report(const std::string& command, const ProblemFile& pf) {
  json r;
  r["command"] = command;
  r["variables"] = pf.vars;
  r["point"] = vector_json(pf.problem.y);
  r["options"] = options_json(pf);
  return r;
}

void summary(const Flags& fl, const std::string& line) {
  if (!fl.json_only) std::cerr << line << "\n";
}

std::string fmt(double v) { return format_number(v, 8); }

/// Symmetric A with x'Ax equal to the degree-2 part of p.
Eigen::MatrixXd quadratic_form(const Polynomiald& p) {
  const int n = p.num_vars();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [a, c] : p.terms()) {
    if (a.degree() != 2) continue;
    std::vector<int> at;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < a[i]; ++k) at.push_back(i);
    if (at[0] == at[1]) {
      A(at[0], at[0]) = c;
    } else {
      A(at[0], at[1]) = A(at[1], at[0]) = c / 2;
    }
  }
  return A;
}

int cmd_solve(const Flags& fl, ProblemFile& pf, json& r) {
  const InverseProblem& p = pf.problem;
  InverseSolution sol;
  if (pf.method == "canonical" || pf.method == "zero-one") {
    auto [s, c] = pf.method == "canonical" ? solve_canonical_l1(p) : solve_zero_one(p);
    sol = std::move(s);
    r["canonical"] = canonical_json(c);
  } else {
    sol = solve_inverse(p);
  }
  r.update(solution_json(sol, pf));
  if (sol.status == InverseStatus::optimal || sol.status == InverseStatus::inaccurate) {
    try {
      r["gap_bound"] = gap_json(optimality_gap_bound(sol, p));
    } catch (const std::exception& e) {
      r["gap_bound"] = gap_json(GapBound{false, 0, 0, 0, "", e.what()});
    }
  } else {
    r["gap_bound"] = nullptr;
  }
  if (!p.structural.empty() && sol.f_tilde.degree() <= 2) r["quadratic_form"] = matrix_json(quadratic_form(sol.f_tilde));
  if (fl.dump_certificate) r["certificate_data"] = to_json(sol.certificate);
  summary(fl, std::string("solve: ") + to_string(sol.status) + "  rho = " + fmt(sol.rho) +
                  "  f~ = " + to_string(sol.f_tilde, pf.vars, 8));
  return status_exit(sol.status);
}

int cmd_sweep(const Flags& fl, ProblemFile& pf, json& r) {
  auto [a, b] = fl.degree.empty() ? std::pair{pf.problem.d, std::max(pf.problem.d, 3)} : degree_range(fl.degree);
  if (a > b) throw InputError("empty degree range");
  auto res = hierarchy_sweep(pf.problem, a, b);
  r.update(sweep_json(res));
  json z0 = json::array();
  for (const auto& e : res.entries) z0.push_back(number(e.z0));
  r["z0_trajectory"] = z0;
  int code = kOk;
  std::string line = "sweep:";
  for (const auto& e : res.entries) {
    line += "  d=" + std::to_string(e.d) + " rho=" + fmt(e.rho) + " (" + to_string(e.status) + ")";
    code = std::max(code, status_exit(e.status));
  }
  r["status"] = code == kOk ? "ok" : "incomplete";
  summary(fl, line + (res.monotone ? "" : "  NOT MONOTONE"));
  return code;
}

Polynomiald target_poly(const Flags& fl, const ProblemFile& pf) {
  if (!fl.poly.empty()) return parse_polynomial(fl.poly, pf.vars);
  const InverseProblem& p = pf.problem;
  Polynomiald t = p.f;
  t.add_term(MultiIndex(p.num_vars()), p.epsilon - p.f(p.y));
  return t;
}

int cmd_certify(const Flags& fl, ProblemFile& pf, json& r) {
  Polynomiald t = target_poly(fl, pf);
  auto m = membership(t, pf.problem.certificate_set(), pf.problem.d);
  r["target"] = terms_json(t, pf.vars, 12);
  r["status"] = to_string(m.status);
  r["solver_status"] = conic::to_string(m.solver_status);
  r["certificate"] = m.status == MembershipStatus::feasible ? certificate_summary(m.certificate, m.report) : json(nullptr);
  if (fl.dump_certificate && m.status == MembershipStatus::feasible) r["certificate_data"] = to_json(m.certificate);
  summary(fl, std::string("certify: ") + to_string(m.status) + " at d = " + std::to_string(pf.problem.d) +
                  (m.status == MembershipStatus::feasible ? "  residual = " + fmt(m.report.residual_norm) : ""));
  if (m.status == MembershipStatus::feasible) return kOk;
  return m.status == MembershipStatus::infeasible ? kInfeasible : kSolver;
}

int cmd_forward(const Flags& fl, ProblemFile& pf, json& r) {
  Polynomiald f = fl.poly.empty() ? pf.problem.f : parse_polynomial(fl.poly, pf.vars);
  auto res = forward_solve(f, pf.problem.certificate_set(), pf.problem.d);
  r.update(forward_json(res));
  r["status"] = conic::to_string(res.status);
  std::string line = "forward: lower bound " + fmt(res.lower_bound);
  if (res.minimizer) {
    line += "  minimizer (";
    for (int i = 0; i < res.minimizer->size(); ++i) line += (i ? ", " : "") + fmt((*res.minimizer)(i));
    line += ")";
  }
  summary(fl, line);
  return solver_exit(res.status);
}

int cmd_convexq(const Flags& fl, ProblemFile& pf, json& r) {
  auto res = solve_convex_quadratic(pf.problem);
  r.update(convex_json(res, pf));
  summary(fl, std::string("convexq: ") + to_string(res.solution.status) + "  rho = " + fmt(res.solution.rho) +
                  "  f~ = " + to_string(res.solution.f_tilde, pf.vars, 8));
  return status_exit(res.solution.status);
}

int cmd_oracle(const Flags& fl, ProblemFile& pf, json& r) {
  const InverseProblem& p = pf.problem;
  Polynomiald f = fl.poly.empty() ? p.f : parse_polynomial(fl.poly, pf.vars);
  FeasibleSet K = p.certificate_set();
  auto values = oracle::binary_values(K);
  oracle::OracleResult res;
  std::string mode;
  if (!values.empty() && fl.samples == 0) {
    res = oracle::enumerate_min(f, K, values);
    mode = "enumeration";
  } else {
    Box box;
    if (p.box) box = *p.box;
    else if (p.assume_box) box = Box{std::vector<double>(p.num_vars(), -1.0), std::vector<double>(p.num_vars(), 1.0)};
    else throw InputError("oracle needs 'option box' or assume_box");
    if (fl.samples > 0) {
      auto s = oracle::sample_min(f, K, box, fl.samples, fl.seed);
      res = {s.value, s.argmin, 0.0, s.samples, s.feasible};
      mode = "sampling";
      if (!s.warning.empty()) r["warning"] = s.warning;
      if (s.feasible == 0) {
        r.update(oracle_json(res, mode));
        r["status"] = "infeasible";
        summary(fl, "oracle: no feasible sample");
        return kInfeasible;
      }
    } else {
      try {
        res = oracle::grid_min(f, K, box, fl.step);
      } catch (const std::runtime_error& e) {
        r["mode"] = "grid";
        r["status"] = "infeasible";
        r["error"] = e.what();
        summary(fl, std::string("oracle: ") + e.what());
        return kInfeasible;
      }
      mode = "grid";
    }
  }
  r.update(oracle_json(res, mode));
  r["status"] = "ok";
  std::string line = "oracle (" + mode + "): min " + fmt(res.value) + " at (";
  for (int i = 0; i < res.argmin.size(); ++i) line += (i ? ", " : "") + fmt(res.argmin(i));
  summary(fl, line + ")");
  return kOk;
}

void add_common(CLI::App* sub, Flags& fl) {
  sub->add_option("file", fl.file, "problem file")->required();
  sub->add_option("--norm", fl.norm, "l1, l2 or linf");
  sub->add_option("-d,--degree", fl.degree, "relaxation order, INT or A..B");
  sub->add_option("--epsilon", fl.epsilon, "epsilon-optimality slack");
  sub->add_flag("--assume-box", fl.assume_box, "K lies in [-1,1]^n; add the box constraints");
  sub->add_option("--structural", fl.structural, "quadratic-form, none, or comma-separated monomials to pin");
  sub->add_flag("--convex", fl.convex, "require f~ convex on K");
  sub->add_flag("--json-only", fl.json_only, "no summary on stderr");
  sub->add_option("--frame", fl.frame, "original or centered");
  sub->add_option("--target-degree", fl.target_degree, "degree of f~");
  sub->add_flag("--dump-certificate", fl.dump_certificate, "include Gram matrices and multipliers");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse polynomial optimization"};
  app.require_subcommand(1);
  Flags fl;
  using Handler = int (*)(const Flags&, ProblemFile&, json&);
  std::vector<std::pair<CLI::App*, Handler>> cmds;
  auto* solve = app.add_subcommand("solve", "nearest objective making y certified optimal");
  add_common(solve, fl);
  solve->add_flag("--canonical", fl.canonical, "sparse l1 canonical form");
  solve->add_flag("--zero-one", fl.zero_one, "linear correction on {0,1}^n or {-1,1}^n");
  cmds.emplace_back(solve, cmd_solve);
  auto* sweep = app.add_subcommand("sweep", "solve over a range of relaxation orders");
  add_common(sweep, fl);
  cmds.emplace_back(sweep, cmd_sweep);
  auto* certify = app.add_subcommand("certify", "Putinar certificate for f - f(y) + epsilon or --poly");
  add_common(certify, fl);
  certify->add_option("--poly", fl.poly, "polynomial to certify");
  cmds.emplace_back(certify, cmd_certify);
  auto* forward = app.add_subcommand("forward", "moment relaxation lower bound and minimizer");
  add_common(forward, fl);
  forward->add_option("--poly", fl.poly, "objective instead of the file's");
  cmds.emplace_back(forward, cmd_forward);
  auto* convexq = app.add_subcommand("convexq", "convex quadratic f~ for concave K");
  add_common(convexq, fl);
  cmds.emplace_back(convexq, cmd_convexq);
  auto* orc = app.add_subcommand("oracle", "brute-force minimum over K");
  add_common(orc, fl);
  orc->add_option("--poly", fl.poly, "objective instead of the file's");
  orc->add_option("--step", fl.step, "grid step");
  orc->add_option("--samples", fl.samples, "quasi-random samples instead of a grid");
  orc->add_option("--seed", fl.seed, "sampling seed");
  cmds.emplace_back(orc, cmd_oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInput;
  }

  CLI::App* chosen = app.get_subcommands().front();
  Handler handler = nullptr;
  for (auto& [sub, h] : cmds)
    if (sub == chosen) handler = h;
  const std::string command = chosen->get_name();

  json report;
  int code = kOk;
  auto start = std::chrono::steady_clock::now();
  try {
    ProblemFile pf = read_problem(fl.file);
    apply_flags(pf, fl, command == "sweep");
    pf.problem.validate();
    report = base_report(command, pf);
    report["problem"] = fl.file;
    code = handler(fl, pf, report);
  } catch (const ParseError& e) {
    report = {{"command", command}, {"status", "error"}, {"error", e.what()}};
    code = kInput;
  } catch (const std::invalid_argument& e) {
    report = {{"command", command}, {"status", "error"}, {"error", e.what()}};
    code = kInput;
  } catch (const InputError& e) {
    report = {{"command", command}, {"status", "error"}, {"error", e.what()}};
    code = kInput;
  } catch (const std::exception& e) {
    report = {{"command", command}, {"status", "error"}, {"error", e.what()}};
    code = kSolver;
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  report["timings"] = {{"total_ms", number(ms)}};
  report["exit_code"] = code;
  std::cout << report.dump(2) << "\n";
  if (report.value("status", "") == "error") summary(fl, command + ": error: " + report["error"].get<std::string>());
  return code;
}
