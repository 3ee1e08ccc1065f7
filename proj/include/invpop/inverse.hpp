#pragma once

// Inverse polynomial optimization: the nearest objective f~ (coefficient
// distance) for which a given feasible y has a degree-d Putinar certificate
// of global (epsilon-)optimality.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "invpop/basis.hpp"
#include "invpop/certify.hpp"
#include "invpop/conic.hpp"
#include "invpop/polyalg.hpp"

namespace invpop {

/// Coordinates in which the coefficient distance is measured. The
/// certificate is always built around y.
enum class Frame { original, centered };

const char* to_string(Frame f);

struct InverseProblem {
  Polynomiald f;
  FeasibleSet K;
  Point y;
  int d = 1;
  Norm norm = Norm::l1;
  double epsilon = 0.0;
  /// Pinned coefficients f~_a = f_a (the zero index is always pinned).
  std::set<MultiIndex> structural;
  /// Asserts K within [-1,1]^n in the norm frame and adds 1 - x_i^2 >= 0.
  bool assume_box = false;
  bool require_convex = false;
  /// Degree of f~; negative means deg f.
  int target_degree = -1;
  Frame frame = Frame::original;
  /// Optional variable bounds known to contain K (gap bounds, oracles).
  std::optional<Box> box;
  /// Largest basis size accepted for the doubled-variable convexity blocks.
  long long convexity_cap = 300;

  int num_vars() const { return f.num_vars(); }
  int d0() const { return target_degree >= 0 ? target_degree : f.degree(); }
  /// Throws std::invalid_argument on inconsistent data or an infeasible y.
  void validate(double tol = 1e-8) const;
  /// K plus the box constraints, in original coordinates.
  FeasibleSet certificate_set() const;
  /// Objective expressed in the norm frame.
  Polynomiald f_norm_frame() const;
};

enum class InverseStatus { optimal, inaccurate, infeasible, failed };

const char* to_string(InverseStatus s);

struct InverseSolution {
  InverseStatus status = InverseStatus::failed;
  conic::Status solver_status = conic::Status::numerical_trouble;
  int d = 0;
  Norm norm = Norm::l1;
  Frame frame = Frame::original;
  double epsilon = 0.0;
  Polynomiald f_tilde;
  /// Primal objective of the SDP.
  double rho = 0.0;
  /// ||f~ - f||_k recomputed from the coefficients (norm frame).
  double rho_recomputed = 0.0;
  /// Optimal value of the separately solved dual program (NaN if skipped).
  double dual_objective = 0.0;
  bool dual_solved = false;
  /// Certificate of f~ - f~(y) + epsilon on certificate_set, original coordinates.
  PutinarCertificate certificate;
  CertificateReport report;
  FeasibleSet certificate_set;
  /// Moment vector z read from the coefficient-matching multipliers
  /// (coordinates centered at y).
  MomentVectord dual_moments;
  double z0 = 0.0;
  std::vector<std::string> notes;
};

/// Variable map of a primal program.
struct PrimalLayout {
  std::vector<MultiIndex> free_monomials;  // decision coefficients (norm frame)
  std::vector<int> free_var;               // conic free index per monomial
  std::vector<MultiIndex> pinned_monomials;
  CertificateLayout certificate;
  std::vector<int> row_equality;  // per certificate row
  FeasibleSet centered_set;
  /// Convexity blocks, if requested.
  std::optional<CertificateLayout> convexity;
};

/// T(a, beta): coefficient of u^beta in the norm-frame monomial x^a written
/// around y.
std::map<MultiIndex, std::vector<std::pair<MultiIndex, double>>> transfer_map(
    const InverseProblem& p, const std::vector<MultiIndex>& monomials);

conic::ConicProblem build_primal(const InverseProblem& p, PrimalLayout* layout = nullptr);
conic::ConicProblem build_dual(const InverseProblem& p);

InverseSolution solve_inverse(const InverseProblem& p, const conic::SolverConfig& cfg = {},
                              bool cross_check_dual = true);

/// solve_inverse with at least one pinned coefficient besides the constant.
InverseSolution solve_structural(const InverseProblem& p, const conic::SolverConfig& cfg = {});

struct CanonicalSolution {
  Eigen::VectorXd b;
  Eigen::VectorXd lambda;
  Eigen::VectorXd theta;
  std::vector<int> active_set;  // indices into K's inequalities (1-based j)
  std::vector<int> active_equalities;
  double cone_residual = 0.0;
  /// rho of the unrestricted program on the same instance (NaN if not run).
  double full_rho = 0.0;
  bool cross_checked = false;
};

/// Sparse l1 program on f + b'(x - y) + sum lambda_i (x_i - y_i)^2 with box
/// constraints around y. Distance is measured in the centered frame.
std::pair<InverseSolution, CanonicalSolution> solve_canonical_l1(const InverseProblem& p,
                                                                 const conic::SolverConfig& cfg = {},
                                                                 bool cross_check = true);

/// K = {0,1}^n (x_i^2 - x_i = 0) or {-1,1}^n (x_i^2 - 1 = 0): f~ = f + b'(x - y).
std::pair<InverseSolution, CanonicalSolution> solve_zero_one(const InverseProblem& p,
                                                             const conic::SolverConfig& cfg = {});

struct QuadraticModel {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double c = 0.0;
  Polynomiald polynomial() const;
};

/// Splits the quadratic part of p (around y) into (A, b, c) with
/// p(y + u) = c + b'u + u'Au/2 + higher terms.
QuadraticModel quadratic_model(const Polynomiald& p, const Point& y);

struct ConvexQuadraticResult {
  InverseSolution solution;
  QuadraticModel model;     // f~ around y
  QuadraticModel original;  // f around y (degree <= 2 part)
  Eigen::VectorXd multipliers;  // lambda_j over the active set
  std::vector<int> active_set;
  double rho_linear = 0.0;
  double rho_quadratic = 0.0;
  /// Gradient of f~ - sum lambda_j g_j at y.
  Eigen::VectorXd lagrangian_gradient;
  Eigen::MatrixXd lagrangian_hessian;
};

/// Two-step method for concave K and a convex quadratic f~.
ConvexQuadraticResult solve_convex_quadratic(const InverseProblem& p, const conic::SolverConfig& cfg = {});

/// Doubled-variable set {(x, u): x in K, 1 - |u|^2 = 0} in 2n variables.
FeasibleSet doubled_set(const FeasibleSet& K);

/// u' Hess(p)(x) u as a polynomial in (x, u).
Polynomiald hessian_form(const Polynomiald& p);

/// Searches a degree-d certificate that p is convex on K.
MembershipResult convexity_certificate(const Polynomiald& p, const FeasibleSet& K, int d,
                                       const conic::SolverConfig& cfg = {});

struct GapBound {
  bool available = false;
  double lower = 0.0;
  double upper = 0.0;
  double factor = 0.0;
  std::string source;
  std::string note;
};

/// Interval [f(y) - eps - rho * factor, f(y)] certified to contain f*.
/// Throws if no bound source (box, assume_box or hint) is available.
GapBound optimality_gap_bound(const InverseSolution& sol, const InverseProblem& p,
                              const std::optional<Point>& xstar_hint = std::nullopt);

struct ForwardResult {
  conic::Status status = conic::Status::numerical_trouble;
  double lower_bound = 0.0;
  std::optional<Point> minimizer;
  double rank_one_residual = 0.0;
};

ForwardResult forward_solve(const Polynomiald& f, const FeasibleSet& K, int d,
                            const conic::SolverConfig& cfg = {});

struct SweepEntry {
  int d = 0;
  double rho = 0.0;
  InverseStatus status = InverseStatus::failed;
  double z0 = 0.0;
  std::string error;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  bool monotone = true;
};

SweepResult hierarchy_sweep(const InverseProblem& p, int d_first, int d_last,
                            const conic::SolverConfig& cfg = {});

/// min ||A x - b||_2 over x >= 0 (Lawson-Hanson).
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter = 500);

/// Problem in variables u with x = scale .* u + offset mapping [-1,1]^n onto the box.
InverseProblem box_scaled(const InverseProblem& p, const Box& box);

}  // namespace invpop
