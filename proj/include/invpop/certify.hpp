#pragma once

// Putinar certificates: p = sum_j sigma_j g_j + sum_i phi_i h_i with
// sigma_j = v^T G_j v SOS (g_0 = 1) and free multipliers phi_i on equalities.

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "invpop/basis.hpp"
#include "invpop/conic.hpp"
#include "invpop/polyalg.hpp"
#include "json.hpp"

namespace invpop {

/// Per-variable bounds lower[i] <= x_i <= upper[i].
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

class FeasibleSet {
 public:
  FeasibleSet() = default;
  explicit FeasibleSet(int n) : n_(n) {}

  int num_vars() const { return n_; }
  /// g_j(x) >= 0.
  void add_inequality(Polynomiald g);
  /// h_i(x) = 0.
  void add_equality(Polynomiald h);

  const std::vector<Polynomiald>& inequalities() const { return ineq_; }
  const std::vector<Polynomiald>& equalities() const { return eq_; }
  int num_inequalities() const { return static_cast<int>(ineq_.size()); }

  /// v_j = ceil(deg g_j / 2) for j = 0..m, with g_0 = 1 at j = 0.
  int half_degree(int j) const;
  int equality_half_degree(int i) const;
  /// max over all constraints (inequalities and equalities).
  int max_half_degree() const;

  /// g_j for j = 0..m (g_0 = 1).
  Polynomiald generator(int j) const;

  /// Largest constraint violation at x (0 when feasible).
  double violation(const Point& x) const;
  bool contains(const Point& x, double tol = 1e-8) const { return violation(x) <= tol; }

  /// K' = {u : u + y in K}.
  FeasibleSet shifted(const Point& y) const;
  /// shifted(y) with constraint values at the origin below tol set to
  /// exactly zero, so active constraints vanish at 0.
  FeasibleSet centered_at(const Point& y, double tol = 1e-10) const;
  /// K' = {u : scale .* u + offset in K}.
  FeasibleSet composed(const Point& scale, const Point& offset) const;

 private:
  int n_ = 0;
  std::vector<Polynomiald> ineq_;
  std::vector<Polynomiald> eq_;
};

struct PutinarCertificate {
  int n = 0;
  int d = 0;
  /// (j, Gram over MonomialBasis(n, d - v_j)); j = 0 is the plain SOS term.
  std::vector<std::pair<int, Eigen::MatrixXd>> sos;
  /// (i, multiplier of equality i).
  std::vector<std::pair<int, Polynomiald>> free;
};

struct CertificateReport {
  Polynomiald residual_poly;
  double residual_norm = 0.0;
  double min_gram_eig = 0.0;
  bool pass = false;
};

Polynomiald reconstruct(const PutinarCertificate& cert, const FeasibleSet& K);

CertificateReport verify(const Polynomiald& target, const PutinarCertificate& cert,
                         const FeasibleSet& K, double tol = 1e-6, double eig_floor = -1e-8);

/// Conic variables reserved for a degree-d certificate inside a larger
/// program. rows[k] is the linear form giving the x^{row_basis[k]}
/// coefficient of sum_j sigma_j g_j + sum_i phi_i h_i.
struct CertificateLayout {
  int d = 0;
  std::vector<int> sos_index;  // j for each Gram block below
  std::vector<int> gram_block;  // -1 when the reduced block is empty
  std::vector<MonomialBasis> gram_basis;
  /// 1 when the constant monomial was removed from the Gram basis.
  std::vector<int> gram_skip;
  std::vector<int> free_index;  // i for each free multiplier below
  std::vector<int> free_offset;
  std::vector<MonomialBasis> free_basis;
  MonomialBasis row_basis;
  std::vector<conic::LinearForm> rows;
};

/// Declares Gram blocks and multiplier coefficients in prob. Throws if d is
/// below some constraint's half-degree. Blocks listed in `reduced` omit the
/// constant monomial (their Gram matrix has a zero first row and column).
CertificateLayout add_certificate(conic::ConicProblem& prob, const FeasibleSet& K, int d,
                                  const std::vector<int>& reduced = {});

/// For a certificate of p with p(0) = 0 on a set containing 0: the sigma_j
/// whose constant Gram entry is forced to zero (j = 0 and every j with
/// g_j(0) > tol).
std::vector<int> vanishing_constant_blocks(const FeasibleSet& K, double tol = 1e-9);

/// Reads the certificate back. With project, Gram matrices whose smallest
/// eigenvalue is at least eig_floor are clipped to the PSD cone.
PutinarCertificate extract_certificate(const CertificateLayout& layout, const conic::ConicSolution& sol,
                                       int n, bool project = true, double eig_floor = -1e-8);

enum class MembershipStatus { feasible, infeasible, unknown };

const char* to_string(MembershipStatus s);

struct MembershipResult {
  MembershipStatus status = MembershipStatus::unknown;
  PutinarCertificate certificate;
  CertificateReport report;
  conic::Status solver_status = conic::Status::numerical_trouble;
};

/// Searches a degree-d certificate for p on K.
MembershipResult membership(const Polynomiald& p, const FeasibleSet& K, int d,
                            const conic::SolverConfig& cfg = {});

/// sigma = sum_k weight_k * q_k^2 from a Gram eigendecomposition.
std::vector<std::pair<double, Polynomiald>> sos_factorization(const MonomialBasis& basis,
                                                              const Eigen::MatrixXd& G,
                                                              double drop = 1e-10);

/// T with (x + t)^beta = sum_gamma T(beta, gamma) x^gamma over a basis.
Eigen::MatrixXd basis_shift_matrix(const MonomialBasis& basis, const Point& t);

/// Given a certificate for p(u + y) on K.shifted(y), returns the certificate
/// for p on K (sigma(x) = sigma'(x - y)).
PutinarCertificate uncenter(const PutinarCertificate& cert, const Point& y);

nlohmann::json to_json(const PutinarCertificate& cert);
PutinarCertificate certificate_from_json(const nlohmann::json& j);
nlohmann::json terms_json(const Polynomiald& p, const std::vector<std::string>& names, int digits = 17);

}  // namespace invpop
