#pragma once

// Block-structured conic programs over free, nonnegative and PSD variables,
// and an embedded primal-dual interior-point solver.
//
// Standard form (internally a minimization):
//
//   min  <c, x>   s.t.  <a_i, x> = b_i,  x = (free, nonneg >= 0, PSD blocks)
//
// with dual  max b'y  s.t.  c - A'y in K*.  Linear functionals on a PSD block
// are Frobenius pairings with a symmetric coefficient matrix; terms are given
// per matrix entry, so coeff * Z(r, c) contributes coeff / 2 to both A(r, c)
// and A(c, r) when r != c.

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace invpop::conic {

struct PsdTerm {
  int block;
  int row;
  int col;
  double coeff;
};

class LinearForm {
 public:
  LinearForm& add_free(int index, double coeff) {
    if (coeff != 0.0) free_.push_back({index, coeff});
    return *this;
  }
  LinearForm& add_nonneg(int index, double coeff) {
    if (coeff != 0.0) nonneg_.push_back({index, coeff});
    return *this;
  }
  /// Adds coeff * Z_block(row, col).
  LinearForm& add_psd(int block, int row, int col, double coeff) {
    if (coeff != 0.0) psd_.push_back({block, row, col, coeff});
    return *this;
  }
  LinearForm& append(const LinearForm& o) {
    free_.insert(free_.end(), o.free_.begin(), o.free_.end());
    nonneg_.insert(nonneg_.end(), o.nonneg_.begin(), o.nonneg_.end());
    psd_.insert(psd_.end(), o.psd_.begin(), o.psd_.end());
    return *this;
  }

  const std::vector<std::pair<int, double>>& free_terms() const { return free_; }
  const std::vector<std::pair<int, double>>& nonneg_terms() const { return nonneg_; }
  const std::vector<PsdTerm>& psd_terms() const { return psd_; }
  bool empty() const { return free_.empty() && nonneg_.empty() && psd_.empty(); }

 private:
  std::vector<std::pair<int, double>> free_;
  std::vector<std::pair<int, double>> nonneg_;
  std::vector<PsdTerm> psd_;
};

enum class Sense { minimize, maximize };

struct Equality {
  LinearForm form;
  double rhs = 0.0;
};

class ConicProblem {
 public:
  /// Each returns the index of the first variable (or block) added.
  int add_free(int count = 1);
  int add_nonneg(int count = 1);
  int add_psd_block(int size);
  int add_equality(LinearForm form, double rhs);

  LinearForm& objective() { return objective_; }
  const LinearForm& objective() const { return objective_; }
  double objective_constant = 0.0;
  Sense sense = Sense::minimize;

  int num_free() const { return num_free_; }
  int num_nonneg() const { return num_nonneg_; }
  const std::vector<int>& psd_blocks() const { return psd_blocks_; }
  const std::vector<Equality>& equalities() const { return equalities_; }
  int num_equalities() const { return static_cast<int>(equalities_.size()); }

  /// Throws std::invalid_argument on references to undeclared variables.
  void validate() const;

  /// Self-describing text dump: sizes, then one triplet line per coefficient.
  void dump(std::ostream& os) const;

 private:
  int num_free_ = 0;
  int num_nonneg_ = 0;
  std::vector<int> psd_blocks_;
  std::vector<Equality> equalities_;
  LinearForm objective_;
};

enum class Status { optimal, infeasible, unbounded, max_iter, numerical_trouble };

const char* to_string(Status s);

struct SolverConfig {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  double psd_eig_floor = -1e-8;
  bool verbose = false;
};

struct ConicSolution {
  Status status = Status::numerical_trouble;
  Eigen::VectorXd free;
  Eigen::VectorXd nonneg;
  std::vector<Eigen::MatrixXd> psd;
  /// Multipliers of the equalities, signed so that b'y is the dual objective
  /// in the problem's own sense.
  Eigen::VectorXd dual;
  /// Dual slacks c - A'y for the nonnegative and PSD parts (minimization form).
  Eigen::VectorXd dual_nonneg_slack;
  std::vector<Eigen::MatrixXd> dual_psd_slack;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

ConicSolution solve(const ConicProblem& problem, const SolverConfig& cfg = {});

struct CheckReport {
  double max_equality_residual = 0.0;
  double min_nonneg = 0.0;
  std::vector<double> min_psd_eig;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Recomputes residuals, cone memberships and the duality gap from scratch.
CheckReport check_solution(const ConicProblem& problem, const ConicSolution& sol,
                           const SolverConfig& cfg = {});

/// Value of a linear form at the primal point of a solution.
double evaluate(const LinearForm& form, const ConicSolution& sol);

}  // namespace invpop::conic
