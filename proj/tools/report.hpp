#pragma once

// JSON reports written by the command-line tool. Numbers carry 12
// significant digits; NaN and infinities become null.

#include <string>
#include <vector>

#include "invpop/inverse.hpp"
#include "invpop/oracle.hpp"
#include "json.hpp"
#include "problem_file.hpp"

namespace invpop::cli {

using nlohmann::json;

json number(double v);
json vector_json(const Eigen::VectorXd& v);
json matrix_json(const Eigen::MatrixXd& m);

/// Options in effect, echoed into every report.
json options_json(const ProblemFile& pf);

/// Block sizes, per-block minimum eigenvalues, residual and verdict.
json certificate_summary(const PutinarCertificate& cert, const CertificateReport& rep);

json solution_json(const InverseSolution& s, const ProblemFile& pf);
json gap_json(const GapBound& g);
json canonical_json(const CanonicalSolution& c);
json sweep_json(const SweepResult& r);
json convex_json(const ConvexQuadraticResult& r, const ProblemFile& pf);
json forward_json(const ForwardResult& r);
json oracle_json(const oracle::OracleResult& r, const std::string& mode);

}  // namespace invpop::cli
