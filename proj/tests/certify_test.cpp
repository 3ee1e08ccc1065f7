#include "invpop/certify.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace invpop {
namespace {

using namespace invpop::testing;

TEST(CertifyTest, ReconstructTrivial) {
  FeasibleSet K(1);
  K.add_inequality(cst(1, 1) - var(1, 0).pow(2));
  PutinarCertificate c;
  c.n = 1;
  c.d = 0;
  c.sos.emplace_back(0, Eigen::MatrixXd::Ones(1, 1));
  EXPECT_EQ(reconstruct(c, K), cst(1, 1));
  PutinarCertificate c2;
  c2.n = 1;
  c2.d = 1;
  c2.sos.emplace_back(1, Eigen::MatrixXd::Ones(1, 1));
  EXPECT_EQ(reconstruct(c2, K), cst(1, 1) - var(1, 0).pow(2));
  auto rep = verify(cst(1, 1) - var(1, 0).pow(2), c2, K);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.residual_norm, 0.0);
}

// The claimed rep-B identity, expanded term by term.
PutinarCertificate claimed_rep_b() {
  PutinarCertificate c;
  c.n = 2;
  c.d = 1;
  // sigma0 = 1/5 + (2/5)(x1 - x2)^2 over basis (1, x1, x2).
  Eigen::MatrixXd G0 = Eigen::MatrixXd::Zero(3, 3);
  G0(0, 0) = 0.2;
  G0(1, 1) = 0.4;
  G0(2, 2) = 0.4;
  G0(1, 2) = G0(2, 1) = -0.4;
  c.sos.emplace_back(0, G0);
  c.sos.emplace_back(1, Eigen::MatrixXd::Constant(1, 1, 0.8));
  c.sos.emplace_back(2, Eigen::MatrixXd::Constant(1, 1, 0.4));
  c.sos.emplace_back(3, Eigen::MatrixXd::Constant(1, 1, 0.4));
  return c;
}

TEST(CertifyTest, ClaimedRepBIdentityIsOffByThreeFifths) {
  FeasibleSet K = ex1_rep_b();
  P rec = reconstruct(claimed_rep_b(), K);
  P expect = var(2, 0) + var(2, 1) - cst(2, 1.4);
  EXPECT_LE(coeff_norm(P(rec - expect), Norm::linf, false), 1e-12);
  auto rep = verify(ex1_objective() - cst(2, 2), claimed_rep_b(), K);
  EXPECT_FALSE(rep.pass);
  EXPECT_NEAR(rep.residual_norm, 0.6, 1e-12);
  EXPECT_NEAR(rep.residual_poly.constant_term(), -0.6, 1e-12);
}

TEST(CertifyTest, NegativeGramFailsVerification) {
  FeasibleSet K(1);
  PutinarCertificate c;
  c.n = 1;
  c.d = 0;
  c.sos.emplace_back(0, Eigen::MatrixXd::Constant(1, 1, -1e-3));
  auto rep = verify(cst(1, -1e-3), c, K);
  EXPECT_EQ(rep.residual_norm, 0.0);
  EXPECT_FALSE(rep.pass);
}

TEST(CertifyTest, GramSizeMismatchThrows) {
  FeasibleSet K(2);
  PutinarCertificate c;
  c.n = 2;
  c.d = 1;
  c.sos.emplace_back(0, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(reconstruct(c, K), std::invalid_argument);
}

TEST(CertifyTest, MembershipOfOne) {
  auto res = membership(cst(2, 1), ex1_rep_a(), 1);
  ASSERT_EQ(res.status, MembershipStatus::feasible);
  EXPECT_LE(res.report.residual_norm, 1e-6);
}

TEST(CertifyTest, RepAHasNoDegreeOneCertificate) {
  auto res = membership(ex1_objective() - cst(2, 2), ex1_rep_a(), 1);
  EXPECT_EQ(res.status, MembershipStatus::infeasible);
}

// At d=1 the multipliers of the quadratic constraints are constants b_i >= 0
// and sigma0 has degree 2. Matching coefficients gives
// sigma0(1,1) = -(b1 + b2)/2, so b = 0, then a = 0 from the x1 x2 entry, and
// sigma0 = x1 + x2 - 2 is not SOS.
TEST(CertifyTest, RepBHasNoDegreeOneCertificate) {
  auto res = membership(ex1_objective() - cst(2, 2), ex1_rep_b(), 1);
  EXPECT_EQ(res.status, MembershipStatus::infeasible);
  auto two = membership(ex1_objective() - cst(2, 2), ex1_rep_b(), 2);
  ASSERT_EQ(two.status, MembershipStatus::feasible);
  EXPECT_LE(two.report.residual_norm, 1e-6);
}

TEST(CertifyTest, MembershipOfSquareOnBox) {
  // 1 - x^2 + (x - 1/2)^2 is certified on [-1, 1].
  FeasibleSet K = unit_box(1);
  P p = cst(1, 1) - var(1, 0).pow(2) + (var(1, 0) - cst(1, 0.5)).pow(2);
  auto res = membership(p, K, 1);
  ASSERT_EQ(res.status, MembershipStatus::feasible);
  EXPECT_LE(res.report.residual_norm, 1e-6);
  // Monotone in d.
  EXPECT_EQ(membership(p, K, 2).status, MembershipStatus::feasible);
}

TEST(CertifyTest, DegreeTooHighIsInfeasible) {
  auto res = membership(var(1, 0).pow(5), unit_box(1), 2);
  EXPECT_EQ(res.status, MembershipStatus::infeasible);
}

TEST(CertifyTest, EqualityMultipliers) {
  // On {x^2 = 1}: x + 1 = (1/2)(x + 1)^2 - (1/2)(x^2 - 1).
  FeasibleSet K(1);
  K.add_equality(var(1, 0).pow(2) - cst(1, 1));
  auto res = membership(var(1, 0) + cst(1, 1), K, 1);
  ASSERT_EQ(res.status, MembershipStatus::feasible);
  ASSERT_EQ(res.certificate.free.size(), 1u);
  EXPECT_LE(res.report.residual_norm, 1e-6);
}

TEST(CertifyTest, SosFactorizationReproducesGram) {
  MonomialBasis b(2, 1);
  Eigen::MatrixXd G = claimed_rep_b().sos[0].second;
  auto fac = sos_factorization(b, G);
  P s(2);
  for (const auto& [w, q] : fac) s += q * q * w;
  P ref = gram_polynomial<double>(b, G);
  EXPECT_LE(coeff_norm(P(s - ref), Norm::linf, false), 1e-12);
  EXPECT_EQ(fac.size(), 2u);
}

TEST(CertifyTest, UncenterMovesCertificate) {
  Point y = pt({0.3});
  FeasibleSet K = unit_box(1);
  P p = cst(1, 1) - var(1, 0).pow(2) + (var(1, 0) - cst(1, 0.5)).pow(2);
  auto res = membership(shift(p, y), K.shifted(y), 1);
  ASSERT_EQ(res.status, MembershipStatus::feasible);
  PutinarCertificate back = uncenter(res.certificate, y);
  auto rep = verify(p, back, K);
  EXPECT_TRUE(rep.pass) << rep.residual_norm;
}

TEST(CertifyTest, JsonRoundTrip) {
  PutinarCertificate c = claimed_rep_b();
  c.free.emplace_back(0, var(2, 0) * 3.0);
  PutinarCertificate r = certificate_from_json(to_json(c));
  ASSERT_EQ(r.sos.size(), c.sos.size());
  for (size_t k = 0; k < c.sos.size(); ++k) EXPECT_EQ(r.sos[k].second, c.sos[k].second);
  EXPECT_EQ(r.free[0].second, c.free[0].second);
}

TEST(CertifyTest, FeasibleSetBasics) {
  FeasibleSet K = ex1_rep_b();
  EXPECT_EQ(K.half_degree(0), 0);
  EXPECT_EQ(K.half_degree(1), 1);
  EXPECT_TRUE(K.contains(pt({1, 1})));
  EXPECT_FALSE(K.contains(pt({0.4, 3})));
  EXPECT_THROW(K.add_inequality(var(3, 0)), std::invalid_argument);
}

}  // namespace
}  // namespace invpop
