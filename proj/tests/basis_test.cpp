#include "invpop/basis.hpp"

#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

namespace invpop {
namespace {

using P = Polynomiald;

double min_eig(const Eigen::MatrixXd& M) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

TEST(BasisTest, Enumeration) {
  MonomialBasis b(2, 1);
  ASSERT_EQ(b.size(), 3);
  EXPECT_EQ(b[0], (MultiIndex{0, 0}));
  EXPECT_EQ(b[1], (MultiIndex{1, 0}));
  EXPECT_EQ(b[2], (MultiIndex{0, 1}));
  EXPECT_EQ(MonomialBasis(2, 2).size(), 6);
  EXPECT_EQ(MonomialBasis(5, 1).size(), 6);
  EXPECT_EQ(basis_size(5, 1), 6);
  EXPECT_EQ(basis_size(3, 4), 35);
  MonomialBasis big(3, 3);
  for (int i = 1; i < big.size(); ++i) EXPECT_LT(big[i - 1], big[i]);
  EXPECT_EQ(big.index_of(MultiIndex{1, 1, 1}) >= 0, true);
  EXPECT_EQ(big.index_of(MultiIndex{4, 0, 0}), -1);
}

TEST(BasisTest, HankelMomentMatrix) {
  auto map = moment_structure(1, 1);
  MomentVectord z(1);
  z.set(MultiIndex{0}, 5);
  z.set(MultiIndex{1}, 7);
  z.set(MultiIndex{2}, 11);
  Eigen::MatrixXd M = assemble(map, z);
  EXPECT_EQ(M(0, 0), 5);
  EXPECT_EQ(M(0, 1), 7);
  EXPECT_EQ(M(1, 0), 7);
  EXPECT_EQ(M(1, 1), 11);
}

TEST(BasisTest, ZeroBlockIsElementary) {
  auto map = moment_structure(2, 2);
  Eigen::MatrixXd B0 = map.dense_block(MultiIndex{0, 0});
  EXPECT_EQ(B0.sum(), 1.0);
  EXPECT_EQ(B0(0, 0), 1.0);
}

TEST(BasisTest, DefiningIdentity) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1, 1);
  P g = P::variable(2, 0) * P::variable(2, 1) - P::constant(2, 1) + P::variable(2, 0).pow(2) * 0.5;
  for (const P& mult : {P::constant(2, 1.0), g}) {
    auto map = localizing_structure(mult, 2);
    for (int t = 0; t < 10; ++t) {
      Point x(2);
      x << U(rng), U(rng);
      Eigen::VectorXd v = map.basis().evaluate(x);
      Eigen::MatrixXd ref = mult(x) * v * v.transpose();
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(map.dim(), map.dim());
      for (const auto& [a, entries] : map.blocks()) {
        double xa = P::monomial(a)(x);
        for (const auto& e : entries) sum(e.row, e.col) += e.value * xa;
      }
      EXPECT_LE((sum - ref).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(BasisTest, LocalizingExamples) {
  P g = P::constant(1, 1) - P::variable(1, 0).pow(2);
  auto map = localizing_structure(g, 0);
  MomentVectord z(1);
  z.set(MultiIndex{0}, 3);
  z.set(MultiIndex{2}, 1);
  Eigen::MatrixXd M = assemble(map, z);
  ASSERT_EQ(M.rows(), 1);
  EXPECT_EQ(M(0, 0), 2);

  P h = P::variable(2, 0) * P::variable(2, 1) - P::constant(2, 1);
  auto hm = localizing_structure(h, 1);
  Eigen::MatrixXd C0 = hm.dense_block(MultiIndex{0, 0});
  Eigen::MatrixXd C11 = hm.dense_block(MultiIndex{1, 1});
  EXPECT_EQ(C0(0, 0), -1);
  EXPECT_EQ(C11(0, 0), 1);
  EXPECT_EQ(localizing_structure(P::constant(2, 1), 2).blocks().size(),
            moment_structure(2, 2).blocks().size());
}

TEST(BasisTest, UniformMeasureMoments) {
  MomentVectord z(1);
  z.set(MultiIndex{0}, 2.0);
  z.set(MultiIndex{1}, 0.0);
  z.set(MultiIndex{2}, 2.0 / 3.0);
  Eigen::MatrixXd M = assemble(moment_structure(1, 1), z);
  EXPECT_DOUBLE_EQ(M(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(M(1, 1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(M(0, 1), 0.0);
  EXPECT_GT(min_eig(M), 0);
  z.set(MultiIndex{0}, 1.0);
  z.set(MultiIndex{1}, 2.0);
  z.set(MultiIndex{2}, 1.0);
  EXPECT_LT(min_eig(assemble(moment_structure(1, 1), z)), 0);
}

TEST(BasisTest, MissingMomentThrows) {
  MomentVectord z(2);
  z.set(MultiIndex{0, 0}, 1);
  EXPECT_THROW(assemble(moment_structure(2, 1), z), std::out_of_range);
}

TEST(BasisTest, Riesz) {
  Point y(2);
  y << 1, 1;
  auto z = MomentVectord::from_atoms({y}, {1.0}, 2);
  P f = P::variable(2, 0) + P::variable(2, 1);
  EXPECT_DOUBLE_EQ(riesz(z, P::constant(2, 1)), z.mass());
  EXPECT_DOUBLE_EQ(riesz(z, P::constant(2, f.constant_term()) - f), -2.0);
  P q = f * f;
  EXPECT_DOUBLE_EQ(riesz(z, f + q), riesz(z, f) + riesz(z, q));
  Eigen::MatrixXd M = assemble(moment_structure(2, 1), z);
  EXPECT_NEAR(min_eig(M), 0.0, 1e-12);
}

// Empirical moments of samples in K = {x in [-1,1]^2 : 1 - x1^2 - x2^2 >= 0}.
TEST(BasisTest, EmpiricalMomentsArePsd) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> U(-1, 1);
  P g = P::constant(2, 1) - P::variable(2, 0).pow(2) - P::variable(2, 1).pow(2);
  std::vector<Point> atoms;
  while (atoms.size() < 200) {
    Point p(2);
    p << U(rng), U(rng);
    if (g(p) >= 0) atoms.push_back(p);
  }
  std::vector<double> w(atoms.size(), 1.0 / 200);
  auto z = MomentVectord::from_atoms(atoms, w, 6);
  EXPECT_GE(min_eig(assemble(moment_structure(2, 2), z)), -1e-8);
  EXPECT_GE(min_eig(assemble(localizing_structure(g, 2), z)), -1e-8);
  MonomialBasis b(2, 2);
  for (int t = 0; t < 10; ++t) {
    P p(2);
    for (const auto& a : b.list()) p.add_term(a, U(rng));
    EXPECT_GE(riesz(z, p * p), -1e-8);
  }
}

TEST(BasisTest, GramPolynomial) {
  MonomialBasis b(1, 1);
  Eigen::MatrixXd G(2, 2);
  G << 1, -1, -1, 1;
  P s = gram_polynomial<double>(b, G);
  P ref = (P::variable(1, 0) - P::constant(1, 1)).pow(2);
  EXPECT_EQ(s, ref);
}

}  // namespace
}  // namespace invpop
