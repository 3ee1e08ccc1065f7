#include "invpop/polyalg.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace invpop {
namespace {

using P = Polynomiald;

P x(int n, int i) { return P::variable(n, i); }
P c(int n, double v) { return P::constant(n, v); }

P random_poly(std::mt19937& rng, int n, int deg) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  P p(n);
  for (int t = 0; t < 6; ++t) {
    MultiIndex a(n);
    int budget = deg;
    for (int i = 0; i < n; ++i) {
      int e = std::uniform_int_distribution<int>(0, budget)(rng);
      a[i] = e;
      budget -= e;
    }
    p.add_term(a, U(rng));
  }
  return p;
}

TEST(MultiIndexTest, GradedLexOrder) {
  MultiIndex z{0, 0}, a{1, 0}, b{0, 1}, aa{2, 0}, ab{1, 1}, bb{0, 2};
  EXPECT_LT(z, a);
  EXPECT_LT(a, b);
  EXPECT_LT(b, aa);
  EXPECT_LT(aa, ab);
  EXPECT_LT(ab, bb);
  EXPECT_EQ((a + b), ab);
  EXPECT_EQ(ab.degree(), 2);
}

TEST(PolynomialTest, Arithmetic) {
  const int n = 2;
  EXPECT_EQ((x(n, 0) + x(n, 1)) + (-x(n, 1)), x(n, 0));
  P d = x(n, 0) - x(n, 1);
  P sq = d * d;
  EXPECT_EQ(sq.coeff({2, 0}), 1.0);
  EXPECT_EQ(sq.coeff({1, 1}), -2.0);
  EXPECT_EQ(sq.coeff({0, 2}), 1.0);
  EXPECT_EQ(sq.num_terms(), 3u);
  P s = (x(n, 0) * x(n, 1) - c(n, 1)) * 0.8;
  EXPECT_DOUBLE_EQ(s.coeff({1, 1}), 0.8);
  EXPECT_DOUBLE_EQ(s.constant_term(), -0.8);
  EXPECT_THROW(x(2, 0) + x(3, 0), std::invalid_argument);
}

TEST(PolynomialTest, CancellationLeavesNoZeros) {
  P p = x(2, 0) - x(2, 0);
  EXPECT_TRUE(p.is_zero());
  EXPECT_EQ(p.degree(), 0);
}

TEST(PolynomialTest, Evaluate) {
  Point y(2);
  y << 1, 1;
  EXPECT_DOUBLE_EQ((x(2, 0) + x(2, 1)).evaluate(y), 2.0);
  P f = -x(2, 0) - x(2, 1).pow(2);
  Point q(2);
  q << -0.63, -1 / 0.63;
  EXPECT_NEAR(f.evaluate(q), 0.63 - std::pow(1 / 0.63, 2), 1e-12);
  EXPECT_NEAR(f(q), -1.8896, 1e-4);
  P g = f + c(2, 3.5);
  EXPECT_DOUBLE_EQ(g.evaluate(Point::Zero(2)), 3.5);
  EXPECT_THROW(f.evaluate(Point::Zero(3)), std::invalid_argument);
}

TEST(PolynomialTest, Shift) {
  Point y(2);
  y << 1, 1;
  P s = shift(P(x(2, 0) + x(2, 1)), y);
  EXPECT_EQ(s, x(2, 0) + x(2, 1) + c(2, 2));
  P t = shift(P(x(2, 0) * x(2, 1) - c(2, 1)), y);
  EXPECT_EQ(t, x(2, 0) * x(2, 1) + x(2, 0) + x(2, 1));
  P r = x(2, 0).pow(3) - x(2, 1) * 2.0;
  EXPECT_EQ(shift(r, Point(Point::Zero(2))), r);
}

TEST(PolynomialTest, ShiftProperty) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + trial % 3;
    P p = random_poly(rng, n, 4);
    Point y(n);
    for (int i = 0; i < n; ++i) y(i) = U(rng);
    P s = shift(p, y);
    EXPECT_EQ(s.degree(), p.degree());
    for (int k = 0; k < 100; ++k) {
      Point u(n);
      for (int i = 0; i < n; ++i) u(i) = U(rng);
      double ref = p.evaluate(Point(u + y));
      EXPECT_LE(std::abs(s.evaluate(u) - ref), 1e-9 * (1 + std::abs(ref)));
    }
  }
}

TEST(PolynomialTest, RingLaws) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    P p = random_poly(rng, 3, 3), q = random_poly(rng, 3, 3), r = random_poly(rng, 3, 3);
    P lhs = (p + q) + r, rhs = p + (q + r);
    P diff = lhs - rhs;
    for (const auto& [a, v] : diff.terms()) EXPECT_LE(std::abs(v), 1e-12);
    diff = p * (q + r) - (p * q + p * r);
    for (const auto& [a, v] : diff.terms()) EXPECT_LE(std::abs(v), 1e-12);
  }
}

TEST(PolynomialTest, CoeffNorm) {
  P f = x(2, 0) + x(2, 1);
  EXPECT_DOUBLE_EQ(coeff_norm(f, Norm::l1, true), 2.0);
  P g = -x(2, 0) - x(2, 1).pow(2);
  EXPECT_DOUBLE_EQ(coeff_norm(g, Norm::l1, true), 2.0);
  EXPECT_DOUBLE_EQ(coeff_norm(P(2), Norm::l1, true), 0.0);
  EXPECT_DOUBLE_EQ(coeff_norm(P(2), Norm::linf, false), 0.0);
  P h = x(2, 0) * 3.0 - x(2, 1) * 4.0 + c(2, 10);
  EXPECT_DOUBLE_EQ(coeff_norm(h, Norm::l2, true), 25.0);
  EXPECT_DOUBLE_EQ(coeff_norm(h, Norm::linf, true), 4.0);
  EXPECT_DOUBLE_EQ(coeff_norm(h, Norm::linf, false), 10.0);
  EXPECT_DOUBLE_EQ(coeff_norm(c(2, 5), Norm::l1, true), 0.0);
  EXPECT_GT(coeff_norm(c(2, 5), Norm::l1, false), 0.0);
}

TEST(PolynomialTest, GradientHessian) {
  P g = x(2, 0) * x(2, 1) - c(2, 1);
  auto grad = gradient(g);
  EXPECT_EQ(grad[0], x(2, 1));
  EXPECT_EQ(grad[1], x(2, 0));
  Point y(2);
  y << 1, 1;
  Point gv = gradient_at(P(x(2, 0) + x(2, 1)), y);
  EXPECT_DOUBLE_EQ(gv(0), 1.0);
  EXPECT_DOUBLE_EQ(gv(1), 1.0);
  Eigen::MatrixXd H = hessian_at(P(x(2, 0).pow(2) - x(2, 1).pow(2)), y);
  EXPECT_DOUBLE_EQ(H(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(H(1, 1), -2.0);
  EXPECT_DOUBLE_EQ(H(0, 1), 0.0);
}

TEST(PolynomialTest, GradientMatchesFiniteDifferences) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  P p = random_poly(rng, 3, 4);
  auto grad = gradient(p);
  const double h = 1e-5;
  for (int k = 0; k < 20; ++k) {
    Point z(3);
    for (int i = 0; i < 3; ++i) z(i) = U(rng);
    for (int i = 0; i < 3; ++i) {
      Point zp = z, zm = z;
      zp(i) += h;
      zm(i) -= h;
      double fd = (p(zp) - p(zm)) / (2 * h);
      double g = grad[static_cast<size_t>(i)](z);
      EXPECT_LE(std::abs(fd - g), 1e-6 * (1 + std::abs(g)));
    }
  }
}

TEST(PolynomialTest, Formatting) {
  P p = x(2, 0) * x(2, 1) * 2.5 - c(2, 1);
  EXPECT_EQ(to_string(p), "-1 + 2.5*x1*x2");
  EXPECT_EQ(to_string(P(2)), "0");
}

}  // namespace
}  // namespace invpop
