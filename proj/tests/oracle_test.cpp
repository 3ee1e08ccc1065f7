#include "invpop/oracle.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace invpop {
namespace {

using namespace invpop::testing;

Box square(double lo, double hi) { return Box{{lo, lo}, {hi, hi}}; }

TEST(OracleTest, GridFindsExampleOneMinimum) {
  auto r = oracle::grid_min(ex1_objective(), ex1_rep_a(), square(0.4, 2.1), 0.01);
  EXPECT_NEAR(r.value, 2.0, 1e-3);
  EXPECT_NEAR(r.argmin(0), 1.0, 2e-2);
  EXPECT_NEAR(r.argmin(1), 1.0, 2e-2);
  EXPECT_TRUE(ex1_rep_a().contains(r.argmin, 1e-9));
  EXPECT_DOUBLE_EQ(r.value, ex1_objective()(r.argmin));
}

TEST(OracleTest, GridFindsExampleThreeMinimizer) {
  // Over all of K the minimum sits on the positive branch; the point
  // (-0.618, -1/0.618) is the minimizer on the component x <= 0.
  const double r = (std::sqrt(5.0) - 1) / 2;
  auto all = oracle::grid_min(ex3_objective(), ex3_set(), square(-1.8, 1.8), 0.01);
  EXPECT_NEAR(all.argmin(0), r, 5e-3);
  EXPECT_NEAR(all.argmin(1), 1 / r, 5e-3);
  EXPECT_NEAR(all.value, -r - 1 / (r * r), 1e-2);
  FeasibleSet neg = ex3_set();
  neg.add_inequality(-var(2, 0));
  auto part = oracle::grid_min(ex3_objective(), neg, square(-1.8, 1.8), 0.01);
  EXPECT_NEAR(part.argmin(0), -0.618, 5e-3);
  EXPECT_NEAR(part.argmin(1), -1 / 0.618, 5e-3);
  EXPECT_NEAR(part.value, -2.0, 1e-2);
}

TEST(OracleTest, GridValueDecreasesWithStep) {
  auto coarse = oracle::grid_min(ex3_objective(), ex3_set(), square(-1.8, 1.8), 0.05, {1e-9, false});
  auto fine = oracle::grid_min(ex3_objective(), ex3_set(), square(-1.8, 1.8), 0.01, {1e-9, false});
  EXPECT_LE(fine.value, coarse.value);
  // Grid values are attained in K, so they bound f* from above.
  const double r = (std::sqrt(5.0) - 1) / 2;
  EXPECT_GE(fine.value, ex3_objective()(pt({r, 1 / r})) - 1e-12);
}

TEST(OracleTest, GridErrors) {
  FeasibleSet K(1);
  K.add_equality(var(1, 0) - cst(1, 0.123456));
  EXPECT_THROW(oracle::grid_min(var(1, 0), K, Box{{0}, {1}}, 0.1), std::runtime_error);
  EXPECT_THROW(oracle::grid_min(var(1, 0), unit_box(1), Box{{0}, {1}}, 0.0), std::invalid_argument);
  EXPECT_THROW(oracle::grid_min(var(1, 0), unit_box(1), Box{{0}, {1}}, 1e-9), std::invalid_argument);
}

TEST(OracleTest, EnumerationOnBinaryDomain) {
  FeasibleSet K(3);
  for (int i = 0; i < 3; ++i) K.add_equality(var(3, i).pow(2) - var(3, i));
  auto vals = oracle::binary_values(K);
  ASSERT_EQ(vals.size(), 3u);
  P f = var(3, 0) - var(3, 1) * 2.0 + var(3, 0) * var(3, 2) * 3.0 - var(3, 2);
  auto r = oracle::enumerate_min(f, K, vals);
  EXPECT_DOUBLE_EQ(r.value, -3.0);
  EXPECT_EQ(r.argmin, pt({0, 1, 1}));
  EXPECT_EQ(r.samples, 8);

  FeasibleSet S(2);
  for (int i = 0; i < 2; ++i) S.add_equality(var(2, i).pow(2) - cst(2, 1));
  auto sv = oracle::binary_values(S);
  ASSERT_EQ(sv.size(), 2u);
  EXPECT_EQ(sv[0], (std::vector<double>{-1.0, 1.0}));
  EXPECT_TRUE(oracle::binary_values(unit_box(2)).empty());
}

TEST(OracleTest, SampleMinBasics) {
  FeasibleSet K = unit_box(2);
  auto a = oracle::sample_min(cst(2, 1) - var(2, 0).pow(2), K, square(-1, 1), 10000);
  EXPECT_GE(a.value, -1e-12);
  auto b = oracle::sample_min(var(2, 0), K, square(-1, 1), 10000);
  EXPECT_NEAR(b.value, -1.0, 1e-2);
  EXPECT_TRUE(b.warning.empty());
  EXPECT_EQ(b.feasible, 10000);
}

TEST(OracleTest, SampleMinIsDeterministic) {
  auto a = oracle::sample_min(ex3_objective(), ex3_set(), square(-2, 2), 5000);
  auto b = oracle::sample_min(ex3_objective(), ex3_set(), square(-2, 2), 5000);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.argmin, b.argmin);
  auto c = oracle::sample_min(ex3_objective(), ex3_set(), square(-2, 2), 5000, 7u);
  EXPECT_NE(a.argmin, c.argmin);
}

TEST(OracleTest, SampleMinWarnsOnThinSets) {
  FeasibleSet K(2);
  K.add_inequality(cst(2, 1e-4) - var(2, 0).pow(2) - var(2, 1).pow(2));
  auto r = oracle::sample_min(var(2, 0), K, square(-1, 1), 2000);
  EXPECT_FALSE(r.warning.empty());
}

TEST(OracleTest, RadicalInverse) {
  EXPECT_DOUBLE_EQ(oracle::radical_inverse(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(oracle::radical_inverse(3, 2), 0.75);
  EXPECT_DOUBLE_EQ(oracle::radical_inverse(1, 3), 1.0 / 3);
  EXPECT_DOUBLE_EQ(oracle::radical_inverse(5, 3), 2.0 / 3 + 1.0 / 9);
}

}  // namespace
}  // namespace invpop
