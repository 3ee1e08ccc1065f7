#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "invpop/instances.hpp"
#include "problem_file.hpp"
#include "report.hpp"

namespace invpop {
namespace {

using namespace invpop::testing;
using cli::ParseError;
using cli::parse_polynomial;

const std::vector<std::string> kXY = {"x1", "x2"};

void expect_same(const P& a, const P& b) {
  EXPECT_EQ(a.terms(), b.terms()) << to_string(a) << " vs " << to_string(b);
}

TEST(ParserTest, Examples) {
  expect_same(parse_polynomial("x1*x2 - 1", kXY), var(2, 0) * var(2, 1) - cst(2, 1));
  // (x1 - 1/2)(2 - x1) = -x1^2 + 5/2 x1 - 1
  expect_same(parse_polynomial("(x1 - 1/2)*(2 - x1)", kXY), -var(2, 0).pow(2) + var(2, 0) * 2.5 - cst(2, 1));
  expect_same(parse_polynomial("x1^2 + x2^2 - 3", kXY), var(2, 0).pow(2) + var(2, 1).pow(2) - cst(2, 3));
}

TEST(ParserTest, Literals) {
  EXPECT_DOUBLE_EQ(cli::parse_constant("1/0.63"), 1 / 0.63);
  EXPECT_DOUBLE_EQ(cli::parse_constant("-2.5e-1"), -0.25);
  EXPECT_DOUBLE_EQ(cli::parse_constant(".5"), 0.5);
  EXPECT_DOUBLE_EQ(cli::parse_constant("3 / 4"), 0.75);
  EXPECT_DOUBLE_EQ(cli::parse_constant("-(1 - 3)^3"), 8.0);
  EXPECT_THROW(cli::parse_constant("x1"), ParseError);
}

TEST(ParserTest, Whitespace) {
  expect_same(parse_polynomial("  x1 *x2^ 2-(x1)", kXY), parse_polynomial("x1*x2^2-x1", kXY));
  expect_same(parse_polynomial("-x1 - (-x2)", kXY), -var(2, 0) + var(2, 1));
  // Unary minus only at the head of an expression.
  EXPECT_THROW(parse_polynomial("-x1 - -x2", kXY), ParseError);
}

TEST(ParserTest, ErrorsCarryPositions) {
  auto at = [](const char* src) -> std::pair<size_t, std::string> {
    try {
      parse_polynomial(src, kXY);
    } catch (const ParseError& e) {
      return {e.position(), e.detail()};
    }
    return {size_t(-1), ""};
  };
  EXPECT_EQ(at("x1 + y").first, 5u);
  EXPECT_NE(at("x1 + y").second.find("unknown identifier"), std::string::npos);
  EXPECT_EQ(at("x1^2.5").second, "non-integer exponent");
  EXPECT_EQ(at("x1^").second, "malformed exponent");
  EXPECT_EQ(at("x1^x2").second, "malformed exponent");
  EXPECT_EQ(at("x1^-1").first, 3u);
  EXPECT_EQ(at("(x1 + 1").first, 7u);
  EXPECT_EQ(at("x1 + ").first, 5u);
  EXPECT_EQ(at("x1 x2").first, 3u);
  EXPECT_EQ(at("1/0").second, "division by zero in rational literal");
}

TEST(ParserTest, RoundTrip) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> num(-40, 40), den(1, 9);
  for (int trial = 0; trial < 50; ++trial) {
    P p = instances::random_polynomial(3, 4, rng);
    // Rational coefficients exercise the 17-digit printing.
    P q(3);
    for (const auto& [a, c] : p.terms()) q.add_term(a, num(rng) / static_cast<double>(den(rng)) + c * 1e-9);
    const std::vector<std::string> names = {"x1", "x2", "x3"};
    expect_same(parse_polynomial(to_string(q, names), names), q);
  }
}

TEST(ParserTest, Monomial) {
  EXPECT_EQ(cli::parse_monomial("x1*x2^2", kXY), MultiIndex({1, 2}));
  EXPECT_THROW(cli::parse_monomial("2*x1", kXY), ParseError);
  EXPECT_THROW(cli::parse_monomial("x1 + x2", kXY), ParseError);
}

TEST(ProblemFileTest, ParsesConstraintsAndOptions) {
  auto pf = cli::parse_problem(R"(
# comment
vars: x1, x2
objective: x1^2 + x2   # trailing comment
constraint: x1*x2 >= 1
constraint: x1^2 + x2^2 <= 3
constraint: x1 == x2
point: 1, 1
option d = 2
option norm = linf
option epsilon = 1/4
option structural = x1*x2, x1^2
option box = -2 2, -2 2
)");
  EXPECT_EQ(pf.vars, kXY);
  const auto& K = pf.problem.K;
  ASSERT_EQ(K.num_inequalities(), 2);
  expect_same(K.inequalities()[0], var(2, 0) * var(2, 1) - cst(2, 1));
  expect_same(K.inequalities()[1], cst(2, 3) - var(2, 0).pow(2) - var(2, 1).pow(2));
  ASSERT_EQ(K.equalities().size(), 1u);
  expect_same(K.equalities()[0], var(2, 0) - var(2, 1));
  EXPECT_EQ(pf.problem.d, 2);
  EXPECT_EQ(pf.problem.norm, Norm::linf);
  EXPECT_DOUBLE_EQ(pf.problem.epsilon, 0.25);
  EXPECT_EQ(pf.problem.structural.size(), 2u);
  ASSERT_TRUE(pf.problem.box.has_value());
  EXPECT_EQ(pf.problem.box->lower, (std::vector<double>{-2, -2}));
  EXPECT_NO_THROW(pf.problem.validate());
}

TEST(ProblemFileTest, ErrorsCarryLines) {
  auto line_of = [](const char* text) {
    try {
      cli::parse_problem(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("vars: x\nobjective: x + y\npoint: 0\n"), 2);
  EXPECT_EQ(line_of("vars: x\nobjective: x\nconstraint: x > 0\npoint: 0\n"), 3);
  EXPECT_EQ(line_of("vars: x\nobjective: x\npoint: 0, 1\n"), 3);
  EXPECT_EQ(line_of("vars: x\nobjective: x\npoint: 0\noption norm = l3\n"), 4);
  EXPECT_EQ(line_of("vars: x\nobjective: x\npoint: 0\noption color = red\n"), 4);
  EXPECT_EQ(line_of("vars: x x\n"), 1);
  EXPECT_EQ(line_of("vars: x\npoint: 0\n"), 0);
  EXPECT_EQ(line_of("hello\n"), 1);
}

TEST(ProblemFileTest, BundledFilesMatchInstances) {
  const std::string dir = INVPOP_PROBLEM_DIR;
  for (const auto& [name, inst] : instances::bundled()) {
    SCOPED_TRACE(name);
    auto pf = cli::read_problem(dir + "/" + name + ".prob");
    const auto& p = pf.problem;
    expect_same(p.f, inst.f);
    EXPECT_EQ(p.d, inst.d);
    EXPECT_LT((p.y - inst.y).norm(), 1e-12);
    EXPECT_EQ(p.structural, inst.structural);
    ASSERT_EQ(p.K.num_inequalities(), inst.K.num_inequalities());
    for (int j = 0; j < p.K.num_inequalities(); ++j) {
      P diff = p.K.inequalities()[j] - inst.K.inequalities()[j];
      EXPECT_LT(coeff_norm(diff, Norm::l1, false), 1e-12);
    }
    ASSERT_EQ(p.K.equalities().size(), inst.K.equalities().size());
    EXPECT_NO_THROW(p.validate());
  }
}

TEST(ReportTest, NumbersUseTwelveDigits) {
  EXPECT_EQ(cli::number(1.0 / 3).get<double>(), 0.333333333333);
  EXPECT_TRUE(cli::number(std::nan("")).is_null());
  EXPECT_TRUE(cli::number(INFINITY).is_null());
  auto s = cli::certificate_summary(PutinarCertificate{2, 1, {{0, Eigen::MatrixXd::Identity(3, 3)}}, {}},
                                    CertificateReport{P(2), 1e-9, 1.0, true});
  EXPECT_EQ(s["blocks"][0]["size"], 3);
  EXPECT_DOUBLE_EQ(s["blocks"][0]["min_eig"].get<double>(), 1.0);
}

}  // namespace
}  // namespace invpop
