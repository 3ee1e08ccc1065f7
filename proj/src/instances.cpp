#include "invpop/instances.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace invpop::instances {

namespace {

Polynomiald x(int n, int i) { return Polynomiald::variable(n, i); }
Polynomiald c(int n, double v) { return Polynomiald::constant(n, v); }

Point point(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double t : v) p(i++) = t;
  return p;
}

FeasibleSet ex1_set(bool product_bounds) {
  FeasibleSet K(2);
  K.add_inequality(x(2, 0) * x(2, 1) - c(2, 1));
  for (int i = 0; i < 2; ++i) {
    if (product_bounds) {
      K.add_inequality((x(2, i) - c(2, 0.5)) * (c(2, 2) - x(2, i)));
    } else {
      K.add_inequality(x(2, i) - c(2, 0.5));
      K.add_inequality(c(2, 2) - x(2, i));
    }
  }
  return K;
}

FeasibleSet ex3_set() {
  FeasibleSet K(2);
  K.add_inequality(x(2, 0) * x(2, 1) - c(2, 1));
  K.add_inequality(c(2, 3) - x(2, 0).pow(2) - x(2, 1).pow(2));
  return K;
}

double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// r - (x - ctr)' Q (x - ctr) with Q = R diag(e) R', R a rotation.
Polynomiald ellipse(const Point& ctr, double r, double e1, double e2, double angle) {
  Eigen::Matrix2d R;
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  Eigen::Matrix2d Q = R * Eigen::Vector2d(e1, e2).asDiagonal() * R.transpose();
  Polynomiald u = x(2, 0) - c(2, ctr(0)), v = x(2, 1) - c(2, ctr(1));
  return c(2, r) - u * u * Q(0, 0) - u * v * (2.0 * Q(0, 1)) - v * v * Q(1, 1);
}

// Feasible point drawn uniformly from the box [ctr - half, ctr + half].
Point sample_in(const FeasibleSet& K, const Point& ctr, double half, std::mt19937& rng) {
  for (int t = 0; t < 100000; ++t) {
    Point y(ctr.size());
    for (int i = 0; i < ctr.size(); ++i) y(i) = ctr(i) + uniform(rng, -half, half);
    if (K.violation(y) == 0.0) return y;
  }
  throw std::runtime_error("random instance: no feasible point found");
}

}  // namespace

InverseProblem ex1a() {
  InverseProblem p;
  p.f = x(2, 0) + x(2, 1);
  p.K = ex1_set(false);
  p.y = point({1, 1});
  p.d = 1;
  return p;
}

InverseProblem ex1b() {
  InverseProblem p = ex1a();
  p.K = ex1_set(true);
  return p;
}

InverseProblem ex2() {
  InverseProblem p = ex1b();
  p.y = point({1.1, 1 / 1.1});
  p.d = 2;
  return p;
}

InverseProblem ex3a() {
  InverseProblem p;
  p.f = -x(2, 0) - x(2, 1).pow(2);
  p.K = ex3_set();
  p.y = point({-0.63, -1 / 0.63});
  p.d = 2;
  return p;
}

InverseProblem ex3b() {
  InverseProblem p = ex3a();
  p.y = point({-0.63, -std::sqrt(3 - 0.63 * 0.63)});
  return p;
}

void pin_quadratic_form(InverseProblem& p) {
  const int n = p.num_vars();
  for (int i = 0; i < n; ++i) {
    p.structural.insert(MultiIndex::unit(n, i));
    p.structural.insert(MultiIndex::unit(n, i, 2));
  }
}

InverseProblem maxcut5() {
  const int n = 5;
  InverseProblem p;
  p.f = Polynomiald(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) p.f += x(n, i) * x(n, j);
  p.K = FeasibleSet(n);
  for (int i = 0; i < n; ++i) p.K.add_equality(x(n, i).pow(2) - c(n, 1));
  p.y = point({1, 1, 1, -1, -1});
  p.d = 1;
  pin_quadratic_form(p);
  return p;
}

InverseProblem bool2() {
  InverseProblem p;
  p.f = x(2, 0) + x(2, 1);
  p.K = FeasibleSet(2);
  for (int i = 0; i < 2; ++i) p.K.add_equality(x(2, i).pow(2) - x(2, i));
  p.y = point({1, 1});
  p.d = 2;
  return p;
}

std::vector<Named> bundled() {
  return {{"ex1a", ex1a()}, {"ex1b", ex1b()}, {"ex2", ex2()}, {"ex3a", ex3a()},
          {"ex3b", ex3b()}, {"maxcut5", maxcut5()}, {"bool2", bool2()}};
}

Polynomiald random_polynomial(int n, int deg, std::mt19937& rng) {
  Polynomiald p(n);
  const MonomialBasis basis(n, deg);
  for (const MultiIndex& a : basis.list()) p.add_term(a, uniform(rng, -1.0, 1.0));
  return p;
}

InverseProblem random_quadratic_set(std::mt19937& rng) {
  InverseProblem p;
  Point ctr = point({uniform(rng, -1, 1), uniform(rng, -1, 1)});
  double e1 = uniform(rng, 0.5, 2.0), e2 = uniform(rng, 0.5, 2.0), r = uniform(rng, 0.5, 1.5);
  p.K = FeasibleSet(2);
  p.K.add_inequality(ellipse(ctr, r, e1, e2, uniform(rng, 0, M_PI)));
  // A second quadratic, shifted so that it is positive at the centre.
  Polynomiald g = random_polynomial(2, 2, rng);
  g += c(2, 0.25 - g(ctr));
  p.K.add_inequality(g);
  p.f = random_polynomial(2, std::uniform_int_distribution<int>(2, 4)(rng), rng);
  p.y = sample_in(p.K, ctr, std::sqrt(r / std::min(e1, e2)), rng);
  p.d = 2;
  return p;
}

InverseProblem random_box(std::mt19937& rng) {
  InverseProblem p;
  Point ctr = point({uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3)});
  // Semi-axes at most 0.7 keep the ellipse inside [-1,1]^2.
  double a1 = uniform(rng, 0.3, 0.7), a2 = uniform(rng, 0.3, 0.7);
  p.K = FeasibleSet(2);
  p.K.add_inequality(ellipse(ctr, 1.0, 1.0 / (a1 * a1), 1.0 / (a2 * a2), uniform(rng, 0, M_PI)));
  p.f = random_polynomial(2, std::uniform_int_distribution<int>(2, 3)(rng), rng);
  // Best of a few feasible draws, so that y is a plausible incumbent.
  p.y = sample_in(p.K, ctr, 0.7, rng);
  for (int t = 0; t < 30; ++t) {
    Point z = sample_in(p.K, ctr, 0.7, rng);
    if (p.f(z) < p.f(p.y)) p.y = z;
  }
  p.assume_box = true;
  p.d = 2;
  return p;
}

InverseProblem random_zero_one(std::mt19937& rng) {
  const int n = 3;
  InverseProblem p;
  p.f = Polynomiald(n);
  for (int i = 0; i < n; ++i) {
    p.f.add_term(MultiIndex::unit(n, i), uniform(rng, -1, 1));
    for (int j = i + 1; j < n; ++j) p.f.add_term(MultiIndex::unit(n, i) + MultiIndex::unit(n, j), uniform(rng, -1, 1));
  }
  p.K = FeasibleSet(n);
  for (int i = 0; i < n; ++i) p.K.add_equality(x(n, i).pow(2) - x(n, i));
  p.y = Point(n);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < n; ++i) p.y(i) = coin(rng) ? 1.0 : 0.0;
  p.d = 2;
  return p;
}

}  // namespace invpop::instances
