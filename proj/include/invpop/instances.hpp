#pragma once

// Bundled regression instances and seeded random families used by the
// acceptance suite and the tests.

#include <random>
#include <string>
#include <vector>

#include "invpop/inverse.hpp"

namespace invpop::instances {

/// x1 x2 >= 1 with 1/2 <= x_i <= 2 as four affine constraints; f = x1 + x2, y = (1,1).
InverseProblem ex1a();
/// Same set with product-form bounds (x_i - 1/2)(2 - x_i) >= 0.
InverseProblem ex1b();
/// ex1b at y = (1.1, 1/1.1), d = 2.
InverseProblem ex2();
/// f = -x1 - x2^2 on x1 x2 >= 1, x1^2 + x2^2 <= 3 at y = (-0.63, -1/0.63).
InverseProblem ex3a();
/// Same at y = (-0.63, -sqrt(3 - 0.63^2)).
InverseProblem ex3b();
/// x'Ax with A_ij = 1/2 off the diagonal on {-1,1}^5 at (1,1,1,-1,-1), d = 1,
/// quadratic-form pinning.
InverseProblem maxcut5();
/// f = x1 + x2 on {0,1}^2 at y = (1,1).
InverseProblem bool2();

struct Named {
  std::string name;
  InverseProblem problem;
};
std::vector<Named> bundled();

/// Pins every x_i and x_i^2, leaving only the products x_i x_j free.
void pin_quadratic_form(InverseProblem& p);

/// Random coefficients in [-1,1] on every monomial of degree <= deg.
Polynomiald random_polynomial(int n, int deg, std::mt19937& rng);

/// n = 2, deg f <= 4, K = {ellipse >= 0, random quadratic >= 0} with interior, d = 2.
InverseProblem random_quadratic_set(std::mt19937& rng);
/// n = 2, K = {random ellipse >= 0} intersected with [-1,1]^2 (explicit
/// constraints), assume_box set, d = 2, deg f <= 3.
InverseProblem random_box(std::mt19937& rng);
/// n = 3 quadratic f on {0,1}^3 at a random vertex, d = 2.
InverseProblem random_zero_one(std::mt19937& rng);

}  // namespace invpop::instances
