#pragma once

// Small problem instances shared by the unit tests.

#include <cmath>

#include "invpop/certify.hpp"

namespace invpop::testing {

using P = Polynomiald;

inline P var(int n, int i) { return P::variable(n, i); }
inline P cst(int n, double v) { return P::constant(n, v); }

inline Point pt(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

/// x1 x2 >= 1 and 1/2 <= x_i <= 2 as four affine constraints.
inline FeasibleSet ex1_rep_a() {
  FeasibleSet K(2);
  K.add_inequality(var(2, 0) * var(2, 1) - cst(2, 1));
  for (int i = 0; i < 2; ++i) {
    K.add_inequality(var(2, i) - cst(2, 0.5));
    K.add_inequality(cst(2, 2) - var(2, i));
  }
  return K;
}

/// Same set with the bounds as products (x_i - 1/2)(2 - x_i) >= 0.
inline FeasibleSet ex1_rep_b() {
  FeasibleSet K(2);
  K.add_inequality(var(2, 0) * var(2, 1) - cst(2, 1));
  for (int i = 0; i < 2; ++i) K.add_inequality((var(2, i) - cst(2, 0.5)) * (cst(2, 2) - var(2, i)));
  return K;
}

inline P ex1_objective() { return var(2, 0) + var(2, 1); }

/// x1 x2 >= 1, x1^2 + x2^2 <= 3.
inline FeasibleSet ex3_set() {
  FeasibleSet K(2);
  K.add_inequality(var(2, 0) * var(2, 1) - cst(2, 1));
  K.add_inequality(cst(2, 3) - var(2, 0).pow(2) - var(2, 1).pow(2));
  return K;
}

inline P ex3_objective() { return -var(2, 0) - var(2, 1).pow(2); }

/// [-1,1]^n as 1 - x_i^2 >= 0.
inline FeasibleSet unit_box(int n) {
  FeasibleSet K(n);
  for (int i = 0; i < n; ++i) K.add_inequality(cst(n, 1) - var(n, i).pow(2));
  return K;
}

}  // namespace invpop::testing
