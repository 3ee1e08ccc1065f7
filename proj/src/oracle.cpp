#include "invpop/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace invpop::oracle {

namespace {

void check_box(const Box& box, int n) {
  if (static_cast<int>(box.lower.size()) != n || static_cast<int>(box.upper.size()) != n)
    throw std::invalid_argument("box dimension does not match the variable count");
  for (int i = 0; i < n; ++i)
    if (!(box.lower[static_cast<size_t>(i)] <= box.upper[static_cast<size_t>(i)]) ||
        !std::isfinite(box.lower[static_cast<size_t>(i)]) || !std::isfinite(box.upper[static_cast<size_t>(i)]))
      throw std::invalid_argument("box bounds must be finite with lower <= upper");
}

bool lex_less(const Point& a, const Point& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

struct Incumbent {
  double value = std::numeric_limits<double>::infinity();
  Point x;
  void offer(double v, const Point& p) {
    if (v < value || (v == value && x.size() > 0 && lex_less(p, x))) {
      value = v;
      x = p;
    }
  }
};

// One pass over lower + k*step within [lo, hi].
void scan(const Polynomiald& f, const FeasibleSet& K, const std::vector<double>& lo, const std::vector<double>& hi,
          double step, const GridOptions& opt, Incumbent& best, long long& samples, long long& feasible) {
  const int n = f.num_vars();
  std::vector<long long> count(static_cast<size_t>(n));
  long double total = 1;
  for (int i = 0; i < n; ++i) {
    count[static_cast<size_t>(i)] =
        static_cast<long long>(std::floor((hi[static_cast<size_t>(i)] - lo[static_cast<size_t>(i)]) / step + 1e-9)) + 1;
    total *= static_cast<long double>(count[static_cast<size_t>(i)]);
  }
  if (total > static_cast<long double>(opt.max_points))
    throw std::invalid_argument("grid has " + std::to_string(static_cast<double>(total)) +
                                " points; use a larger step or a smaller box");
  std::vector<long long> k(static_cast<size_t>(n), 0);
  Point x(n);
  for (;;) {
    for (int i = 0; i < n; ++i)
      x(i) = lo[static_cast<size_t>(i)] + static_cast<double>(k[static_cast<size_t>(i)]) * step;
    ++samples;
    if (K.violation(x) <= opt.feas_tol) {
      ++feasible;
      best.offer(f(x), x);
    }
    int i = n - 1;
    while (i >= 0 && ++k[static_cast<size_t>(i)] == count[static_cast<size_t>(i)]) k[static_cast<size_t>(i--)] = 0;
    if (i < 0) break;
  }
}

}  // namespace

OracleResult grid_min(const Polynomiald& f, const FeasibleSet& K, const Box& box, double step,
                      const GridOptions& opt) {
  const int n = f.num_vars();
  if (K.num_vars() != n) throw std::invalid_argument("grid_min: dimension mismatch");
  if (!(step > 0.0)) throw std::invalid_argument("grid_min: step must be positive");
  check_box(box, n);
  OracleResult r;
  Incumbent best;
  scan(f, K, box.lower, box.upper, step, opt, best, r.samples, r.feasible);
  if (best.x.size() == 0)
    throw std::runtime_error("grid_min: no feasible grid point at step " + format_number(step, 6) +
                             "; try a finer step");
  r.resolution = step;
  if (opt.refine) {
    std::vector<double> lo(static_cast<size_t>(n)), hi(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      lo[static_cast<size_t>(i)] = std::max(box.lower[static_cast<size_t>(i)], best.x(i) - step);
      hi[static_cast<size_t>(i)] = std::min(box.upper[static_cast<size_t>(i)], best.x(i) + step);
    }
    scan(f, K, lo, hi, step / 10.0, opt, best, r.samples, r.feasible);
    r.resolution = step / 10.0;
  }
  r.value = best.value;
  r.argmin = best.x;
  return r;
}

OracleResult enumerate_min(const Polynomiald& f, const FeasibleSet& K,
                           const std::vector<std::vector<double>>& values, double feas_tol) {
  const int n = f.num_vars();
  if (static_cast<int>(values.size()) != n) throw std::invalid_argument("enumerate_min: dimension mismatch");
  for (const auto& v : values)
    if (v.empty()) throw std::invalid_argument("enumerate_min: empty value set");
  OracleResult r;
  Incumbent best;
  std::vector<size_t> k(static_cast<size_t>(n), 0);
  Point x(n);
  for (;;) {
    for (int i = 0; i < n; ++i) x(i) = values[static_cast<size_t>(i)][k[static_cast<size_t>(i)]];
    ++r.samples;
    if (K.violation(x) <= feas_tol) {
      ++r.feasible;
      best.offer(f(x), x);
    }
    int i = n - 1;
    while (i >= 0 && ++k[static_cast<size_t>(i)] == values[static_cast<size_t>(i)].size())
      k[static_cast<size_t>(i--)] = 0;
    if (i < 0) break;
  }
  if (best.x.size() == 0) throw std::runtime_error("enumerate_min: no feasible point");
  r.value = best.value;
  r.argmin = best.x;
  return r;
}

std::vector<std::vector<double>> binary_values(const FeasibleSet& K) {
  const int n = K.num_vars();
  std::vector<std::vector<double>> vals(static_cast<size_t>(n));
  for (const auto& h : K.equalities()) {
    if (h.num_terms() != 2) continue;
    for (int i = 0; i < n; ++i) {
      double a = h.coeff(MultiIndex::unit(n, i, 2));
      if (a == 0.0) continue;
      if (h.coeff(MultiIndex::unit(n, i)) == -a) vals[static_cast<size_t>(i)] = {0.0, 1.0};
      else if (h.constant_term() == -a) vals[static_cast<size_t>(i)] = {-1.0, 1.0};
    }
  }
  for (const auto& v : vals)
    if (v.empty()) return {};
  return vals;
}

double radical_inverse(long long i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

SampleResult sample_min(const Polynomiald& p, const FeasibleSet& K, const Box& box, long long N,
                        std::uint32_t seed, double feas_tol) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  const int n = p.num_vars();
  if (n > static_cast<int>(std::size(kPrimes))) throw std::invalid_argument("sample_min: too many variables");
  if (N <= 0) throw std::invalid_argument("sample_min: N must be positive");
  check_box(box, n);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> rot(static_cast<size_t>(n));
  for (auto& r : rot) r = unif(rng);

  SampleResult out;
  out.value = std::numeric_limits<double>::infinity();
  Point x(n);
  for (long long s = 1; s <= N; ++s) {
    for (int i = 0; i < n; ++i) {
      double u = radical_inverse(s, kPrimes[i]) + rot[static_cast<size_t>(i)];
      u -= std::floor(u);
      x(i) = box.lower[static_cast<size_t>(i)] + u * (box.upper[static_cast<size_t>(i)] - box.lower[static_cast<size_t>(i)]);
    }
    ++out.samples;
    if (K.violation(x) > feas_tol) continue;
    ++out.feasible;
    double v = p(x);
    if (v < out.value) {
      out.value = v;
      out.argmin = x;
    }
  }
  if (out.feasible * 100 < N)
    out.warning = "only " + std::to_string(out.feasible) + " of " + std::to_string(N) + " samples lie in K";
  return out;
}

}  // namespace invpop::oracle
