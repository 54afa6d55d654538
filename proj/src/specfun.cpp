#include "zite/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace zite {

namespace {

void check_args(int p, double x) {
  if (p < 0) throw std::domain_error("bessel: negative order " + std::to_string(p));
  if (!std::isfinite(x) || x < 0.0) {
    throw std::domain_error("bessel: argument must be finite and non-negative");
  }
}

double series_j(int p, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= p; ++k) term *= half / k;
  double sum = term;
  const double h2 = half * half;
  for (int k = 1; k < 200; ++k) {
    term *= -h2 / (static_cast<double>(k) * (k + p));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's algorithm. The recurrence start index is chosen so that
// J_start(x) is negligible for every x <= 200 the library is validated on.
// Returns J_p(x) and J_{p+1}(x) from the same normalized sweep.
std::array<double, 2> miller_pair(int p, double x) {
  constexpr double kBig = 1e200;
  constexpr double kSmall = 1e-200;
  const double scale = std::max(static_cast<double>(p + 1), x);
  const int start = 2 * ((static_cast<int>(scale + 30.0 + std::sqrt(60.0 * scale)) + 1) / 2);
  const double two_over_x = 2.0 / x;
  double next = 0.0;  // J_{k+1}
  double cur = 1.0;   // J_k
  double wanted = 0.0;
  double wanted_next = 0.0;
  double even_sum = 0.0;
  bool add = false;
  for (int k = start; k > 0; --k) {
    const double prev = k * two_over_x * cur - next;
    next = cur;
    cur = prev;  // now J_{k-1}
    if (std::abs(cur) > kBig) {
      cur *= kSmall;
      next *= kSmall;
      wanted *= kSmall;
      wanted_next *= kSmall;
      even_sum *= kSmall;
    }
    if (add) even_sum += cur;
    add = !add;
    if (k == p + 1) {
      wanted = cur;
      wanted_next = next;
    }
  }
  const double norm = 2.0 * even_sum - cur;
  if (p == 0) wanted = cur;
  return {wanted / norm, wanted_next / norm};
}

double mcmahon_j0(int q) { return (q - 0.25) * std::numbers::pi; }

double refine_zero(int p, double lo, double hi) {
  auto f = [p](double x) { return bessel_j(p, x); };
  return bisect(f, lo, hi, 0.0).mid();
}

bool changes_sign(int p, double lo, double hi) {
  const double a = bessel_j(p, lo);
  const double b = bessel_j(p, hi);
  return (a < 0.0) != (b < 0.0) && a != 0.0 && b != 0.0;
}

// Sign scan from `from` for the first zero of J_p; used when a structured
// bracket fails.
double scan_zero(int p, double from) {
  constexpr double kStep = 0.05;
  constexpr double kSpan = 40.0;
  double a = from;
  double fa = bessel_j(p, a);
  for (double b = a + kStep; b <= from + kSpan; b += kStep) {
    const double fb = bessel_j(p, b);
    if (fa == 0.0) return a;
    if ((fa < 0.0) != (fb < 0.0)) return refine_zero(p, a, b);
    a = b;
    fa = fb;
  }
  throw std::runtime_error("bessel_zero: no sign change of J_" + std::to_string(p) +
                           " found in [" + std::to_string(from) + ", " +
                           std::to_string(from + kSpan) + "]");
}

}  // namespace

QuadratureRule QuadratureRule::mapped(double a, double b) const {
  QuadratureRule out;
  out.nodes.reserve(nodes.size());
  out.weights.reserve(weights.size());
  const double half = 0.5 * (b - a);
  const double centre = 0.5 * (a + b);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.nodes.push_back(centre + half * nodes[i]);
    out.weights.push_back(half * weights[i]);
  }
  return out;
}

std::array<double, 2> bessel_j_pair(int p, double x) {
  check_args(p, x);
  if (x == 0.0) return {p == 0 ? 1.0 : 0.0, 0.0};
  if (x <= 1.0) return {series_j(p, x), series_j(p + 1, x)};
  return miller_pair(p, x);
}

double bessel_j(int p, double x) { return bessel_j_pair(p, x)[0]; }

double bessel_j_prime(int p, double x) {
  check_args(p, x);
  if (p == 0) return -bessel_j(1, x);
  if (x == 0.0) return p == 1 ? 0.5 : 0.0;
  const auto j = bessel_j_pair(p, x);
  return p / x * j[0] - j[1];
}

std::vector<double> bessel_zeros(int p, int count) {
  if (p < 0) throw std::domain_error("bessel_zeros: negative order");
  if (count < 1) throw std::domain_error("bessel_zeros: count must be positive");

  // Row k holds count + p - k zeros of J_k, enough to bracket row k + 1.
  std::vector<double> row;
  const int first_len = count + p;
  row.reserve(first_len);
  for (int q = 1; q <= first_len; ++q) {
    const double guess = mcmahon_j0(q);
    const double lo = guess - 0.5;
    const double hi = guess + 0.5;
    row.push_back(changes_sign(0, lo, hi) ? refine_zero(0, lo, hi)
                                          : scan_zero(0, q == 1 ? 1e-3 : row.back() + 1e-3));
  }
  for (int k = 1; k <= p; ++k) {
    std::vector<double> next;
    const int len = count + p - k;
    next.reserve(len);
    for (int q = 0; q < len; ++q) {
      const double lo = row[q];
      const double hi = row[q + 1];
      if (changes_sign(k, lo, hi)) {
        next.push_back(refine_zero(k, lo, hi));
      } else {
        next.push_back(scan_zero(k, q == 0 ? lo : next.back() + 1e-3));
      }
    }
    row = std::move(next);
  }
  row.resize(count);
  return row;
}

double bessel_zero(int p, int q) {
  if (q < 1) throw std::domain_error("bessel_zero: root index must be >= 1");
  return bessel_zeros(p, q).back();
}

QuadratureRule gauss_legendre(int order) {
  if (order < 1 || order > kMaxGaussLegendreOrder) {
    throw std::domain_error("gauss_legendre: order " + std::to_string(order) +
                            " outside [1, " + std::to_string(kMaxGaussLegendreOrder) + "]");
  }
  const int n = order;
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    if (2 * i + 1 == n) x = 0.0;
    // Recompute P_n' at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  return rule;
}

QuadratureRule periodic_trapezoid(int count) {
  if (count < 1) throw std::domain_error("periodic_trapezoid: count must be positive");
  QuadratureRule rule;
  rule.nodes.resize(count);
  rule.weights.assign(count, 2.0 * std::numbers::pi / count);
  for (int i = 0; i < count; ++i) rule.nodes[i] = 2.0 * std::numbers::pi * i / count;
  return rule;
}

}  // namespace zite
