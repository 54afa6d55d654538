#pragma once

#include <array>
#include <vector>

namespace zite {

/// Nodes and weights of a one-dimensional quadrature rule.
///
/// Gauss-Legendre rules live on [-1, 1]; use `mapped()` to move them to an
/// arbitrary interval. Periodic rules produced by `periodic_trapezoid` are
/// already laid out on [0, 2*pi).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] int order() const { return static_cast<int>(nodes.size()); }

  /// Affine image of the rule on [a, b]. Only meaningful for [-1,1] rules.
  [[nodiscard]] QuadratureRule mapped(double a, double b) const;
};

inline constexpr int kDefaultQuadratureOrder = 12;
inline constexpr int kMaxGaussLegendreOrder = 128;

/// Bessel function of the first kind J_p(x), integer p >= 0, real x >= 0.
///
/// Small arguments (x <= 1) use the ascending series; otherwise Miller's
/// downward recurrence normalized with J_0 + 2 sum J_2k = 1. Validated to
/// 1e-12 relative error (away from zeros) for x <= 200.
/// Throws std::domain_error for negative p, negative or non-finite x.
[[nodiscard]] double bessel_j(int p, double x);

/// J_p'(x) from J_0' = -J_1 and J_p' = (p/x) J_p - J_{p+1}.
[[nodiscard]] double bessel_j_prime(int p, double x);

/// {J_p(x), J_{p+1}(x)} from one evaluation.
[[nodiscard]] std::array<double, 2> bessel_j_pair(int p, double x);

/// The q-th positive zero j_{p,q} of J_p, absolute error below 1e-12.
[[nodiscard]] double bessel_zero(int p, int q);

/// The first `count` positive zeros of J_p in increasing order.
///
/// Zeros of J_0 are bracketed around McMahon's estimate; higher orders use
/// the interlacing j_{p-1,q} < j_{p,q} < j_{p-1,q+1}. A coarse sign scan is
/// the fallback when a bracket fails to change sign. Each root is refined by
/// bisection. Throws std::runtime_error if no bracket can be found.
[[nodiscard]] std::vector<double> bessel_zeros(int p, int count);

/// Gauss-Legendre rule with `order` nodes on [-1, 1], 1 <= order <= 128.
/// Nodes are returned in increasing order.
[[nodiscard]] QuadratureRule gauss_legendre(int order);

/// Equally weighted rule on [0, 2*pi) with `count` nodes; exact for
/// trigonometric polynomials of degree < count.
[[nodiscard]] QuadratureRule periodic_trapezoid(int count);

/// Bisection on a bracket [lo, hi] with f(lo) f(hi) <= 0. Stops once the
/// bracket is no wider than `tol` (or stops shrinking in floating point)
/// and returns the final bracket.
struct Bracket {
  double lo;
  double hi;
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
  [[nodiscard]] double width() const { return hi - lo; }
};

template <typename F>
Bracket bisect(F&& f, double lo, double hi, double tol = 1e-12) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return {mid, mid};
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

}  // namespace zite
