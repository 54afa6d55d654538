#pragma once

#include <variant>
#include <vector>

#include "zite/basis.hpp"

namespace zite {

/// Constant-coefficient disk problem whose eigenvalues are the positive roots of
///   d_m(k) = k sqrt(n) J_m'(k sqrt(n)) - (eta + m) J_m(k sqrt(n)),  m >= 0.
struct DispersionQuery {
  double n = 4.0;
  double eta = 1.0;
  int m_max = 5;
  double k_lo = 1e-3;
  double k_hi = 6.0;
  double scan_step = 1e-3;

  /// std::invalid_argument unless n, eta finite positive, 0 < k_lo < k_hi,
  /// m_max >= 0 and scan_step > 0.
  void validate() const;
};

[[nodiscard]] double dispersion_value(const DispersionQuery& q, int m, double k);

struct DispersionRoot {
  double k = 0.0;
  int m = 0;
  /// Width of the final bisection bracket.
  double bracket_width = 0.0;
};

/// Smallest `count` roots over 0 <= m <= m_max inside [k_lo, k_hi], by sign
/// scan and bisection, merged and sorted. NumericalError if the window holds
/// fewer than `count` roots.
[[nodiscard]] std::vector<DispersionRoot> exact_eigenvalues(const DispersionQuery& q, int count);

enum class LimitKind { ModifiedDirichlet, ModifiedPlateBuckling };

struct LimitEigenvalue {
  double tau = 0.0;
  LimitKind kind = LimitKind::ModifiedDirichlet;
  /// Angular order m on the disk; first sine index p on the square.
  int mode = 0;
  /// Radial root index on the disk; second sine index on the square.
  int mode_q = 1;
};

/// Large-eta limit spectrum: Delta v + tau^2 n v = 0, v in H_0^1.
/// Disk: tau = j_{m,q} / sqrt(n). Square: tau = pi sqrt(p^2 + q^2) / sqrt(n).
/// Each (m, q) is listed once even though m >= 1 modes are double on the disk.
[[nodiscard]] std::vector<LimitEigenvalue> modified_dirichlet(DomainKind domain, double n, int count);

struct PlateScan {
  int m_max = 5;
  double step = 1e-3;
  /// Scanning stops here; NumericalError if `count` roots were not found.
  double x_max = 200.0;
};

/// x J_m'(x) - m J_m(x); its positive roots give the small-eta limit.
[[nodiscard]] double plate_buckling_function(int m, double x);

/// Small-eta limit spectrum on the disk: roots x > 0 of x J_m'(x) - m J_m(x)
/// for 0 <= m <= m_max, tau = x / sqrt(n). The trivial root x = 0 is
/// excluded by starting the scan at 1e-6. Disk only.
[[nodiscard]] std::vector<LimitEigenvalue> modified_plate_buckling(DomainKind domain, double n,
                                                                   int count, PlateScan scan = {});

enum class Regime { LargeEta, SmallEta };

/// Inverts the exact scaling tau_1(n) = tau_1(1) / sqrt(n).
struct ClosedForm {};

/// Least-squares polynomial fit of tau_1 over equally spaced constant n,
/// inverted by bisection.
struct PolyFit {
  int degree = 4;
  int samples = 51;
  double n_lo = 2.0;
  double n_hi = 7.0;
};

using EstimationMethod = std::variant<ClosedForm, PolyFit>;

/// First limit eigenvalue tau_1(n) for the regime's limit problem.
[[nodiscard]] double limit_tau1(Regime regime, DomainKind domain, double n);

/// Constant n_approx with tau_1(n_approx) = k1.
/// std::invalid_argument for SmallEta on the square (no limit spectrum) or bad
/// parameters; NumericalError when k1 is outside the fitted range of tau_1.
[[nodiscard]] double estimate_n(double k1, Regime regime, DomainKind domain,
                                const EstimationMethod& method = ClosedForm{});

[[nodiscard]] const char* to_string(Regime regime);

}  // namespace zite
