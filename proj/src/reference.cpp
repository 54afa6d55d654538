#include "zite/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

#include <Eigen/Dense>

#include "zite/errors.hpp"
#include "zite/specfun.hpp"

namespace zite {

namespace {

constexpr double kRootTol = 1e-12;

struct ScannedRoot {
  double x;
  int m;
  double width;
};

// Sign scan of f on lo + i*step, i = 0..ceil((hi-lo)/step); exact zeros at
// grid nodes are skipped and the neighbouring sign change is bisected instead.
template <typename F>
void scan_roots(F&& f, int m, double lo, double hi, double step, std::vector<ScannedRoot>& out) {
  const auto steps = static_cast<long>(std::ceil((hi - lo) / step));
  double prev_x = lo;
  double prev_f = f(lo);
  for (long i = 1; i <= steps; ++i) {
    const double x = std::min(hi, lo + static_cast<double>(i) * step);
    const double fx = f(x);
    if (fx == 0.0) continue;
    if (prev_f != 0.0 && (fx < 0.0) != (prev_f < 0.0)) {
      const Bracket b = bisect(f, prev_x, x, kRootTol);
      out.push_back({b.mid(), m, b.width()});
    }
    prev_x = x;
    prev_f = fx;
  }
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string(what) + " must be finite and positive");
  }
}

}  // namespace

void DispersionQuery::validate() const {
  require_positive(n, "refractive index n");
  require_positive(eta, "conductivity eta");
  require_positive(k_lo, "k_lo");
  require_positive(scan_step, "scan step");
  if (!(k_hi > k_lo) || !std::isfinite(k_hi)) throw std::invalid_argument("need k_lo < k_hi");
  if (m_max < 0) throw std::invalid_argument("m_max must be >= 0");
}

double dispersion_value(const DispersionQuery& q, int m, double k) {
  const int am = std::abs(m);
  const double x = k * std::sqrt(q.n);
  const auto j = bessel_j_pair(am, x);
  const double jp = am == 0 ? -j[1] : am / x * j[0] - j[1];
  return x * jp - (q.eta + am) * j[0];
}

std::vector<DispersionRoot> exact_eigenvalues(const DispersionQuery& q, int count) {
  q.validate();
  if (count < 1) throw std::invalid_argument("exact_eigenvalues: count must be >= 1");
  std::vector<ScannedRoot> found;
  for (int m = 0; m <= q.m_max; ++m) {
    scan_roots([&](double k) { return dispersion_value(q, m, k); }, m, q.k_lo, q.k_hi,
               q.scan_step, found);
  }
  std::sort(found.begin(), found.end(),
            [](const ScannedRoot& a, const ScannedRoot& b) { return std::tie(a.x, a.m) < std::tie(b.x, b.m); });
  if (static_cast<int>(found.size()) < count) {
    throw NumericalError("exact_eigenvalues: found " + std::to_string(found.size()) +
                         " roots in [" + std::to_string(q.k_lo) + ", " + std::to_string(q.k_hi) +
                         "], wanted " + std::to_string(count));
  }
  std::vector<DispersionRoot> out;
  for (int i = 0; i < count; ++i) out.push_back({found[i].x, found[i].m, found[i].width});
  return out;
}

std::vector<LimitEigenvalue> modified_dirichlet(DomainKind domain, double n, int count) {
  require_positive(n, "refractive index n");
  if (count < 1) throw std::invalid_argument("modified_dirichlet: count must be >= 1");
  const double scale = 1.0 / std::sqrt(n);
  std::vector<LimitEigenvalue> out;
  if (domain == DomainKind::UnitSquare) {
    for (int p = 1; p <= count; ++p) {
      for (int q = 1; q <= count; ++q) {
        out.push_back({std::numbers::pi * std::sqrt(static_cast<double>(p * p + q * q)) * scale,
                       LimitKind::ModifiedDirichlet, p, q});
      }
    }
  } else {
    // j_{m,1} grows with m, so stop once it exceeds the count-th candidate.
    for (int m = 0;; ++m) {
      const auto zeros = bessel_zeros(m, count);
      if (static_cast<int>(out.size()) >= count) {
        std::vector<double> taus;
        for (const auto& e : out) taus.push_back(e.tau);
        std::nth_element(taus.begin(), taus.begin() + (count - 1), taus.end());
        if (zeros.front() * scale > taus[count - 1]) break;
      }
      for (int q = 1; q <= count; ++q) {
        out.push_back({zeros[q - 1] * scale, LimitKind::ModifiedDirichlet, m, q});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const LimitEigenvalue& a, const LimitEigenvalue& b) {
    return std::tie(a.tau, a.mode, a.mode_q) < std::tie(b.tau, b.mode, b.mode_q);
  });
  out.resize(count);
  return out;
}

double plate_buckling_function(int m, double x) {
  const int am = std::abs(m);
  const auto j = bessel_j_pair(am, x);
  const double jp = am == 0 ? -j[1] : am / x * j[0] - j[1];
  return x * jp - am * j[0];
}

std::vector<LimitEigenvalue> modified_plate_buckling(DomainKind domain, double n, int count,
                                                     PlateScan scan) {
  if (domain != DomainKind::UnitDisk) {
    throw std::invalid_argument("modified plate buckling spectrum is only available on the disk");
  }
  require_positive(n, "refractive index n");
  require_positive(scan.step, "scan step");
  if (count < 1) throw std::invalid_argument("modified_plate_buckling: count must be >= 1");
  if (scan.m_max < 0) throw std::invalid_argument("m_max must be >= 0");

  constexpr double kOrigin = 1e-6;
  constexpr double kChunk = 5.0;
  std::vector<ScannedRoot> found;
  // Every root in a finished chunk is smaller than any root beyond it, so
  // scanning stops at the first chunk end with enough roots behind it.
  for (double lo = kOrigin; lo < scan.x_max && static_cast<int>(found.size()) < count; lo += kChunk) {
    const double hi = std::min(scan.x_max, lo + kChunk);
    for (int m = 0; m <= scan.m_max; ++m) {
      scan_roots([m](double x) { return plate_buckling_function(m, x); }, m, lo, hi, scan.step, found);
    }
  }
  if (static_cast<int>(found.size()) < count) {
    throw NumericalError("modified_plate_buckling: found " + std::to_string(found.size()) +
                         " roots below x = " + std::to_string(scan.x_max) + ", wanted " +
                         std::to_string(count));
  }
  std::sort(found.begin(), found.end(),
            [](const ScannedRoot& a, const ScannedRoot& b) { return std::tie(a.x, a.m) < std::tie(b.x, b.m); });
  const double scale = 1.0 / std::sqrt(n);
  std::vector<LimitEigenvalue> out;
  std::vector<int> per_m(scan.m_max + 1, 0);
  for (const auto& r : found) {
    const int q = ++per_m[r.m];
    out.push_back({r.x * scale, LimitKind::ModifiedPlateBuckling, r.m, q});
  }
  out.resize(count);
  return out;
}

double limit_tau1(Regime regime, DomainKind domain, double n) {
  if (regime == Regime::LargeEta) return modified_dirichlet(domain, n, 1).front().tau;
  return modified_plate_buckling(domain, n, 1).front().tau;
}

const char* to_string(Regime regime) {
  return regime == Regime::LargeEta ? "large_eta" : "small_eta";
}

double estimate_n(double k1, Regime regime, DomainKind domain, const EstimationMethod& method) {
  require_positive(k1, "k1");
  if (regime == Regime::SmallEta && domain != DomainKind::UnitDisk) {
    throw std::invalid_argument("small-eta estimation is unsupported on the square "
                                "(no plate buckling spectrum is implemented there)");
  }
  if (std::holds_alternative<ClosedForm>(method)) {
    const double tau1 = limit_tau1(regime, domain, 1.0);
    const double ratio = tau1 / k1;
    return ratio * ratio;
  }

  const auto& fit = std::get<PolyFit>(method);
  if (fit.degree < 1) throw std::invalid_argument("polyfit degree must be >= 1");
  if (fit.samples <= fit.degree) throw std::invalid_argument("polyfit needs more samples than degree");
  require_positive(fit.n_lo, "n_lo");
  if (!(fit.n_hi > fit.n_lo)) throw std::invalid_argument("polyfit needs n_lo < n_hi");

  // Fit in u = (2n - lo - hi)/(hi - lo) in [-1, 1] to keep the Vandermonde
  // matrix well conditioned.
  const double mid = 0.5 * (fit.n_lo + fit.n_hi);
  const double half = 0.5 * (fit.n_hi - fit.n_lo);
  Eigen::MatrixXd vander(fit.samples, fit.degree + 1);
  Eigen::VectorXd tau(fit.samples);
  for (int s = 0; s < fit.samples; ++s) {
    const double u = -1.0 + 2.0 * s / (fit.samples - 1);
    tau(s) = limit_tau1(regime, domain, mid + half * u);
    double pw = 1.0;
    for (int d = 0; d <= fit.degree; ++d) {
      vander(s, d) = pw;
      pw *= u;
    }
  }
  const Eigen::VectorXd coef = vander.colPivHouseholderQr().solve(tau);
  auto poly = [&](double u) {
    double acc = 0.0;
    for (int d = fit.degree; d >= 0; --d) acc = acc * u + coef(d);
    return acc;
  };
  const double top = poly(-1.0);
  const double bottom = poly(1.0);
  if (k1 > std::max(top, bottom) || k1 < std::min(top, bottom)) {
    throw NumericalError("k1 = " + std::to_string(k1) + " lies outside the fitted range of tau_1 over n in [" +
                         std::to_string(fit.n_lo) + ", " + std::to_string(fit.n_hi) + "]");
  }
  const Bracket b = bisect([&](double u) { return poly(u) - k1; }, -1.0, 1.0, 1e-15);
  return mid + half * b.mid();
}

}  // namespace zite
