#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zite/basis.hpp"

namespace zite {

enum class IndexFamily {
  Constant,         // c
  RadialExpBump,    // a + b exp(-r^2)
  PiecewiseRadial,  // inner for r < r0, outer for r0 <= r
  SeparablePoly,    // (a x1^2 + b)(a x2^2 + b), square only
};

enum class ConductivityFamily {
  Constant,        // c
  InverseAngular,  // 1 / (a + b sin^2(2 theta)), disk only
  ScaledAngular,   // a (2 + b sin^4(theta)), disk only
};

/// Closed interval of coefficient values.
struct ValueRange {
  double min = 0.0;
  double max = 0.0;
};

/// Refractive index n on D, one of a closed set of named families.
class RefractiveIndex {
 public:
  [[nodiscard]] static RefractiveIndex constant(double c);
  [[nodiscard]] static RefractiveIndex radial_exp_bump(double a, double b);
  [[nodiscard]] static RefractiveIndex piecewise_radial(double r0, double inner, double outer);
  [[nodiscard]] static RefractiveIndex separable_poly(double a = 0.5, double b = 2.0);

  /// Builds a family from its config tag ("constant", "radial_exp_bump",
  /// "piecewise_radial", "separable_poly") and parameter list.
  [[nodiscard]] static RefractiveIndex from_tag(std::string_view tag, std::span<const double> params);

  [[nodiscard]] IndexFamily family() const { return family_; }
  [[nodiscard]] const std::vector<double>& params() const { return params_; }
  [[nodiscard]] std::string tag() const;
  [[nodiscard]] bool is_constant() const { return family_ == IndexFamily::Constant; }
  /// Radius of the discontinuity for PiecewiseRadial.
  [[nodiscard]] std::optional<double> jump_radius() const;

  [[nodiscard]] bool valid_on(DomainKind kind) const;
  /// Exact extrema over the closed domain.
  [[nodiscard]] ValueRange analytic_range(DomainKind kind) const;

  [[nodiscard]] double at(Point x) const;

 private:
  RefractiveIndex(IndexFamily family, std::vector<double> params);
  IndexFamily family_;
  std::vector<double> params_;
};

/// Conductivity eta on the boundary of D.
class Conductivity {
 public:
  [[nodiscard]] static Conductivity constant(double c);
  [[nodiscard]] static Conductivity inverse_angular(double a, double b);
  [[nodiscard]] static Conductivity scaled_angular(double a, double b);

  /// Tags: "constant", "inverse_angular", "scaled_angular".
  [[nodiscard]] static Conductivity from_tag(std::string_view tag, std::span<const double> params);

  [[nodiscard]] ConductivityFamily family() const { return family_; }
  [[nodiscard]] const std::vector<double>& params() const { return params_; }
  [[nodiscard]] std::string tag() const;
  [[nodiscard]] bool is_constant() const { return family_ == ConductivityFamily::Constant; }

  [[nodiscard]] bool valid_on(DomainKind kind) const;
  [[nodiscard]] ValueRange analytic_range(DomainKind kind) const;

  [[nodiscard]] double at(const BoundaryPoint& b) const;

 private:
  Conductivity(ConductivityFamily family, std::vector<double> params);
  ConductivityFamily family_;
  std::vector<double> params_;
};

inline constexpr double kMinCoefficient = 1e-6;

/// The coefficient fields entering the forms a and b.
struct CoefficientPair {
  RefractiveIndex n;
  Conductivity eta;

  /// Rejects family/domain mismatches and coefficients that are not
  /// uniformly positive (min < kMinCoefficient). std::invalid_argument.
  void validate(DomainKind kind) const;
};

[[nodiscard]] inline double n_at(const RefractiveIndex& n, Point x) { return n.at(x); }
[[nodiscard]] inline double eta_at(const Conductivity& eta, const BoundaryPoint& b) {
  return eta.at(b);
}

/// Mean of n over the domain, |D|^{-1} int_D n dx, by quadrature split at
/// any jump radius.
[[nodiscard]] double average_value(const RefractiveIndex& n, const Domain& domain);

/// Min and max of n over a uniform sample grid of the closed domain
/// (polar grid on the disk, Cartesian on the square), `resolution` points
/// per direction.
[[nodiscard]] ValueRange sampled_range(const RefractiveIndex& n, DomainKind kind,
                                       int resolution = 201);
[[nodiscard]] ValueRange sampled_range(const Conductivity& eta, DomainKind kind,
                                       int resolution = 801);

}  // namespace zite
