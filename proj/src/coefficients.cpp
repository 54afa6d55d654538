#include "zite/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <stdexcept>

#include "zite/specfun.hpp"

namespace zite {

namespace {

void require_count(std::string_view tag, std::span<const double> params, std::size_t lo,
                   std::size_t hi) {
  if (params.size() < lo || params.size() > hi) {
    throw std::invalid_argument("coefficient family '" + std::string(tag) +
                                "' got " + std::to_string(params.size()) + " parameters");
  }
}

void require_finite(std::span<const double> params) {
  for (double v : params) {
    if (!std::isfinite(v)) throw std::invalid_argument("coefficient parameters must be finite");
  }
}

}  // namespace

RefractiveIndex::RefractiveIndex(IndexFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
  require_finite(params_);
}

RefractiveIndex RefractiveIndex::constant(double c) { return {IndexFamily::Constant, {c}}; }

RefractiveIndex RefractiveIndex::radial_exp_bump(double a, double b) {
  return {IndexFamily::RadialExpBump, {a, b}};
}

RefractiveIndex RefractiveIndex::piecewise_radial(double r0, double inner, double outer) {
  if (!(r0 > 0.0 && r0 < 1.0)) {
    throw std::invalid_argument("piecewise_radial: jump radius must lie in (0, 1)");
  }
  return {IndexFamily::PiecewiseRadial, {r0, inner, outer}};
}

RefractiveIndex RefractiveIndex::separable_poly(double a, double b) {
  return {IndexFamily::SeparablePoly, {a, b}};
}

RefractiveIndex RefractiveIndex::from_tag(std::string_view tag, std::span<const double> p) {
  if (tag == "constant") {
    require_count(tag, p, 1, 1);
    return constant(p[0]);
  }
  if (tag == "radial_exp_bump") {
    require_count(tag, p, 2, 2);
    return radial_exp_bump(p[0], p[1]);
  }
  if (tag == "piecewise_radial") {
    require_count(tag, p, 3, 3);
    return piecewise_radial(p[0], p[1], p[2]);
  }
  if (tag == "separable_poly") {
    require_count(tag, p, 0, 2);
    if (p.empty()) return separable_poly();
    require_count(tag, p, 2, 2);
    return separable_poly(p[0], p[1]);
  }
  throw std::invalid_argument("unknown refractive index family '" + std::string(tag) + "'");
}

std::string RefractiveIndex::tag() const {
  switch (family_) {
    case IndexFamily::Constant: return "constant";
    case IndexFamily::RadialExpBump: return "radial_exp_bump";
    case IndexFamily::PiecewiseRadial: return "piecewise_radial";
    case IndexFamily::SeparablePoly: return "separable_poly";
  }
  return "unknown";
}

std::optional<double> RefractiveIndex::jump_radius() const {
  if (family_ == IndexFamily::PiecewiseRadial) return params_[0];
  return std::nullopt;
}

bool RefractiveIndex::valid_on(DomainKind kind) const {
  switch (family_) {
    case IndexFamily::PiecewiseRadial:
    case IndexFamily::RadialExpBump: return kind == DomainKind::UnitDisk;
    case IndexFamily::SeparablePoly: return kind == DomainKind::UnitSquare;
    case IndexFamily::Constant: return true;
  }
  return false;
}

ValueRange RefractiveIndex::analytic_range(DomainKind kind) const {
  if (!valid_on(kind)) throw std::invalid_argument("refractive index family not valid here");
  const auto& p = params_;
  switch (family_) {
    case IndexFamily::Constant: return {p[0], p[0]};
    case IndexFamily::RadialExpBump: {
      const double centre = p[0] + p[1];
      const double rim = p[0] + p[1] * std::exp(-1.0);
      return {std::min(centre, rim), std::max(centre, rim)};
    }
    case IndexFamily::PiecewiseRadial: return {std::min(p[1], p[2]), std::max(p[1], p[2])};
    case IndexFamily::SeparablePoly: {
      const double f0 = p[1];
      const double f1 = p[0] + p[1];
      const double lo = std::min(f0, f1);
      const double hi = std::max(f0, f1);
      const double corners[] = {lo * lo, lo * hi, hi * hi};
      return {*std::min_element(std::begin(corners), std::end(corners)),
              *std::max_element(std::begin(corners), std::end(corners))};
    }
  }
  return {};
}

double RefractiveIndex::at(Point x) const {
  const auto& p = params_;
  switch (family_) {
    case IndexFamily::Constant: return p[0];
    case IndexFamily::RadialExpBump: {
      const double r2 = x.x1 * x.x1 + x.x2 * x.x2;
      return p[0] + p[1] * std::exp(-r2);
    }
    case IndexFamily::PiecewiseRadial:
      return std::hypot(x.x1, x.x2) < p[0] ? p[1] : p[2];
    case IndexFamily::SeparablePoly:
      return (p[0] * x.x1 * x.x1 + p[1]) * (p[0] * x.x2 * x.x2 + p[1]);
  }
  return 0.0;
}

Conductivity::Conductivity(ConductivityFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
  require_finite(params_);
}

Conductivity Conductivity::constant(double c) { return {ConductivityFamily::Constant, {c}}; }

Conductivity Conductivity::inverse_angular(double a, double b) {
  return {ConductivityFamily::InverseAngular, {a, b}};
}

Conductivity Conductivity::scaled_angular(double a, double b) {
  return {ConductivityFamily::ScaledAngular, {a, b}};
}

Conductivity Conductivity::from_tag(std::string_view tag, std::span<const double> p) {
  if (tag == "constant") {
    require_count(tag, p, 1, 1);
    return constant(p[0]);
  }
  if (tag == "inverse_angular") {
    require_count(tag, p, 2, 2);
    return inverse_angular(p[0], p[1]);
  }
  if (tag == "scaled_angular") {
    require_count(tag, p, 2, 2);
    return scaled_angular(p[0], p[1]);
  }
  throw std::invalid_argument("unknown conductivity family '" + std::string(tag) + "'");
}

std::string Conductivity::tag() const {
  switch (family_) {
    case ConductivityFamily::Constant: return "constant";
    case ConductivityFamily::InverseAngular: return "inverse_angular";
    case ConductivityFamily::ScaledAngular: return "scaled_angular";
  }
  return "unknown";
}

bool Conductivity::valid_on(DomainKind kind) const {
  return family_ == ConductivityFamily::Constant || kind == DomainKind::UnitDisk;
}

ValueRange Conductivity::analytic_range(DomainKind kind) const {
  if (!valid_on(kind)) throw std::invalid_argument("conductivity family not valid here");
  const auto& p = params_;
  switch (family_) {
    case ConductivityFamily::Constant: return {p[0], p[0]};
    case ConductivityFamily::InverseAngular: {
      const double d_lo = std::min(p[0], p[0] + p[1]);
      const double d_hi = std::max(p[0], p[0] + p[1]);
      if (d_lo <= 0.0) return {-INFINITY, INFINITY};
      return {1.0 / d_hi, 1.0 / d_lo};
    }
    case ConductivityFamily::ScaledAngular: {
      const double v0 = p[0] * 2.0;
      const double v1 = p[0] * (2.0 + p[1]);
      return {std::min(v0, v1), std::max(v0, v1)};
    }
  }
  return {};
}

double Conductivity::at(const BoundaryPoint& b) const {
  const auto& p = params_;
  if (family_ == ConductivityFamily::Constant) return p[0];
  const auto* d = std::get_if<DiskBoundaryPoint>(&b);
  if (d == nullptr) throw std::invalid_argument("angular conductivity needs a disk boundary point");
  const double s = std::sin(d->theta);
  if (family_ == ConductivityFamily::InverseAngular) {
    const double s2 = std::sin(2.0 * d->theta);
    return 1.0 / (p[0] + p[1] * s2 * s2);
  }
  return p[0] * (2.0 + p[1] * s * s * s * s);
}

void CoefficientPair::validate(DomainKind kind) const {
  if (!n.valid_on(kind)) {
    throw std::invalid_argument("refractive index family '" + n.tag() + "' is not defined on the " +
                                to_string(kind));
  }
  if (!eta.valid_on(kind)) {
    throw std::invalid_argument("conductivity family '" + eta.tag() + "' is not defined on the " +
                                to_string(kind));
  }
  if (!(n.analytic_range(kind).min >= kMinCoefficient)) {
    throw std::invalid_argument("refractive index is not uniformly positive");
  }
  if (!(eta.analytic_range(kind).min >= kMinCoefficient)) {
    throw std::invalid_argument("conductivity is not uniformly positive");
  }
}

double average_value(const RefractiveIndex& n, const Domain& domain) {
  if (!n.valid_on(domain.kind)) throw std::invalid_argument("refractive index family not valid here");
  constexpr int kOrder = 64;
  const auto gl = gauss_legendre(kOrder);
  double total = 0.0;
  if (domain.kind == DomainKind::UnitSquare) {
    const auto axis = gl.mapped(0.0, 1.0);
    for (int i = 0; i < kOrder; ++i) {
      for (int k = 0; k < kOrder; ++k) {
        total += axis.weights[i] * axis.weights[k] * n.at({axis.nodes[i], axis.nodes[k]});
      }
    }
    return total;
  }
  std::vector<std::pair<double, double>> segments{{0.0, 1.0}};
  if (const auto r0 = n.jump_radius()) segments = {{0.0, *r0}, {*r0, 1.0}};
  const auto angles = periodic_trapezoid(kOrder);
  for (const auto& [a, b] : segments) {
    const auto radial = gl.mapped(a, b);
    for (int i = 0; i < kOrder; ++i) {
      const double r = radial.nodes[i];
      for (int k = 0; k < kOrder; ++k) {
        const double t = angles.nodes[k];
        total += radial.weights[i] * r * angles.weights[k] * n.at({r * std::cos(t), r * std::sin(t)});
      }
    }
  }
  return total / domain.area();
}

ValueRange sampled_range(const RefractiveIndex& n, DomainKind kind, int resolution) {
  if (resolution < 2) throw std::invalid_argument("sampled_range: resolution must be >= 2");
  ValueRange out{INFINITY, -INFINITY};
  auto take = [&](Point x) {
    const double v = n.at(x);
    out.min = std::min(out.min, v);
    out.max = std::max(out.max, v);
  };
  for (int i = 0; i < resolution; ++i) {
    const double u = static_cast<double>(i) / (resolution - 1);
    for (int k = 0; k < resolution; ++k) {
      const double v = static_cast<double>(k) / (resolution - 1);
      if (kind == DomainKind::UnitDisk) {
        const double t = 2.0 * std::numbers::pi * v;
        take({u * std::cos(t), u * std::sin(t)});
      } else {
        take({u, v});
      }
    }
  }
  return out;
}

ValueRange sampled_range(const Conductivity& eta, DomainKind kind, int resolution) {
  if (resolution < 2) throw std::invalid_argument("sampled_range: resolution must be >= 2");
  ValueRange out{INFINITY, -INFINITY};
  auto take = [&](const BoundaryPoint& b) {
    const double v = eta.at(b);
    out.min = std::min(out.min, v);
    out.max = std::max(out.max, v);
  };
  for (int i = 0; i < resolution; ++i) {
    const double u = static_cast<double>(i) / (resolution - 1);
    if (kind == DomainKind::UnitDisk) {
      take(DiskBoundaryPoint{2.0 * std::numbers::pi * u});
    } else {
      for (int e = 0; e < 4; ++e) take(SquareBoundaryPoint{static_cast<SquareEdge>(e), u});
    }
  }
  return out;
}

}  // namespace zite
