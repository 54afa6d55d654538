#include "zite/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

#include "zite/specfun.hpp"

namespace zite {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGeomTol = 1e-12;

BasisFunction make_disk_function(int p, int q, double zero, Parity parity) {
  BasisFunction f;
  f.domain = DomainKind::UnitDisk;
  f.mode_p = p;
  f.mode_q = q;
  f.parity = parity;
  f.sqrt_lambda = zero;
  f.lambda = zero * zero;
  // ||J_p(j r) cos(p t)||^2 = pi J_1(j)^2 for p = 0 and (pi/2) J_{p+1}(j)^2 otherwise.
  const double angular = p == 0 ? kPi : 0.5 * kPi;
  f.norm_const = 1.0 / (std::sqrt(angular) * std::abs(bessel_j(p + 1, zero)));
  return f;
}

BasisFunction make_square_function(int p, int q) {
  BasisFunction f;
  f.domain = DomainKind::UnitSquare;
  f.mode_p = p;
  f.mode_q = q;
  f.parity = Parity::Cosine;
  f.lambda = kPi * kPi * (p * p + q * q);
  f.sqrt_lambda = std::sqrt(f.lambda);
  f.norm_const = 2.0;
  return f;
}

auto order_key(const BasisFunction& f) {
  return std::make_tuple(f.lambda, f.mode_p, f.mode_q, static_cast<int>(f.parity));
}

void check_point(DomainKind kind, Point x) {
  if (kind == DomainKind::UnitDisk) {
    if (std::hypot(x.x1, x.x2) > 1.0 + kGeomTol) {
      throw std::domain_error("point outside the unit disk");
    }
  } else if (x.x1 < -kGeomTol || x.x1 > 1.0 + kGeomTol || x.x2 < -kGeomTol ||
             x.x2 > 1.0 + kGeomTol) {
    throw std::domain_error("point outside the unit square");
  }
}

// J_p(x) / x for p >= 1, finite at x = 0.
double j_over_x(int p, double x) {
  return (bessel_j(p - 1, x) + bessel_j(p + 1, x)) / (2.0 * p);
}

}  // namespace

void Domain::validate() const {
  if (volume_order < kMinOrder || angular_order < kMinOrder || boundary_order < kMinOrder) {
    throw std::invalid_argument("quadrature orders must be >= " + std::to_string(kMinOrder));
  }
  if (volume_order > kMaxGaussLegendreOrder ||
      (kind == DomainKind::UnitSquare && boundary_order > kMaxGaussLegendreOrder)) {
    throw std::invalid_argument("Gauss-Legendre order exceeds " +
                                std::to_string(kMaxGaussLegendreOrder));
  }
}

double Domain::area() const { return kind == DomainKind::UnitDisk ? kPi : 1.0; }

const char* to_string(DomainKind kind) {
  return kind == DomainKind::UnitDisk ? "disk" : "square";
}

Point position(const BoundaryPoint& b) {
  if (const auto* d = std::get_if<DiskBoundaryPoint>(&b)) {
    return {std::cos(d->theta), std::sin(d->theta)};
  }
  const auto& s = std::get<SquareBoundaryPoint>(b);
  switch (s.edge) {
    case SquareEdge::Bottom: return {s.t, 0.0};
    case SquareEdge::Right: return {1.0, s.t};
    case SquareEdge::Top: return {1.0 - s.t, 1.0};
    case SquareEdge::Left: return {0.0, 1.0 - s.t};
  }
  throw std::invalid_argument("unknown square edge");
}

int BasisSet::max_mode_p() const {
  int m = 0;
  for (const auto& f : functions) m = std::max(m, f.mode_p);
  return m;
}

int BasisSet::max_mode_q() const {
  int m = 0;
  for (const auto& f : functions) m = std::max(m, f.mode_q);
  return m;
}

BasisSet build_disk_basis(const Domain& domain, int p_max, int q_max, bool include_sine) {
  if (domain.kind != DomainKind::UnitDisk) {
    throw std::invalid_argument("build_disk_basis requires a disk domain");
  }
  if (p_max < 0 || q_max < 1) {
    throw std::invalid_argument("build_disk_basis: need p_max >= 0 and q_max >= 1");
  }
  domain.validate();
  BasisSet set;
  set.domain = domain;
  set.ordering = BasisOrdering::PaperGrid;
  for (int p = 0; p <= p_max; ++p) {
    const auto zeros = bessel_zeros(p, q_max);
    for (int q = 1; q <= q_max; ++q) {
      set.functions.push_back(make_disk_function(p, q, zeros[q - 1], Parity::Cosine));
    }
    if (include_sine && p >= 1) {
      for (int q = 1; q <= q_max; ++q) {
        set.functions.push_back(make_disk_function(p, q, zeros[q - 1], Parity::Sine));
      }
    }
  }
  return set;
}

BasisSet build_square_basis(const Domain& domain, int p_max, int q_max) {
  if (domain.kind != DomainKind::UnitSquare) {
    throw std::invalid_argument("build_square_basis requires a square domain");
  }
  if (p_max < 1 || q_max < 1) {
    throw std::invalid_argument("build_square_basis: need p_max, q_max >= 1");
  }
  domain.validate();
  BasisSet set;
  set.domain = domain;
  set.ordering = BasisOrdering::PaperGrid;
  for (int p = 1; p <= p_max; ++p) {
    for (int q = 1; q <= q_max; ++q) set.functions.push_back(make_square_function(p, q));
  }
  return set;
}

BasisSet sorted_by_lambda(BasisSet set) {
  std::stable_sort(set.functions.begin(), set.functions.end(),
                   [](const BasisFunction& a, const BasisFunction& b) {
                     return order_key(a) < order_key(b);
                   });
  set.ordering = BasisOrdering::ByLambda;
  return set;
}

BasisSet first_by_lambda(const Domain& domain, int count, bool include_sine) {
  if (count < 1) throw std::invalid_argument("first_by_lambda: count must be positive");
  // Grow a (p, q) pool until every excluded mode lies above the count-th
  // eigenvalue of the pool.
  int extent = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count)))) + 1;
  for (;;) {
    BasisSet pool;
    double excluded_min = 0.0;
    if (domain.kind == DomainKind::UnitDisk) {
      pool = build_disk_basis(domain, extent, extent, include_sine);
      const double next_p = bessel_zero(extent + 1, 1);
      const double next_q = bessel_zero(0, extent + 1);
      excluded_min = std::min(next_p * next_p, next_q * next_q);
    } else {
      pool = build_square_basis(domain, extent, extent);
      excluded_min = kPi * kPi * (1.0 + (extent + 1.0) * (extent + 1.0));
    }
    pool = sorted_by_lambda(std::move(pool));
    if (static_cast<int>(pool.size()) >= count && pool.functions[count - 1].lambda < excluded_min) {
      pool.functions.resize(count);
      return pool;
    }
    extent *= 2;
  }
}

double disk_radial(const BasisFunction& phi, double r) {
  return phi.norm_const * bessel_j(phi.mode_p, phi.sqrt_lambda * r);
}

double disk_angular(const BasisFunction& phi, double theta) {
  return phi.parity == Parity::Cosine ? std::cos(phi.mode_p * theta)
                                      : std::sin(phi.mode_p * theta);
}

double disk_boundary_slope(const BasisFunction& phi) {
  return phi.norm_const * phi.sqrt_lambda * bessel_j_prime(phi.mode_p, phi.sqrt_lambda);
}

double eval(const BasisFunction& phi, Point x) {
  check_point(phi.domain, x);
  if (phi.domain == DomainKind::UnitDisk) {
    const double r = std::min(1.0, std::hypot(x.x1, x.x2));
    const double theta = std::atan2(x.x2, x.x1);
    return disk_radial(phi, r) * disk_angular(phi, theta);
  }
  return phi.norm_const * std::sin(phi.mode_p * kPi * x.x1) * std::sin(phi.mode_q * kPi * x.x2);
}

std::array<double, 2> gradient(const BasisFunction& phi, Point x) {
  check_point(phi.domain, x);
  if (phi.domain == DomainKind::UnitSquare) {
    const double a = phi.mode_p * kPi;
    const double b = phi.mode_q * kPi;
    return {phi.norm_const * a * std::cos(a * x.x1) * std::sin(b * x.x2),
            phi.norm_const * b * std::sin(a * x.x1) * std::cos(b * x.x2)};
  }
  const double r = std::min(1.0, std::hypot(x.x1, x.x2));
  const double theta = std::atan2(x.x2, x.x1);
  const int p = phi.mode_p;
  const double j = phi.sqrt_lambda;
  const double dr = phi.norm_const * j * bessel_j_prime(p, j * r) * disk_angular(phi, theta);
  double dtheta_over_r = 0.0;
  if (p > 0) {
    const double dtrig = phi.parity == Parity::Cosine ? -std::sin(p * theta) : std::cos(p * theta);
    dtheta_over_r = phi.norm_const * p * j * j_over_x(p, j * r) * dtrig;
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {dr * c - dtheta_over_r * s, dr * s + dtheta_over_r * c};
}

double laplacian(const BasisFunction& phi, Point x) { return -phi.lambda * eval(phi, x); }

double normal_derivative(const BasisFunction& phi, const BoundaryPoint& b) {
  if (phi.domain == DomainKind::UnitDisk) {
    const auto* d = std::get_if<DiskBoundaryPoint>(&b);
    if (d == nullptr) throw std::invalid_argument("disk function needs a disk boundary point");
    return disk_boundary_slope(phi) * disk_angular(phi, d->theta);
  }
  const auto* s = std::get_if<SquareBoundaryPoint>(&b);
  if (s == nullptr) throw std::invalid_argument("square function needs an edge boundary point");
  if (s->t < -kGeomTol || s->t > 1.0 + kGeomTol) {
    throw std::domain_error("edge parameter outside [0, 1]");
  }
  const Point x = position(b);
  const double a = phi.mode_p * kPi;
  const double c = phi.mode_q * kPi;
  const double amp = phi.norm_const;
  switch (s->edge) {
    case SquareEdge::Bottom: return -amp * c * std::sin(a * x.x1);
    case SquareEdge::Right: return amp * a * std::cos(a) * std::sin(c * x.x2);
    case SquareEdge::Top: return amp * c * std::sin(a * x.x1) * std::cos(c);
    case SquareEdge::Left: return -amp * a * std::sin(c * x.x2);
  }
  throw std::invalid_argument("unknown square edge");
}

}  // namespace zite
