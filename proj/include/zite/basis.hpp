#pragma once

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

namespace zite {

enum class DomainKind { UnitDisk, UnitSquare };

/// Computational domain plus the quadrature orders used on it.
///
/// The unit disk is {r < 1} centred at the origin; the unit square is
/// (0,1)^2. For the disk `volume_order` is the radial Gauss-Legendre order
/// and `angular_order` the number of nodes of the periodic angular rule; for
/// the square `volume_order` is the per-axis Gauss-Legendre order and
/// `angular_order` is unused. `boundary_order` is the node count of the
/// periodic rule on the circle, or of the Gauss rule on each square edge.
struct Domain {
  DomainKind kind = DomainKind::UnitDisk;
  int volume_order = 12;
  int angular_order = 12;
  int boundary_order = 12;
  /// Split radial quadrature at coefficient jump radii.
  bool split_at_jumps = true;

  static constexpr int kMinOrder = 4;

  [[nodiscard]] static Domain unit_disk() { return Domain{}; }
  [[nodiscard]] static Domain unit_square() {
    Domain d;
    d.kind = DomainKind::UnitSquare;
    return d;
  }

  /// Throws std::invalid_argument if any quadrature order is below kMinOrder.
  void validate() const;
  [[nodiscard]] double area() const;
};

[[nodiscard]] const char* to_string(DomainKind kind);

/// Cartesian point. Disk points are measured from the disk centre.
struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Square edges, traversed counterclockwise starting at the origin.
enum class SquareEdge { Bottom = 0, Right = 1, Top = 2, Left = 3 };

struct DiskBoundaryPoint {
  double theta = 0.0;
};

/// `t` in [0,1] runs along the edge in the counterclockwise direction.
struct SquareBoundaryPoint {
  SquareEdge edge = SquareEdge::Bottom;
  double t = 0.0;
};

using BoundaryPoint = std::variant<DiskBoundaryPoint, SquareBoundaryPoint>;

[[nodiscard]] Point position(const BoundaryPoint& b);

/// Angular family of a disk eigenfunction. Square functions are tagged Cosine.
enum class Parity { Cosine, Sine };

/// One L2-normalized Dirichlet eigenpair of -Laplace on the domain.
///
/// Disk:   norm_const * J_p(j_{p,q} r) * {cos,sin}(p theta), lambda = j_{p,q}^2.
/// Square: 2 * sin(p pi x1) * sin(q pi x2),                  lambda = pi^2 (p^2 + q^2).
struct BasisFunction {
  DomainKind domain = DomainKind::UnitDisk;
  int mode_p = 0;
  int mode_q = 1;
  Parity parity = Parity::Cosine;
  double sqrt_lambda = 0.0;
  double lambda = 0.0;
  double norm_const = 1.0;
};

enum class BasisOrdering { PaperGrid, ByLambda };

struct BasisSet {
  Domain domain;
  std::vector<BasisFunction> functions;
  BasisOrdering ordering = BasisOrdering::PaperGrid;

  [[nodiscard]] std::size_t size() const { return functions.size(); }
  [[nodiscard]] const BasisFunction& operator[](std::size_t i) const { return functions[i]; }
  [[nodiscard]] int max_mode_p() const;
  [[nodiscard]] int max_mode_q() const;
};

/// Cosine modes 0 <= p <= p_max, 1 <= q <= q_max in (p, q) order; with
/// `include_sine`, the sine family for p >= 1 follows each cosine block.
[[nodiscard]] BasisSet build_disk_basis(const Domain& domain, int p_max, int q_max,
                                        bool include_sine = false);

/// 1 <= p <= p_max, 1 <= q <= q_max in (p, q) order.
[[nodiscard]] BasisSet build_square_basis(const Domain& domain, int p_max, int q_max);

/// The `count` eigenfunctions with the smallest eigenvalues, ByLambda order.
/// Ties are broken by (p, q, parity).
[[nodiscard]] BasisSet first_by_lambda(const Domain& domain, int count,
                                       bool include_sine = false);

/// Stable re-sort of an existing set into ByLambda order.
[[nodiscard]] BasisSet sorted_by_lambda(BasisSet set);

/// Value at a point in the closed domain; std::domain_error outside.
[[nodiscard]] double eval(const BasisFunction& phi, Point x);
[[nodiscard]] std::array<double, 2> gradient(const BasisFunction& phi, Point x);
/// Equals -lambda * eval.
[[nodiscard]] double laplacian(const BasisFunction& phi, Point x);

/// Outward normal derivative on the boundary. The boundary point kind must
/// match the function's domain.
[[nodiscard]] double normal_derivative(const BasisFunction& phi, const BoundaryPoint& b);

// Separated pieces used by the polar assembly on the disk.
[[nodiscard]] double disk_radial(const BasisFunction& phi, double r);
[[nodiscard]] double disk_angular(const BasisFunction& phi, double theta);
/// norm_const * j * J_p'(j): radial derivative at r = 1 without the angular factor.
[[nodiscard]] double disk_boundary_slope(const BasisFunction& phi);

}  // namespace zite
