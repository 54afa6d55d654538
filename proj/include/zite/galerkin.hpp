#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "zite/basis.hpp"
#include "zite/coefficients.hpp"

namespace zite {

/// Dense Galerkin matrices of the pencil (A - k^2 B) w = 0 on a Dirichlet basis.
///
///   A_ij = lambda_i lambda_j int_D (1/n) phi_i phi_j dx
///   B_ij = lambda_i delta_ij - int_{dD} (1/eta) d_nu phi_i d_nu phi_j ds
///
/// A is symmetric positive definite, B symmetric and in general indefinite.
struct GalerkinSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  BasisSet basis;
  CoefficientPair coefficients;
  int volume_nodes = 0;
  int boundary_nodes = 0;

  [[nodiscard]] std::size_t size() const { return basis.size(); }
};

/// Assembles A and B with the quadrature orders carried by `basis.domain`.
/// Throws std::invalid_argument when the coefficients do not fit the domain
/// or an order is below the minimum.
[[nodiscard]] GalerkinSystem assemble(const BasisSet& basis, const RefractiveIndex& n,
                                      const Conductivity& eta);

enum class EigenKind { Real, Imaginary };

struct Eigenpair {
  /// |k|; the eigenvalue is k for Real and i*k for Imaginary.
  double k = 0.0;
  EigenKind kind = EigenKind::Real;
  /// Reduced eigenvalue mu = 1 / k^2 (negative for imaginary k).
  double mu = 0.0;
  /// Basis coefficients, |w|_2 = 1 (which is the L2 norm of w_N).
  Eigen::VectorXd coefficients;
  /// |A w - k^2 B w| / (|A w| + |k^2| |B w|).
  double residual = 0.0;

  /// Signed k^2.
  [[nodiscard]] double k_squared() const { return kind == EigenKind::Real ? k * k : -k * k; }
};

/// All eigenpairs: real k ascending, then imaginary k ascending in |k|.
struct Spectrum {
  std::vector<Eigenpair> pairs;
  BasisSet basis;

  [[nodiscard]] std::size_t size() const { return pairs.size(); }
  [[nodiscard]] std::vector<double> real_values() const;
  [[nodiscard]] std::vector<double> imaginary_values() const;
  [[nodiscard]] std::size_t real_count() const;
};

struct SolveOptions {
  /// Reduced eigenvalues with |mu| <= tol * max|mu| are discarded as
  /// |k| -> infinity artifacts of the truncated basis.
  double mu_relative_tolerance = 1e-10;
};

/// Cholesky reduction A = L L^T, symmetric eigendecomposition of
/// S = L^{-1} B L^{-T}, k^2 = 1/mu, w = L^{-T} y renormalized.
/// Throws NumericalError if A is not positive definite or every mu is
/// below the cutoff.
[[nodiscard]] Spectrum solve(const GalerkinSystem& system, SolveOptions options = {});

/// Relative residual of an eigenpair against the system matrices.
[[nodiscard]] double relative_residual(const GalerkinSystem& system, const Eigenpair& pair);

/// Values of w_N = sum_j w_j phi_j at the given points. `index` addresses
/// `spectrum.pairs`. std::out_of_range for a bad index.
[[nodiscard]] std::vector<double> eval_eigenfunction(const Spectrum& spectrum, std::size_t index,
                                                     std::span<const Point> grid);

/// Copy of `domain` with orders raised so every product of basis functions
/// in `basis` (times a smooth coefficient) is resolved.
[[nodiscard]] Domain resolved_quadrature(const Domain& domain, const BasisSet& basis);

struct ConvergenceRow {
  int basis_size = 0;
  double k1 = 0.0;
  double error = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(error) against log(N) over rows whose error
  /// is above round-off (the finest row is skipped for Cauchy errors); NaN
  /// when fewer than two such rows exist.
  double slope = 0.0;
  /// True if errors are measured against a supplied reference value,
  /// false for the Cauchy error against the finest level.
  bool against_reference = false;
};

/// First real eigenvalue on ByLambda bases of increasing size. Quadrature is
/// raised to resolve the largest basis (see resolved_quadrature) and shared by
/// every level. Requires >= 3 strictly increasing sizes.
[[nodiscard]] ConvergenceTable convergence_study(const Domain& domain, const RefractiveIndex& n,
                                                 const Conductivity& eta,
                                                 std::span<const int> sizes,
                                                 std::optional<double> reference_k1 = std::nullopt,
                                                 bool include_sine = false);

}  // namespace zite
