#include "zite/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "zite/errors.hpp"
#include "zite/specfun.hpp"

namespace zite {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Values of every basis function at the volume nodes (rows = functions) and
// the matching weights with 1/n folded in.
struct VolumeSamples {
  MatrixXd values;
  VectorXd weights;
};

// Normal derivatives at boundary nodes and weights with 1/eta folded in.
struct BoundarySamples {
  MatrixXd slopes;
  VectorXd weights;
};

VolumeSamples disk_volume(const BasisSet& basis, const RefractiveIndex& n) {
  const Domain& dom = basis.domain;
  std::vector<std::pair<double, double>> segments{{0.0, 1.0}};
  if (const auto r0 = n.jump_radius(); r0 && dom.split_at_jumps) {
    segments = {{0.0, *r0}, {*r0, 1.0}};
  }
  const auto gl = gauss_legendre(dom.volume_order);
  std::vector<double> radii;
  std::vector<double> radial_w;
  for (const auto& [a, b] : segments) {
    const auto rule = gl.mapped(a, b);
    for (int i = 0; i < rule.order(); ++i) {
      radii.push_back(rule.nodes[i]);
      radial_w.push_back(rule.weights[i] * rule.nodes[i]);
    }
  }
  const auto angles = periodic_trapezoid(dom.angular_order);
  const auto nr = static_cast<Eigen::Index>(radii.size());
  const Eigen::Index nt = angles.order();
  const auto nf = static_cast<Eigen::Index>(basis.size());

  MatrixXd radial(nf, nr);
  MatrixXd angular(nf, nt);
  for (Eigen::Index i = 0; i < nf; ++i) {
    for (Eigen::Index a = 0; a < nr; ++a) radial(i, a) = disk_radial(basis[i], radii[a]);
    for (Eigen::Index b = 0; b < nt; ++b) angular(i, b) = disk_angular(basis[i], angles.nodes[b]);
  }

  VolumeSamples out{MatrixXd(nf, nr * nt), VectorXd(nr * nt)};
  for (Eigen::Index a = 0; a < nr; ++a) {
    for (Eigen::Index b = 0; b < nt; ++b) {
      const Eigen::Index col = a * nt + b;
      const double t = angles.nodes[b];
      const Point x{radii[a] * std::cos(t), radii[a] * std::sin(t)};
      out.weights(col) = radial_w[a] * angles.weights[b] / n.at(x);
      out.values.col(col) = radial.col(a).cwiseProduct(angular.col(b));
    }
  }
  return out;
}

BoundarySamples disk_boundary(const BasisSet& basis, const Conductivity& eta) {
  const auto angles = periodic_trapezoid(basis.domain.boundary_order);
  const auto nf = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index nt = angles.order();
  BoundarySamples out{MatrixXd(nf, nt), VectorXd(nt)};
  for (Eigen::Index b = 0; b < nt; ++b) {
    const DiskBoundaryPoint bp{angles.nodes[b]};
    out.weights(b) = angles.weights[b] / eta.at(bp);
  }
  for (Eigen::Index i = 0; i < nf; ++i) {
    const double slope = disk_boundary_slope(basis[i]);
    for (Eigen::Index b = 0; b < nt; ++b) {
      out.slopes(i, b) = slope * disk_angular(basis[i], angles.nodes[b]);
    }
  }
  return out;
}

VolumeSamples square_volume(const BasisSet& basis, const RefractiveIndex& n) {
  const auto axis = gauss_legendre(basis.domain.volume_order).mapped(0.0, 1.0);
  const Eigen::Index nq = axis.order();
  const auto nf = static_cast<Eigen::Index>(basis.size());
  VolumeSamples out{MatrixXd(nf, nq * nq), VectorXd(nq * nq)};
  for (Eigen::Index a = 0; a < nq; ++a) {
    for (Eigen::Index b = 0; b < nq; ++b) {
      const Eigen::Index col = a * nq + b;
      const Point x{axis.nodes[a], axis.nodes[b]};
      out.weights(col) = axis.weights[a] * axis.weights[b] / n.at(x);
      for (Eigen::Index i = 0; i < nf; ++i) out.values(i, col) = eval(basis[i], x);
    }
  }
  return out;
}

BoundarySamples square_boundary(const BasisSet& basis, const Conductivity& eta) {
  const auto edge_rule = gauss_legendre(basis.domain.boundary_order).mapped(0.0, 1.0);
  const Eigen::Index ne = edge_rule.order();
  const auto nf = static_cast<Eigen::Index>(basis.size());
  BoundarySamples out{MatrixXd(nf, 4 * ne), VectorXd(4 * ne)};
  for (int e = 0; e < 4; ++e) {
    for (Eigen::Index a = 0; a < ne; ++a) {
      const Eigen::Index col = e * ne + a;
      const BoundaryPoint bp = SquareBoundaryPoint{static_cast<SquareEdge>(e), edge_rule.nodes[a]};
      out.weights(col) = edge_rule.weights[a] / eta.at(bp);
      for (Eigen::Index i = 0; i < nf; ++i) out.slopes(i, col) = normal_derivative(basis[i], bp);
    }
  }
  return out;
}

MatrixXd weighted_gram(const MatrixXd& values, const VectorXd& weights) {
  return values * weights.asDiagonal() * values.transpose();
}

void symmetrize(MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

GalerkinSystem assemble(const BasisSet& basis, const RefractiveIndex& n, const Conductivity& eta) {
  if (basis.size() == 0) throw std::invalid_argument("assemble: empty basis");
  for (const auto& f : basis.functions) {
    if (f.domain != basis.domain.kind) {
      throw std::invalid_argument("assemble: basis function from a different domain");
    }
  }
  basis.domain.validate();
  CoefficientPair coeffs{n, eta};
  coeffs.validate(basis.domain.kind);

  const bool disk = basis.domain.kind == DomainKind::UnitDisk;
  const VolumeSamples vol = disk ? disk_volume(basis, n) : square_volume(basis, n);
  const BoundarySamples bnd = disk ? disk_boundary(basis, eta) : square_boundary(basis, eta);

  const auto nf = static_cast<Eigen::Index>(basis.size());
  VectorXd lambda(nf);
  for (Eigen::Index i = 0; i < nf; ++i) lambda(i) = basis[i].lambda;

  GalerkinSystem sys{MatrixXd(), MatrixXd(), basis, coeffs, static_cast<int>(vol.weights.size()),
                     static_cast<int>(bnd.weights.size())};
  sys.A = lambda.asDiagonal() * weighted_gram(vol.values, vol.weights) * lambda.asDiagonal();
  sys.B = MatrixXd(lambda.asDiagonal()) - weighted_gram(bnd.slopes, bnd.weights);
  symmetrize(sys.A);
  symmetrize(sys.B);
  return sys;
}

std::vector<double> Spectrum::real_values() const {
  std::vector<double> out;
  for (const auto& p : pairs) {
    if (p.kind == EigenKind::Real) out.push_back(p.k);
  }
  return out;
}

std::vector<double> Spectrum::imaginary_values() const {
  std::vector<double> out;
  for (const auto& p : pairs) {
    if (p.kind == EigenKind::Imaginary) out.push_back(p.k);
  }
  return out;
}

std::size_t Spectrum::real_count() const {
  return static_cast<std::size_t>(std::count_if(
      pairs.begin(), pairs.end(), [](const Eigenpair& p) { return p.kind == EigenKind::Real; }));
}

double relative_residual(const GalerkinSystem& system, const Eigenpair& pair) {
  const VectorXd aw = system.A * pair.coefficients;
  const VectorXd bw = system.B * pair.coefficients;
  const double k2 = pair.k_squared();
  const double scale = aw.norm() + std::abs(k2) * bw.norm();
  return scale > 0.0 ? (aw - k2 * bw).norm() / scale : 0.0;
}

Spectrum solve(const GalerkinSystem& system, SolveOptions options) {
  const Eigen::LLT<MatrixXd> llt(system.A);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization failed: A is not positive definite "
                         "(the form a(.,.) is coercive, so this indicates an assembly error)");
  }
  const MatrixXd lower = llt.matrixL();
  const auto tri = lower.triangularView<Eigen::Lower>();
  const MatrixXd half = tri.solve(system.B);             // L^{-1} B
  MatrixXd reduced = tri.solve(half.transpose());         // L^{-1} B L^{-T}
  symmetrize(reduced);

  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(reduced);
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  const VectorXd& mu = eig.eigenvalues();
  const double mu_max = mu.cwiseAbs().maxCoeff();
  const double cutoff = options.mu_relative_tolerance * mu_max;

  Spectrum spectrum;
  spectrum.basis = system.basis;
  const auto upper = lower.transpose().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (!(std::abs(mu(i)) > cutoff)) continue;
    Eigenpair pair;
    pair.mu = mu(i);
    pair.kind = mu(i) > 0.0 ? EigenKind::Real : EigenKind::Imaginary;
    pair.k = 1.0 / std::sqrt(std::abs(mu(i)));
    VectorXd w = upper.solve(eig.eigenvectors().col(i));
    w /= w.norm();
    Eigen::Index lead = 0;
    w.cwiseAbs().maxCoeff(&lead);
    if (w(lead) < 0.0) w = -w;
    pair.coefficients = std::move(w);
    pair.residual = relative_residual(system, pair);
    spectrum.pairs.push_back(std::move(pair));
  }
  if (spectrum.pairs.empty()) {
    throw NumericalError("empty spectrum: every reduced eigenvalue is below the cutoff");
  }
  std::stable_sort(spectrum.pairs.begin(), spectrum.pairs.end(),
                   [](const Eigenpair& a, const Eigenpair& b) {
                     if (a.kind != b.kind) return a.kind == EigenKind::Real;
                     return a.k < b.k;
                   });
  return spectrum;
}

std::vector<double> eval_eigenfunction(const Spectrum& spectrum, std::size_t index,
                                       std::span<const Point> grid) {
  if (index >= spectrum.pairs.size()) {
    throw std::out_of_range("eigenfunction index " + std::to_string(index) + " outside spectrum of " +
                            std::to_string(spectrum.pairs.size()));
  }
  const VectorXd& w = spectrum.pairs[index].coefficients;
  std::vector<double> out;
  out.reserve(grid.size());
  for (const Point& x : grid) {
    double v = 0.0;
    for (std::size_t j = 0; j < spectrum.basis.size(); ++j) {
      v += w(static_cast<Eigen::Index>(j)) * eval(spectrum.basis[j], x);
    }
    out.push_back(v);
  }
  return out;
}

Domain resolved_quadrature(const Domain& domain, const BasisSet& basis) {
  Domain out = domain;
  double max_root = 0.0;
  for (const auto& f : basis.functions) max_root = std::max(max_root, f.sqrt_lambda);
  const int p_max = basis.max_mode_p();
  const auto cap = [](int v) { return std::min(v, kMaxGaussLegendreOrder); };
  if (domain.kind == DomainKind::UnitDisk) {
    out.volume_order = cap(std::max(domain.volume_order, static_cast<int>(max_root) + 24));
    out.angular_order = std::max(domain.angular_order, 4 * p_max + 8);
    out.boundary_order = std::max(domain.boundary_order, 4 * p_max + 8);
  } else {
    const int m = std::max(p_max, basis.max_mode_q());
    out.volume_order = cap(std::max(domain.volume_order, 2 * m + 24));
    out.boundary_order = cap(std::max(domain.boundary_order, 2 * m + 24));
  }
  return out;
}

ConvergenceTable convergence_study(const Domain& domain, const RefractiveIndex& n,
                                   const Conductivity& eta, std::span<const int> sizes,
                                   std::optional<double> reference_k1, bool include_sine) {
  if (sizes.size() < 3) throw std::invalid_argument("convergence_study needs at least 3 basis sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw std::invalid_argument("convergence_study: basis sizes must be positive and strictly increasing");
    }
  }
  const BasisSet largest = first_by_lambda(domain, sizes.back(), include_sine);
  const Domain quad = resolved_quadrature(domain, largest);

  ConvergenceTable table;
  table.against_reference = reference_k1.has_value();
  for (int size : sizes) {
    BasisSet basis = largest;
    basis.functions.resize(static_cast<std::size_t>(size));
    basis.domain = quad;
    const Spectrum spec = solve(assemble(basis, n, eta));
    const auto reals = spec.real_values();
    if (reals.empty()) throw NumericalError("no real eigenvalue at basis size " + std::to_string(size));
    table.rows.push_back({size, reals.front(), 0.0});
  }
  const double target = reference_k1.value_or(table.rows.back().k1);
  std::vector<double> log_n;
  std::vector<double> log_e;
  const double floor = 1e-14 * std::abs(target);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto& row = table.rows[i];
    row.error = std::abs(row.k1 - target);
    const bool finest_cauchy = !table.against_reference && i + 1 == table.rows.size();
    if (row.error > floor && !finest_cauchy) {
      log_n.push_back(std::log(static_cast<double>(row.basis_size)));
      log_e.push_back(std::log(row.error));
    }
  }
  table.slope = least_squares_slope(log_n, log_e);
  return table;
}

}  // namespace zite
