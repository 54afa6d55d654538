#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "zite/errors.hpp"
#include "zite/galerkin.hpp"
#include "zite/reference.hpp"
#include "zite/specfun.hpp"

using namespace zite;

namespace {

double rel_asym(const Eigen::MatrixXd& m) { return (m - m.transpose()).norm() / m.norm(); }

// Closed-form boundary slope c * j * J_p'(j) from std::cyl_bessel_j.
double slope_oracle(const BasisFunction& f) {
  const double j = f.sqrt_lambda;
  const int p = f.mode_p;
  const double jp1 = std::cyl_bessel_j(p + 1.0, j);
  const double c = p == 0 ? 1.0 / (std::sqrt(std::numbers::pi) * std::abs(jp1))
                          : 1.0 / (std::sqrt(std::numbers::pi / 2) * std::abs(jp1));
  // J_p'(j) = -J_{p+1}(j) at a zero of J_p.
  return c * j * -jp1;
}

// Analytic A and B for constant n, eta.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> oracle_matrices(const BasisSet& basis, double n, double eta) {
  const auto N = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
  const double pi = std::numbers::pi;
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto& fi = basis[i];
    A(i, i) = fi.lambda * fi.lambda / n;
    for (Eigen::Index j = 0; j < N; ++j) {
      const auto& fj = basis[j];
      double boundary = 0.0;
      if (basis.domain.kind == DomainKind::UnitDisk) {
        if (fi.mode_p == fj.mode_p && fi.parity == fj.parity) {
          boundary = slope_oracle(fi) * slope_oracle(fj) * (fi.mode_p == 0 ? 2.0 * pi : pi);
        }
      } else {
        // Bottom/top edges couple equal p, left/right edges equal q.
        if (fi.mode_p == fj.mode_p) {
          boundary += 2.0 * pi * pi * fi.mode_q * fj.mode_q * (1.0 + ((fi.mode_q + fj.mode_q) % 2 ? -1.0 : 1.0));
        }
        if (fi.mode_q == fj.mode_q) {
          boundary += 2.0 * pi * pi * fi.mode_p * fj.mode_p * (1.0 + ((fi.mode_p + fj.mode_p) % 2 ? -1.0 : 1.0));
        }
      }
      B(i, j) = (i == j ? fi.lambda : 0.0) - boundary / eta;
    }
  }
  return {A, B};
}

// Real k from Eigen's generalized solver on B x = mu A x.
std::vector<double> oracle_real_k(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, A);
  const auto& mu = es.eigenvalues();
  const double cut = 1e-10 * mu.cwiseAbs().maxCoeff();
  std::vector<double> k;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu(i) > cut) k.push_back(1.0 / std::sqrt(mu(i)));
  }
  std::sort(k.begin(), k.end());
  return k;
}

BasisSet disk24() { return build_disk_basis(Domain::unit_disk(), 5, 4); }
BasisSet square25() { return build_square_basis(Domain::unit_square(), 5, 5); }

BasisSet with_domain(BasisSet b, const Domain& d) {
  b.domain = d;
  return b;
}

}  // namespace

TEST_CASE("assembled matrices are symmetric, A positive definite, B indefinite") {
  const auto sys = assemble(disk24(), RefractiveIndex::radial_exp_bump(4, 1), Conductivity::constant(25));
  CHECK(sys.size() == 24);
  CHECK(rel_asym(sys.A) <= 1e-12);
  CHECK(rel_asym(sys.B) <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(sys.A);
  CHECK(ea.eigenvalues().minCoeff() > 0.0);
  // A small conductivity makes the boundary term dominate some directions.
  const auto weak = assemble(disk24(), RefractiveIndex::radial_exp_bump(4, 1), Conductivity::constant(0.1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(weak.B);
  CHECK(eb.eigenvalues().minCoeff() < 0.0);
  CHECK(eb.eigenvalues().maxCoeff() > 0.0);
  CHECK(sys.volume_nodes == 12 * 12);
  CHECK(sys.boundary_nodes == 12);
}

TEST_CASE("constant n gives a diagonal A at resolved quadrature") {
  for (const auto& raw : {disk24(), square25()}) {
    const auto basis = with_domain(raw, resolved_quadrature(raw.domain, raw));
    const auto sys = assemble(basis, RefractiveIndex::constant(4), Conductivity::constant(10));
    const auto [A, B] = oracle_matrices(basis, 4.0, 10.0);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      for (Eigen::Index j = 0; j < A.cols(); ++j) {
        worst = std::max(worst, std::abs(sys.A(i, j) - A(i, j)) / std::sqrt(A(i, i) * A(j, j)));
      }
    }
    CHECK(worst <= 1e-10);
    CHECK((sys.B - B).norm() <= 1e-10 * B.norm());
  }
}

TEST_CASE("disk boundary block matches the analytic angular integral at the default order") {
  const auto basis = disk24();
  const auto sys = assemble(basis, RefractiveIndex::constant(4), Conductivity::constant(25));
  const auto [A, B] = oracle_matrices(basis, 4.0, 25.0);
  CHECK((sys.B - B).norm() <= 1e-12 * B.norm());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (basis[i].mode_p != basis[j].mode_p) CHECK(std::abs(sys.B(i, j)) <= 1e-12 * B.norm());
    }
  }
}

TEST_CASE("solve agrees with a generalized eigensolver on oracle matrices") {
  struct Case {
    BasisSet basis;
    double eta;
  };
  const Case cases[] = {{disk24(), 25.0}, {disk24(), 0.1}, {square25(), 10.0}, {square25(), 1.0}};
  for (const auto& c : cases) {
    const auto basis = with_domain(c.basis, resolved_quadrature(c.basis.domain, c.basis));
    const auto spectrum = solve(assemble(basis, RefractiveIndex::constant(4), Conductivity::constant(c.eta)));
    const auto [A, B] = oracle_matrices(basis, 4.0, c.eta);
    const auto want = oracle_real_k(A, B);
    const auto got = spectrum.real_values();
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10 * want[i]);
  }
}

TEST_CASE("spectrum invariants") {
  const auto sys = assemble(disk24(), RefractiveIndex::piecewise_radial(0.25, 2, 4), Conductivity::constant(0.1));
  const auto spectrum = solve(sys);
  REQUIRE(spectrum.size() > 0);
  CHECK(spectrum.real_count() > 0);
  bool seen_imaginary = false;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto& p = spectrum.pairs[i];
    CHECK(p.k > 0.0);
    CHECK(std::isfinite(p.k));
    CHECK(p.residual <= 1e-8);
    CHECK(std::abs(relative_residual(sys, p) - p.residual) <= 1e-14);
    CHECK(std::abs(p.coefficients.norm() - 1.0) <= 1e-12);
    CHECK(std::abs(p.k_squared() * p.mu - 1.0) <= 1e-10);
    if (p.kind == EigenKind::Imaginary) seen_imaginary = true;
    if (seen_imaginary) CHECK(p.kind == EigenKind::Imaginary);
    if (i > 0 && spectrum.pairs[i - 1].kind == p.kind) CHECK(spectrum.pairs[i - 1].k <= p.k);
  }
  CHECK(spectrum.real_values().size() + spectrum.imaginary_values().size() == spectrum.size());
}

TEST_CASE("solve rejects a matrix A that is not positive definite") {
  auto sys = assemble(disk24(), RefractiveIndex::constant(4), Conductivity::constant(25));
  sys.A(0, 0) = -1.0;
  CHECK_THROWS_AS((void)solve(sys), NumericalError);
}

TEST_CASE("doubling a resolved quadrature order is stable to 1e-8") {
  for (const auto& n : {RefractiveIndex::constant(4), RefractiveIndex::radial_exp_bump(4, 1)}) {
    const auto raw = disk24();
    Domain d = resolved_quadrature(raw.domain, raw);
    const auto k1 = solve(assemble(with_domain(raw, d), n, Conductivity::constant(25))).real_values();
    d.volume_order = std::min(2 * d.volume_order, kMaxGaussLegendreOrder);
    d.angular_order *= 2;
    d.boundary_order *= 2;
    const auto k2 = solve(assemble(with_domain(raw, d), n, Conductivity::constant(25))).real_values();
    REQUIRE(k1.size() == k2.size());
    for (std::size_t i = 0; i < k1.size(); ++i) CHECK(std::abs(k1[i] - k2[i]) <= 1e-8);
  }
  const auto sq = square25();
  Domain d = resolved_quadrature(sq.domain, sq);
  const auto n = RefractiveIndex::separable_poly();
  const auto a = solve(assemble(with_domain(sq, d), n, Conductivity::constant(10))).real_values();
  d.volume_order *= 2;
  d.boundary_order *= 2;
  const auto b = solve(assemble(with_domain(sq, d), n, Conductivity::constant(10))).real_values();
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-8);
}

TEST_CASE("even conductivity decouples the sine family") {
  const auto eta = Conductivity::inverse_angular(10, 1);
  const auto n = RefractiveIndex::constant(4);
  const auto cos_only = solve(assemble(build_disk_basis(Domain::unit_disk(), 5, 4), n, eta)).real_values();
  const auto both = solve(assemble(build_disk_basis(Domain::unit_disk(), 5, 4, true), n, eta)).real_values();
  for (double k : cos_only) {
    const auto it = std::min_element(both.begin(), both.end(),
                                     [k](double a, double b) { return std::abs(a - k) < std::abs(b - k); });
    CHECK(std::abs(*it - k) <= 1e-9 * k);
  }
}

TEST_CASE("monotonicity in n on the disk") {
  for (double eta : {25.0, 0.1}) {
    const auto e = Conductivity::constant(eta);
    const auto low = solve(assemble(disk24(), RefractiveIndex::radial_exp_bump(4, 1), e)).real_values();
    const auto mid = solve(assemble(disk24(), RefractiveIndex::constant(4), e)).real_values();
    const auto high = solve(assemble(disk24(), RefractiveIndex::piecewise_radial(0.25, 2, 4), e)).real_values();
    for (int j = 0; j < 3; ++j) {
      CHECK(low[j] <= mid[j]);
      CHECK(mid[j] <= high[j]);
    }
  }
}

TEST_CASE("eigenfunctions vanish on the boundary, are normalized and even") {
  const auto spectrum = solve(assemble(disk24(), RefractiveIndex::constant(4), Conductivity::constant(25)));
  std::vector<Point> ring;
  for (int j = 0; j < 37; ++j) {
    const double t = 2.0 * std::numbers::pi * j / 37;
    ring.push_back({std::cos(t), std::sin(t)});
  }
  for (double v : eval_eigenfunction(spectrum, 0, ring)) CHECK(std::abs(v) <= 1e-9);

  const auto g = gauss_legendre(40).mapped(0.0, 1.0);
  std::vector<Point> pts;
  std::vector<double> w;
  for (int i = 0; i < g.order(); ++i) {
    for (int j = 0; j < 40; ++j) {
      const double t = 2.0 * std::numbers::pi * j / 40;
      pts.push_back({g.nodes[i] * std::cos(t), g.nodes[i] * std::sin(t)});
      w.push_back(g.weights[i] * g.nodes[i] * 2.0 * std::numbers::pi / 40);
    }
  }
  const auto vals = eval_eigenfunction(spectrum, 0, pts);
  double norm = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) norm += w[i] * vals[i] * vals[i];
  CHECK(std::abs(norm - 1.0) <= 1e-6);

  const std::vector<Point> upper{{0.3, 0.4}, {-0.5, 0.2}, {0.1, 0.7}};
  const std::vector<Point> lower{{0.3, -0.4}, {-0.5, -0.2}, {0.1, -0.7}};
  const auto a = eval_eigenfunction(spectrum, 1, upper);
  const auto b = eval_eigenfunction(spectrum, 1, lower);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
  CHECK_THROWS_AS((void)eval_eigenfunction(spectrum, spectrum.size(), upper), std::out_of_range);
}

TEST_CASE("convergence study against the exact root") {
  const std::vector<int> sizes{8, 16, 24, 36, 48};
  const double exact = exact_eigenvalues(DispersionQuery{4.0, 25.0}, 1).front().k;
  const auto table = convergence_study(Domain::unit_disk(), RefractiveIndex::constant(4), Conductivity::constant(25),
                                       sizes, exact);
  REQUIRE(table.rows.size() == sizes.size());
  CHECK(table.against_reference);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    CHECK(table.rows[i].basis_size == sizes[i]);
    CHECK(std::abs(table.rows[i].error - std::abs(table.rows[i].k1 - exact)) <= 1e-15);
  }
  for (std::size_t i = 2; i < sizes.size(); ++i) CHECK(table.rows[i].error <= table.rows[i - 1].error);
  CHECK(table.slope < 0.0);
}

TEST_CASE("square self-convergence is Cauchy") {
  const std::vector<int> sizes{9, 16, 25, 36};
  const auto table = convergence_study(Domain::unit_square(), RefractiveIndex::constant(4),
                                       Conductivity::constant(10), sizes);
  CHECK_FALSE(table.against_reference);
  std::vector<double> diffs;
  for (std::size_t i = 1; i < table.rows.size(); ++i) diffs.push_back(std::abs(table.rows[i].k1 - table.rows[i - 1].k1));
  for (std::size_t i = 1; i < diffs.size(); ++i) CHECK(diffs[i] < diffs[i - 1]);
  CHECK(table.rows.back().error == 0.0);
}

TEST_CASE("convergence study argument checks") {
  const std::vector<int> two{8, 16};
  const std::vector<int> unsorted{8, 24, 16};
  CHECK_THROWS_AS((void)convergence_study(Domain::unit_disk(), RefractiveIndex::constant(4),
                                          Conductivity::constant(25), two),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)convergence_study(Domain::unit_disk(), RefractiveIndex::constant(4),
                                          Conductivity::constant(25), unsorted),
                  std::invalid_argument);
}

TEST_CASE("assembly rejects coefficients that do not fit the domain") {
  CHECK_THROWS_AS((void)assemble(disk24(), RefractiveIndex::separable_poly(), Conductivity::constant(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)assemble(square25(), RefractiveIndex::constant(4), Conductivity::inverse_angular(10, 1)),
                  std::invalid_argument);
}
