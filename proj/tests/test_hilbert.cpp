// Grid, state, and operator layer tests. Discrete references: the tridiagonal
// Dirichlet kinetic matrix -(1/2m) d2/dx2 has the closed-form spectrum
//   E_k = (1 - cos(k pi h / L)) / (m h^2),  k = 1..n,
// and the continuum particle-in-a-box levels are k^2 pi^2 / (2 m L^2)
// (standard quantum texts, e.g. Griffiths, Introduction to Quantum Mechanics).

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qduet/hilbert.hpp"

using namespace qduet;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("uniform grid construction and validation") {
  const Grid1D g = make_uniform_grid(5, 0.0, 1.0);
  CHECK(g.n == 5);
  CHECK(g.spacing() == Catch::Approx(0.25));
  CHECK(g.point(0) == 0.0);
  CHECK(g.point(4) == 1.0);  // exact endpoint, no accumulated rounding
  CHECK(g.point(2) == Catch::Approx(0.5));

  CHECK_THROWS_AS(make_uniform_grid(2, 0.0, 1.0), invalid_argument);
  CHECK_THROWS_AS(make_uniform_grid(5, 1.0, 1.0), invalid_argument);
  CHECK_THROWS_AS(make_uniform_grid(5, 2.0, 1.0), invalid_argument);
  CHECK_THROWS_AS(make_uniform_grid(5, 0.0, std::nan("")), invalid_argument);
}

TEST_CASE("inner product conjugates the left argument and carries the weight") {
  StateVector u{Eigen::VectorXcd(2), 0.5};
  StateVector v{Eigen::VectorXcd(2), 0.5};
  u.amplitudes << complexd(1.0, 1.0), complexd(0.0, 2.0);
  v.amplitudes << complexd(2.0, 0.0), complexd(1.0, 0.0);
  // 0.5 * [ (1-i)*2 + (-2i)*1 ] = 0.5 * (2 - 4i)
  const complexd ip = inner(u, v);
  CHECK(ip.real() == Catch::Approx(1.0));
  CHECK(ip.imag() == Catch::Approx(-2.0));
  CHECK(inner(u, u).imag() == 0.0);
  CHECK(u.norm_sq() == Catch::Approx(0.5 * 6.0));

  StateVector w{Eigen::VectorXcd::Zero(3), 1.0};
  CHECK_THROWS_AS(inner(u, w), dimension_mismatch);
}

TEST_CASE("make_operator rejects non-Hermitian matrices flagged Hermitian") {
  Eigen::MatrixXcd m(2, 2);
  m << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(make_operator(m, true), invalid_argument);
  CHECK_NOTHROW(make_operator(m, false));
  Eigen::MatrixXcd h(2, 2);
  h << 1.0, complexd(0.0, -1.0), complexd(0.0, 1.0), -1.0;
  CHECK_NOTHROW(make_operator(h, true));
}

TEST_CASE("kinetic operator reproduces its discrete dispersion exactly") {
  // Box of length 1: walls at 0 and 1, interior points at h..1-h, h = 1/(n+1).
  const int n = 64;
  const double h = 1.0 / (n + 1);
  const Grid1D g = make_uniform_grid(n, h, 1.0 - h);
  REQUIRE(g.spacing() == Catch::Approx(h).epsilon(1e-14));
  const LinearOperator kin = build_kinetic(g, 1.0);
  CHECK(kin.hermitian);
  CHECK(kin.weight == Catch::Approx(h));
  CHECK(kin.matrix(0, 0).real() == Catch::Approx(1.0 / (h * h)));
  CHECK(kin.matrix(0, 1).real() == Catch::Approx(-0.5 / (h * h)));

  const auto pairs = eigh(kin, 3);
  for (int k = 1; k <= 3; ++k) {
    const double discrete = (1.0 - std::cos(k * pi * h)) / (h * h);
    CHECK(pairs[static_cast<std::size_t>(k - 1)].first ==
          Catch::Approx(discrete).epsilon(1e-12));
    // Continuum level k^2 pi^2 / 2 recovered to O(h^2).
    CHECK(std::abs(pairs[static_cast<std::size_t>(k - 1)].first - k * k * pi * pi / 2.0) <
          5.0 * k * k * k * k * h * h);
  }

  // Ground state is the half-sine, nodeless, real-positive after phase fixing,
  // normalized in the weighted inner product.
  const StateVector& ground = pairs[0].second;
  CHECK(ground.norm_sq() == Catch::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < n; ++i) {
    CHECK(ground.amplitudes[i].imag() == 0.0);
    CHECK(ground.amplitudes[i].real() > 0.0);
  }
  // Compare against sin(pi x) / normalization on the same grid.
  double dot = 0.0;
  for (int i = 0; i < n; ++i) dot += std::sin(pi * g.point(i)) * ground.amplitudes[i].real() * h;
  const double sine_norm = std::sqrt(0.5);  // integral of sin^2 over [0,1]
  CHECK(dot / sine_norm == Catch::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("potential operator is diagonal in the grid representation") {
  const Grid1D g = make_uniform_grid(8, -1.0, 1.0);
  const LinearOperator v = build_potential(g, [](double x) { return x * x; });
  CHECK(v.hermitian);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.point(i);
    CHECK(v.matrix(i, i).real() == Catch::Approx(x * x));
  }
  CHECK(detail::max_abs(v.matrix - v.matrix.diagonal().asDiagonal().toDenseMatrix()) == 0.0);
}

TEST_CASE("eigh orders eigenvalues ascending with deterministic tie-breaking") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m.diagonal() << 3.0, 1.0, 2.0, 1.0;
  const auto pairs = eigh(make_operator(m, true), 4);
  CHECK(pairs[0].first == 1.0);
  CHECK(pairs[1].first == 1.0);
  CHECK(pairs[2].first == 2.0);
  CHECK(pairs[3].first == 3.0);
  // Degenerate pair ordered by first nonzero component: e1 before e3.
  CHECK(std::abs(pairs[0].second.amplitudes[1]) == Catch::Approx(1.0));
  CHECK(std::abs(pairs[1].second.amplitudes[3]) == Catch::Approx(1.0));
  CHECK(std::abs(pairs[2].second.amplitudes[2]) == Catch::Approx(1.0));

  CHECK_THROWS_AS(eigh(make_operator(m, true), 0), invalid_argument);
  CHECK_THROWS_AS(eigh(make_operator(m, true), 5), invalid_argument);
}

TEST_CASE("eigh handles genuinely complex Hermitian matrices") {
  Eigen::MatrixXcd m(2, 2);
  m << 0.0, complexd(0.0, -1.0), complexd(0.0, 1.0), 0.0;  // eigenvalues -1, +1
  const auto pairs = eigh(make_operator(m, true), 2);
  CHECK(pairs[0].first == Catch::Approx(-1.0));
  CHECK(pairs[1].first == Catch::Approx(1.0));
  for (const auto& [value, vec] : pairs) {
    const Eigen::VectorXcd r = m * vec.amplitudes - value * vec.amplitudes;
    CHECK(r.norm() < 1e-12);
    // Phase convention: largest-magnitude component real-positive.
    int imax = 0;
    vec.amplitudes.cwiseAbs().maxCoeff(&imax);
    CHECK(vec.amplitudes[imax].imag() == 0.0);
    CHECK(vec.amplitudes[imax].real() > 0.0);
  }
}

TEST_CASE("eigenvectors are normalized against the quadrature weight") {
  const Grid1D g = make_uniform_grid(16, 0.0, 3.0);
  const LinearOperator kin = build_kinetic(g, 2.0);
  const auto [e0, v0] = ground_state(kin);
  CHECK(e0 > 0.0);
  CHECK(v0.weight == Catch::Approx(g.spacing()));
  CHECK(v0.norm_sq() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("expectation value of a diagonal operator") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m.diagonal() << 1.0, -1.0;
  const LinearOperator op = make_operator(m, true);
  StateVector s{Eigen::VectorXcd(2), 1.0};
  s.amplitudes << 2.0, 1.0;  // un-normalized on purpose
  const complexd e = expectation(s, op);
  CHECK(e.real() == Catch::Approx((4.0 - 1.0) / 5.0));
  CHECK(e.imag() == Catch::Approx(0.0).margin(1e-15));

  StateVector zero{Eigen::VectorXcd::Zero(2), 1.0};
  CHECK_THROWS_AS(expectation(zero, op), invalid_argument);
}

TEST_CASE("gershgorin radius bounds the spectrum") {
  Eigen::MatrixXcd m(2, 2);
  m << 2.0, 1.0, 1.0, -2.0;
  const LinearOperator op = make_operator(m, true);
  const double rho = gershgorin_radius(op);
  CHECK(rho == Catch::Approx(3.0));
  const auto pairs = eigh(op, 2);
  CHECK(std::abs(pairs[0].first) <= rho + 1e-12);
  CHECK(std::abs(pairs[1].first) <= rho + 1e-12);
}
