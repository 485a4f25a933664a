#include "qjump/hilbert.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qjump;
namespace qt = qjump::testing;

namespace {

Matrix two_level_coupling(double omega) {
  Matrix h(2, 2);
  h << 0.0, omega, omega, 0.0;
  return h;
}

}  // namespace

TEST_CASE("state vectors normalize on construction") {
  Vector v(2);
  v << Complex(3.0, 0.0), Complex(0.0, 4.0);
  const StateVector psi(v);
  CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(psi.amplitudes()(0)) == doctest::Approx(0.6));

  CHECK_THROWS_AS(StateVector(Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("eigendecomposition: diagonal matrices come back exact") {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  const Eigensystem sys = hermitian_eigendecompose(h);
  CHECK(sys.eigenvalues(0) == 0.0);
  CHECK(sys.eigenvalues(1) == 1.0);
  CHECK(max_abs(sys.eigenvectors - Matrix::Identity(2, 2)) == 0.0);

  // zero operator: eigenvectors must be the identity, not an arbitrary set
  const Eigensystem zero = hermitian_eigendecompose(Matrix::Zero(4, 4));
  CHECK(zero.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
  CHECK(max_abs(zero.eigenvectors - Matrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("eigendecomposition: symmetric 2x2 closed form") {
  const double omega = 0.7;
  const Eigensystem sys = hermitian_eigendecompose(two_level_coupling(omega));
  CHECK(sys.eigenvalues(0) == doctest::Approx(-omega).epsilon(1e-14));
  CHECK(sys.eigenvalues(1) == doctest::Approx(omega).epsilon(1e-14));
  // columns are (1,∓1)/√2 up to phase
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index k = 0; k < 2; ++k) {
    CHECK(std::abs(sys.eigenvectors(0, k)) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
    CHECK(std::abs(sys.eigenvectors(1, k)) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  }
  const Matrix rebuilt = sys.eigenvectors * sys.eigenvalues.asDiagonal() *
                         sys.eigenvectors.adjoint();
  CHECK(max_abs(rebuilt - two_level_coupling(omega)) < 1e-12);
}

TEST_CASE("eigendecomposition rejects non-Hermitian input") {
  Matrix bad(2, 2);
  bad << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(hermitian_eigendecompose(bad), std::invalid_argument);
  CHECK_THROWS_AS(HamiltonianOperator{bad}, std::invalid_argument);
}

TEST_CASE("eigendecomposition: random Hermitian reconstructs and sorts") {
  auto gen = qt::rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + static_cast<Index>(gen() % 5);
    const Matrix h = qt::random_hermitian(d, gen);
    const Eigensystem sys = hermitian_eigendecompose(h);
    for (Index k = 1; k < d; ++k) CHECK(sys.eigenvalues(k) >= sys.eigenvalues(k - 1));
    const Matrix gram = sys.eigenvectors.adjoint() * sys.eigenvectors;
    CHECK(max_abs(gram - Matrix::Identity(d, d)) < 1e-10);
    const Matrix diag =
        sys.eigenvectors.adjoint() * h * sys.eigenvectors;
    for (Index i = 0; i < d; ++i) {
      CHECK(std::abs(diag(i, i).real() - sys.eigenvalues(i)) < 1e-10);
    }
  }
}

TEST_CASE("propagator at t = 0 is the identity, exactly") {
  auto gen = qt::rng(12);
  const HamiltonianOperator h(qt::random_hermitian(4, gen));
  const Propagator u = propagator(h, 0.0);
  CHECK(max_abs(u.matrix() - Matrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("propagator of the symmetric coupling gives sin^2 transfer") {
  const double omega = 1.3;
  const HamiltonianOperator h(two_level_coupling(omega));
  for (const double t : {0.1, 0.7, 2.9, 6.0}) {
    const Propagator u = propagator(h, t);
    const double transfer = std::norm(u.matrix()(0, 1));
    CHECK(transfer == doctest::Approx(std::sin(omega * t) * std::sin(omega * t))
                          .epsilon(1e-12));
  }
}

TEST_CASE("propagator of a diagonal Hamiltonian is a pure phase") {
  Matrix h = Matrix::Zero(3, 3);
  h(0, 0) = 0.5;
  h(1, 1) = -1.0;
  h(2, 2) = 2.0;
  const Propagator u = propagator(HamiltonianOperator(h), 1.7);
  for (Index n = 0; n < 3; ++n) {
    CHECK(std::abs(u.matrix()(n, n)) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(std::abs(u.matrix()(0, 1)) == 0.0);
}

TEST_CASE("propagator group law U(t1+t2) = U(t1) U(t2)") {
  auto gen = qt::rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + static_cast<Index>(gen() % 5);
    const HamiltonianOperator h(qt::random_hermitian(d, gen));
    const double t1 = qt::uniform(gen, 0.0, 10.0);
    const double t2 = qt::uniform(gen, 0.0, 10.0);
    const Matrix lhs = propagator(h, t1 + t2).matrix();
    const Matrix rhs = propagator(h, t1).matrix() * propagator(h, t2).matrix();
    CHECK(max_abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("evolution preserves norm, trace, and energy") {
  auto gen = qt::rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = 2 + static_cast<Index>(gen() % 5);
    const HamiltonianOperator h(qt::random_hermitian(d, gen));
    const StateVector psi = qt::random_state(d, gen);
    const Propagator u = propagator(h, qt::uniform(gen, 0.1, 5.0));

    const StateVector evolved = evolve_state(u, psi);
    CHECK(evolved.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(energy_expectation(evolved, h) ==
          doctest::Approx(energy_expectation(psi, h)).epsilon(1e-10));

    const DensityMatrix w = DensityMatrix::pure(psi);
    const DensityMatrix moved = evolve_density(u, w);
    CHECK(moved.trace_real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(energy_expectation(moved, h) ==
          doctest::Approx(energy_expectation(w, h)).epsilon(1e-10));

    // pure-state consistency: U|ψ⟩⟨ψ|U† = |Uψ⟩⟨Uψ|
    const DensityMatrix direct = DensityMatrix::pure(evolved);
    CHECK(max_abs(moved.matrix() - direct.matrix()) < 1e-12);
  }
}

TEST_CASE("half Rabi period moves the excited population completely") {
  const double omega = 0.9;
  const HamiltonianOperator h(two_level_coupling(omega));
  const StateVector psi0 = StateVector::basis_state(2, 0);
  const double t = std::numbers::pi / (2.0 * omega);
  const StateVector moved = evolve_state(propagator(h, t), psi0);
  CHECK(std::norm(moved.amplitudes()(0)) < 1e-28);
  CHECK(std::norm(moved.amplitudes()(1)) == doctest::Approx(1.0).epsilon(1e-12));
  // amplitude is −i up to the global phase convention
  CHECK(moved.amplitudes()(1).imag() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("evolve_state rejects dimension mismatch") {
  const HamiltonianOperator h(two_level_coupling(1.0));
  const Propagator u = propagator(h, 1.0);
  CHECK_THROWS_AS(evolve_state(u, StateVector::basis_state(3, 0)),
                  std::invalid_argument);
}

TEST_CASE("energy expectation examples") {
  Matrix h01 = Matrix::Zero(2, 2);
  h01(1, 1) = 1.0;
  CHECK(energy_expectation(StateVector::basis_state(2, 1),
                           HamiltonianOperator(h01)) == doctest::Approx(1.0));

  const double omega = 0.37;
  Vector plus(2);
  plus << 1.0, 1.0;
  CHECK(energy_expectation(StateVector(plus),
                           HamiltonianOperator(two_level_coupling(omega))) ==
        doctest::Approx(omega).epsilon(1e-12));

  auto gen = qt::rng(15);
  const Matrix hr = qt::random_hermitian(4, gen);
  const HamiltonianOperator h(hr);
  const Eigensystem& sys = h.eigensystem();
  for (Index k = 0; k < 4; ++k) {
    CHECK(energy_expectation(StateVector(sys.eigenvectors.col(k)), h) ==
          doctest::Approx(sys.eigenvalues(k)).epsilon(1e-10));
  }
}

TEST_CASE("density matrix validation") {
  Matrix not_unit_trace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix::from_matrix(not_unit_trace), std::invalid_argument);

  Matrix negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(DensityMatrix::from_matrix(negative), std::invalid_argument);

  Matrix fine(2, 2);
  fine << 0.25, 0.0, 0.0, 0.75;
  CHECK(DensityMatrix::from_matrix(fine).trace_real() == doctest::Approx(1.0));
}

TEST_CASE("mixture basis validation and diagonal densities") {
  CHECK_THROWS_AS(MixtureBasis(Matrix::Ones(2, 2)), std::invalid_argument);

  auto gen = qt::rng(16);
  const MixtureBasis basis(qt::random_unitary(3, gen));
  RealVector populations(3);
  populations << 0.2, 0.3, 0.5;
  const DensityMatrix w = basis.diagonal_density(populations);
  CHECK(w.trace_real() == doctest::Approx(1.0).epsilon(1e-12));
  for (Index n = 0; n < 3; ++n) {
    const Complex diag =
        (basis.vector(n).adjoint() * w.matrix() * basis.vector(n))(0, 0);
    CHECK(diag.real() == doctest::Approx(populations(n)).epsilon(1e-12));
  }

  RealVector bad(3);
  bad << 0.7, 0.7, -0.4;
  CHECK_THROWS_AS(basis.diagonal_density(bad), std::invalid_argument);
}
