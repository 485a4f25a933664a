#include "qjump/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace qjump {

double max_abs(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  return max_abs(a - a.adjoint()) <= tolerance;
}

// --------------------------- StateVector ------------------------------------

StateVector::StateVector(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) {
    throw std::invalid_argument("StateVector: empty amplitude vector");
  }
  const double norm = amplitudes_.norm();
  if (norm < tol::kNorm) {
    throw std::invalid_argument("StateVector: amplitude vector has near-zero norm");
  }
  amplitudes_ /= norm;
}

StateVector StateVector::basis_state(Index dim, Index index) {
  if (index < 0 || index >= dim) {
    throw std::invalid_argument("StateVector: basis index out of range");
  }
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

// --------------------------- eigendecomposition -----------------------------

namespace {

bool exactly_diagonal(const Matrix& h) {
  for (Index i = 0; i < h.rows(); ++i) {
    for (Index j = 0; j < h.cols(); ++j) {
      if (i != j && h(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

// Diagonal input: sort the diagonal and permute identity columns. Keeps the
// eigenvectors exact (identity when the diagonal is already ascending).
Eigensystem diagonal_eigensystem(const Matrix& h) {
  const Index d = h.rows();
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return h(a, a).real() < h(b, b).real();
  });
  Eigensystem sys;
  sys.eigenvalues.resize(d);
  sys.eigenvectors = Matrix::Zero(d, d);
  for (Index k = 0; k < d; ++k) {
    sys.eigenvalues(k) = h(order[static_cast<std::size_t>(k)],
                           order[static_cast<std::size_t>(k)]).real();
    sys.eigenvectors(order[static_cast<std::size_t>(k)], k) = 1.0;
  }
  return sys;
}

}  // namespace

Eigensystem hermitian_eigendecompose(const Matrix& h, double hermiticity_tol) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw std::invalid_argument("hermitian_eigendecompose: matrix must be square and non-empty");
  }
  if (!is_hermitian(h, hermiticity_tol)) {
    throw std::invalid_argument("hermitian_eigendecompose: matrix is not Hermitian");
  }
  if (exactly_diagonal(h)) {
    return diagonal_eigensystem(h);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint().eval()));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eigendecompose: eigensolver failed");
  }
  return Eigensystem{solver.eigenvalues(), solver.eigenvectors()};
}

// --------------------------- HamiltonianOperator ----------------------------

HamiltonianOperator::HamiltonianOperator(Matrix matrix, double hermiticity_tol) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw std::invalid_argument("HamiltonianOperator: matrix must be square and non-empty");
  }
  if (!is_hermitian(matrix, hermiticity_tol)) {
    throw std::invalid_argument("HamiltonianOperator: matrix is not Hermitian");
  }
  auto shared = std::make_shared<Shared>();
  shared->matrix = std::move(matrix);
  shared_ = std::move(shared);
}

const Eigensystem& HamiltonianOperator::eigensystem() const {
  std::call_once(shared_->once, [this] {
    shared_->eigensystem = hermitian_eigendecompose(shared_->matrix);
  });
  return shared_->eigensystem;
}

double HamiltonianOperator::spectral_range() const {
  const auto& ev = eigensystem().eigenvalues;
  return ev(ev.size() - 1) - ev(0);
}

// --------------------------- Propagator -------------------------------------

Propagator::Propagator(Matrix matrix, double duration, double unitarity_tol)
    : matrix_(std::move(matrix)), duration_(duration) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw std::invalid_argument("Propagator: matrix must be square and non-empty");
  }
  const Matrix gram = matrix_.adjoint() * matrix_;
  if (max_abs(gram - Matrix::Identity(matrix_.rows(), matrix_.cols())) > unitarity_tol) {
    throw std::invalid_argument("Propagator: matrix is not unitary");
  }
}

Propagator Propagator::identity(Index dim) {
  return Propagator(Matrix::Identity(dim, dim), 0.0);
}

Propagator propagator(const HamiltonianOperator& h, double t) {
  if (!std::isfinite(t)) {
    throw std::invalid_argument("propagator: time must be finite");
  }
  if (t == 0.0) {
    return Propagator::identity(h.dim());
  }
  const Eigensystem& sys = h.eigensystem();
  Vector phases(sys.eigenvalues.size());
  for (Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -sys.eigenvalues(k) * t));
  }
  Matrix u = sys.eigenvectors * phases.asDiagonal() * sys.eigenvectors.adjoint();
  return Propagator(std::move(u), t);
}

// --------------------------- DensityMatrix ----------------------------------

DensityMatrix DensityMatrix::from_matrix(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
  }
  if (!is_hermitian(m, tol::kHermiticity)) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  if (std::abs(m.trace().real() - 1.0) > tol::kTrace ||
      std::abs(m.trace().imag()) > tol::kTrace) {
    throw std::invalid_argument("DensityMatrix: trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint().eval()),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("DensityMatrix: eigensolver failed");
  }
  if (solver.eigenvalues().minCoeff() < -tol::kPositivity) {
    throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
  }
  return DensityMatrix(std::move(m), Unchecked{});
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  Matrix m = psi.amplitudes() * psi.amplitudes().adjoint();
  return DensityMatrix(std::move(m), Unchecked{});
}

// --------------------------- MixtureBasis -----------------------------------

MixtureBasis::MixtureBasis(Matrix vectors_as_columns, double orthonormality_tol)
    : columns_(std::move(vectors_as_columns)) {
  if (columns_.rows() != columns_.cols() || columns_.rows() == 0) {
    throw std::invalid_argument("MixtureBasis: expected a full square basis");
  }
  const Matrix gram = columns_.adjoint() * columns_;
  if (max_abs(gram - Matrix::Identity(columns_.rows(), columns_.cols())) >
      orthonormality_tol) {
    throw std::invalid_argument("MixtureBasis: vectors are not orthonormal");
  }
  standard_ = columns_.isIdentity(0.0);
}

MixtureBasis MixtureBasis::standard(Index dim) {
  if (dim <= 0) {
    throw std::invalid_argument("MixtureBasis: dimension must be positive");
  }
  return MixtureBasis(Matrix::Identity(dim, dim));
}

DensityMatrix MixtureBasis::diagonal_density(const RealVector& populations) const {
  if (populations.size() != dim()) {
    throw std::invalid_argument("MixtureBasis: population vector has wrong dimension");
  }
  double sum = 0.0;
  for (Index n = 0; n < populations.size(); ++n) {
    if (populations(n) < -1e-12 || populations(n) > 1.0 + 1e-12) {
      throw std::invalid_argument("MixtureBasis: population outside [0, 1]");
    }
    sum += populations(n);
  }
  if (std::abs(sum - 1.0) > tol::kTrace) {
    throw std::invalid_argument("MixtureBasis: populations do not sum to 1");
  }
  if (standard_) {
    Matrix m = Matrix::Zero(dim(), dim());
    for (Index n = 0; n < dim(); ++n) m(n, n) = populations(n);
    return DensityMatrix(std::move(m), DensityMatrix::Unchecked{});
  }
  Matrix m = columns_ * populations.cast<Complex>().asDiagonal() * columns_.adjoint();
  return DensityMatrix(std::move(m), DensityMatrix::Unchecked{});
}

// --------------------------- Operations -------------------------------------

StateVector evolve_state(const Propagator& u, const StateVector& psi) {
  if (u.dim() != psi.dim()) {
    throw std::invalid_argument("evolve_state: dimension mismatch");
  }
  return StateVector(u.matrix() * psi.amplitudes());
}

DensityMatrix evolve_density(const Propagator& u, const DensityMatrix& w) {
  if (u.dim() != w.dim()) {
    throw std::invalid_argument("evolve_density: dimension mismatch");
  }
  Matrix m = u.matrix() * w.matrix() * u.matrix().adjoint();
  return DensityMatrix(std::move(m), DensityMatrix::Unchecked{});
}

double energy_expectation(const StateVector& v, const HamiltonianOperator& h) {
  if (v.dim() != h.dim()) {
    throw std::invalid_argument("energy_expectation: dimension mismatch");
  }
  const Complex e = v.amplitudes().dot(h.matrix() * v.amplitudes());
  if (std::abs(e.imag()) > tol::kImaginaryLeak) {
    throw std::runtime_error("energy_expectation: non-real expectation value");
  }
  return e.real();
}

double energy_expectation(const DensityMatrix& w, const HamiltonianOperator& h) {
  if (w.dim() != h.dim()) {
    throw std::invalid_argument("energy_expectation: dimension mismatch");
  }
  const Complex e = (w.matrix() * h.matrix()).trace();
  if (std::abs(e.imag()) > tol::kImaginaryLeak) {
    throw std::runtime_error("energy_expectation: non-real expectation value");
  }
  return e.real();
}

}  // namespace qjump
