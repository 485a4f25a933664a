// hilbert.hpp — Finite-dimensional complex Hilbert space: states, Hermitian
// operators, exact unitary propagators, density matrices, orthonormal bases.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace qjump {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Default numerical tolerances. The library works in natural units (ħ = 1):
// energies are inverse times and all amplitudes are dimensionless.
namespace tol {
inline constexpr double kHermiticity = 1e-12;
inline constexpr double kUnitarity = 1e-10;
inline constexpr double kNorm = 1e-12;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-10;
inline constexpr double kOrthonormality = 1e-10;
inline constexpr double kImaginaryLeak = 1e-10;
}  // namespace tol

// Largest |entry| of a complex matrix; zero for empty matrices.
double max_abs(const Matrix& a);

bool is_hermitian(const Matrix& a, double tolerance = tol::kHermiticity);

// --------------------------- StateVector ------------------------------------

// Unit-norm complex amplitude vector. Construction normalizes; a vector with
// norm below 1e-12 is rejected.
class StateVector {
 public:
  explicit StateVector(Vector amplitudes);

  static StateVector basis_state(Index dim, Index index);

  const Vector& amplitudes() const { return amplitudes_; }
  Index dim() const { return amplitudes_.size(); }

 private:
  Vector amplitudes_;
};

// --------------------------- HamiltonianOperator ----------------------------

struct Eigensystem {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary; column k pairs with eigenvalues[k]
};

// H = V diag(λ) V† with λ ascending and V unitary within 1e-10. Throws
// std::invalid_argument when the input is not Hermitian. Exactly diagonal
// input yields permutation eigenvectors (identity when already ascending).
Eigensystem hermitian_eigendecompose(const Matrix& h,
                                     double hermiticity_tol = tol::kHermiticity);

// Hermitian operator with a lazily computed, cached eigendecomposition.
// Immutable after construction; copies share the cache. Concurrent first
// access is serialized through std::call_once.
class HamiltonianOperator {
 public:
  explicit HamiltonianOperator(Matrix matrix,
                               double hermiticity_tol = tol::kHermiticity);

  const Matrix& matrix() const { return shared_->matrix; }
  Index dim() const { return shared_->matrix.rows(); }

  const Eigensystem& eigensystem() const;

  // max eigenvalue − min eigenvalue; 0 for a 1×1 operator.
  double spectral_range() const;

 private:
  struct Shared {
    Matrix matrix;
    mutable std::once_flag once;
    mutable Eigensystem eigensystem;
  };
  std::shared_ptr<const Shared> shared_;
};

// --------------------------- Propagator -------------------------------------

// Unitary time-evolution operator U(t) = exp(−iHt). The factory below builds
// it from the eigendecomposition, so unitarity holds to round-off and
// duration 0 gives the identity exactly.
class Propagator {
 public:
  Propagator(Matrix matrix, double duration,
             double unitarity_tol = tol::kUnitarity);

  static Propagator identity(Index dim);

  const Matrix& matrix() const { return matrix_; }
  double duration() const { return duration_; }
  Index dim() const { return matrix_.rows(); }

 private:
  Matrix matrix_;
  double duration_;
};

Propagator propagator(const HamiltonianOperator& h, double t);

// --------------------------- DensityMatrix ----------------------------------

// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  // Full validation: Hermitian within 1e-12, trace 1 within 1e-10, smallest
  // eigenvalue ≥ −1e-10.
  static DensityMatrix from_matrix(Matrix m);

  static DensityMatrix pure(const StateVector& psi);

  const Matrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }
  double trace_real() const { return matrix_.trace().real(); }

 private:
  struct Unchecked {};
  DensityMatrix(Matrix m, Unchecked) : matrix_(std::move(m)) {}

  Matrix matrix_;
  friend class MixtureBasis;
  friend DensityMatrix evolve_density(const Propagator&, const DensityMatrix&);
};

// --------------------------- MixtureBasis -----------------------------------

// Orthonormal basis {|γ_n⟩} stored as matrix columns. Stochastic transitions
// produce mixtures diagonal in one of these bases.
class MixtureBasis {
 public:
  explicit MixtureBasis(Matrix vectors_as_columns,
                        double orthonormality_tol = tol::kOrthonormality);

  static MixtureBasis standard(Index dim);

  const Matrix& vectors() const { return columns_; }
  Vector vector(Index n) const { return columns_.col(n); }
  Index dim() const { return columns_.rows(); }
  bool is_standard() const { return standard_; }

  // Σ_n |γ_n⟩ p_n ⟨γ_n|. Populations must lie in [−1e-12, 1+1e-12] and sum
  // to 1 within 1e-10. For the standard basis the result is exactly diagonal.
  DensityMatrix diagonal_density(const RealVector& populations) const;

 private:
  Matrix columns_;
  bool standard_ = false;
};

// --------------------------- Operations -------------------------------------

// result = U·ψ. Norm is preserved to round-off by unitarity.
StateVector evolve_state(const Propagator& u, const StateVector& psi);

// result = U W U†. Trace and spectrum are preserved to round-off.
DensityMatrix evolve_density(const Propagator& u, const DensityMatrix& w);

// ⟨v|H|v⟩. Throws std::runtime_error if the imaginary residue exceeds 1e-10;
// smaller residue is discarded.
double energy_expectation(const StateVector& v, const HamiltonianOperator& h);

double energy_expectation(const DensityMatrix& w, const HamiltonianOperator& h);

}  // namespace qjump
