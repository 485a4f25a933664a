// Shared generators for randomized tests. Everything is seeded explicitly so
// failures reproduce.

#pragma once

#include "qjump/hilbert.hpp"

#include <random>

namespace qjump::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
}

inline Matrix random_hermitian(Index d, std::mt19937_64& gen, bool real_only = false) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      a(i, j) = real_only ? Complex(gauss(gen), 0.0)
                          : Complex(gauss(gen), gauss(gen));
    }
  }
  return 0.5 * (a + a.adjoint().eval());
}

// Haar-ish random unitary from the QR of a complex Gaussian matrix.
inline Matrix random_unitary(Index d, std::mt19937_64& gen) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(gauss(gen), gauss(gen));
  }
  const Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

inline StateVector random_state(Index d, std::mt19937_64& gen) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = Complex(gauss(gen), gauss(gen));
  return StateVector(std::move(v));
}

}  // namespace qjump::testing
