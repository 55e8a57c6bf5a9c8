#pragma once

// Dense complex matrices with the normalized trace tr(1) = 1 and the
// associated 2-norm ||x||_2 = tr(x* x)^{1/2}.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>

#include <Eigen/Dense>

namespace tauer {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultTolerance = 1e-10;

/// Largest dimension any routine will materialize densely.
inline constexpr Eigen::Index kDenseDimLimit = 2048;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

/// Kronecker product in list order. Throws on an empty list.
ComplexMatrix kron_chain(std::span<const ComplexMatrix> factors);

Complex normalized_trace(const ComplexMatrix& x);

double two_norm(const ComplexMatrix& x);

/// Largest singular value.
double operator_norm(const ComplexMatrix& x);

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b,
                  double tol = kDefaultTolerance);

/// Haar-distributed unitary from QR of a complex Gaussian matrix, with the
/// phases of R's diagonal absorbed. Deterministic per seed.
ComplexMatrix random_unitary(Eigen::Index dim, std::uint64_t seed);

/// Complex Gaussian matrix with unit-variance entries.
ComplexMatrix random_gaussian(Eigen::Index dim, std::uint64_t seed);

/// Z = diag(1, w, ..., w^{p-1}), w = exp(2 pi i / p).
ComplexMatrix clock_matrix(Eigen::Index p);
/// X e_j = e_{j+1 mod p}.
ComplexMatrix shift_matrix(Eigen::Index p);

/// exp(2 pi i k / n) with k reduced mod n first.
Complex root_of_unity(std::int64_t k, std::int64_t n);

// Debug dump: little-endian f64 interleaved re/im, row-major, preceded by
// the dimension as u64. Not a stable format.
void write_matrix_binary(std::ostream& out, const ComplexMatrix& x);
ComplexMatrix read_matrix_binary(std::istream& in);

}  // namespace tauer
