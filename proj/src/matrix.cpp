#include "tauer/matrix.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace tauer {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

ComplexMatrix kron_chain(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) throw std::invalid_argument("kron_chain of an empty list");
  ComplexMatrix out = factors.front();
  for (const auto& f : factors.subspan(1)) out = kron(out, f);
  return out;
}

Complex normalized_trace(const ComplexMatrix& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("trace of a non-square matrix");
  return x.trace() / static_cast<double>(x.rows());
}

double two_norm(const ComplexMatrix& x) {
  // tr(x* x) / dim without forming the product.
  return std::sqrt(x.squaredNorm() / static_cast<double>(x.rows()));
}

double operator_norm(const ComplexMatrix& x) {
  Eigen::JacobiSVD<ComplexMatrix> svd(x);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return two_norm(a - b) <= tol;
}

ComplexMatrix random_gaussian(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

ComplexMatrix random_unitary(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("unitary dimension must be >= 1");
  const ComplexMatrix g = random_gaussian(dim, seed);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

Complex root_of_unity(std::int64_t k, std::int64_t n) {
  std::int64_t r = k % n;
  if (r < 0) r += n;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
  return std::polar(1.0, angle);
}

ComplexMatrix clock_matrix(Eigen::Index p) {
  ComplexMatrix z = ComplexMatrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) z(j, j) = root_of_unity(j, p);
  return z;
}

ComplexMatrix shift_matrix(Eigen::Index p) {
  ComplexMatrix x = ComplexMatrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) x((j + 1) % p, j) = 1.0;
  return x;
}

namespace {

template <typename T>
void write_le(std::ostream& out, T value) {
  auto bits = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  out.write(bits.data(), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  std::array<char, sizeof(T)> bits{};
  if (!in.read(bits.data(), sizeof(T))) throw std::runtime_error("truncated matrix dump");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bits.begin(), bits.end());
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_matrix_binary(std::ostream& out, const ComplexMatrix& x) {
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      write_le<double>(out, x(i, j).real());
      write_le<double>(out, x(i, j).imag());
    }
  }
}

ComplexMatrix read_matrix_binary(std::istream& in) {
  const auto dim = static_cast<Eigen::Index>(read_le<std::uint64_t>(in));
  if (dim > kDenseDimLimit) throw std::runtime_error("matrix dump exceeds dense limit");
  ComplexMatrix x(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = read_le<double>(in);
      const double im = read_le<double>(in);
      x(i, j) = Complex(re, im);
    }
  }
  return x;
}

}  // namespace tauer
