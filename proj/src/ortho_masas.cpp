#include "tauer/ortho_masas.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tauer/tower.hpp"

namespace tauer {

namespace {

constexpr std::uint64_t kCacheEntryLimit = std::uint64_t{1} << 22;

}  // namespace

double orthogonality_defect(const MasaBasis& a, const MasaBasis& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("masa dimension mismatch");
  const double p = static_cast<double>(a.dim());
  // tr(e f) = |<v, w>|^2 / p and tr(e) = tr(f) = 1 / p.
  const Eigen::MatrixXd overlaps = (a.basis.adjoint() * b.basis).cwiseAbs2();
  return (overlaps.array() / p - 1.0 / (p * p)).abs().maxCoeff();
}

OrthoFamily::OrthoFamily(std::uint32_t p, std::uint32_t count, int leg)
    : p_(p), count_(count), leg_(leg) {
  if (!is_prime(BigInt(p))) {
    throw std::invalid_argument("masa dimension " + std::to_string(p) + " is not prime");
  }
  if (count == 0) throw std::invalid_argument("family size must be >= 1");
  if (static_cast<std::uint64_t>(count) > static_cast<std::uint64_t>(p) + 1) {
    throw std::invalid_argument("family size exceeds p+1");
  }
  const std::uint64_t entries = std::uint64_t{p} * p * count;
  if (entries <= kCacheEntryLimit) {
    cache_.reserve(count);
    for (std::uint32_t m = 0; m < count; ++m) {
      ComplexMatrix b(p, p);
      for (std::uint32_t l = 0; l < p; ++l) {
        for (std::uint32_t k = 0; k < p; ++k) b(k, l) = coordinate(m, l, k);
      }
      cache_.push_back(std::move(b));
    }
  }
}

Complex OrthoFamily::coordinate(std::uint32_t m, std::uint32_t l, std::uint32_t k) const {
  if (m == 0) return k == l ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  // Eigenvector of X Z^j (j = m - 1) for eigenvalue mu w^l:
  //   c_k = (mu w^l)^{-k} w^{j k (k-1) / 2} / sqrt(p),
  // where mu = 1 for odd p and mu = -i for p = 2 with j odd. Phases are
  // accumulated exactly in units of 1 / (2p) of a turn.
  const auto two_p = static_cast<__int128>(2) * p_;
  const __int128 j = m - 1;
  const __int128 kk = k;
  __int128 e = (j % two_p) * ((kk * (kk - 1)) % two_p) % two_p;
  e -= (2 * static_cast<__int128>(l) * kk) % two_p;
  if (p_ == 2 && (j % 2) == 1) e += kk;
  e %= two_p;
  if (e < 0) e += two_p;
  return root_of_unity(static_cast<std::int64_t>(e), static_cast<std::int64_t>(two_p)) /
         std::sqrt(static_cast<double>(p_));
}

void OrthoFamily::check(std::uint32_t m, std::uint32_t l) const {
  if (m >= count_ || l >= p_) throw std::out_of_range("masa or vector index out of range");
}

ComplexVector OrthoFamily::vector(std::uint32_t m, std::uint32_t l) const {
  check(m, l);
  if (!cache_.empty()) return cache_[m].col(l);
  ComplexVector v(p_);
  for (std::uint32_t k = 0; k < p_; ++k) v(k) = coordinate(m, l, k);
  return v;
}

Complex OrthoFamily::overlap(std::uint32_t m, std::uint32_t l, std::uint32_t m2,
                             std::uint32_t l2) const {
  check(m, l);
  check(m2, l2);
  if (!cache_.empty()) return cache_[m].col(l).dot(cache_[m2].col(l2));
  Complex sum = 0.0;
  for (std::uint32_t k = 0; k < p_; ++k) {
    sum += std::conj(coordinate(m, l, k)) * coordinate(m2, l2, k);
  }
  return sum;
}

MasaBasis OrthoFamily::basis(std::uint32_t m) const {
  check(m, 0);
  if (!cache_.empty()) return MasaBasis{cache_[m]};
  ComplexMatrix b(p_, p_);
  for (std::uint32_t l = 0; l < p_; ++l) {
    for (std::uint32_t k = 0; k < p_; ++k) b(k, l) = coordinate(m, l, k);
  }
  return MasaBasis{std::move(b)};
}

ComplexMatrix OrthoFamily::weyl_operator(std::uint32_t m) const {
  check(m, 0);
  const ComplexMatrix z = clock_matrix(p_);
  if (m == 0) return z;
  ComplexMatrix w = shift_matrix(p_);
  for (std::uint32_t j = 0; j + 1 < m; ++j) w = w * z;
  if (p_ == 2 && (m - 1) % 2 == 1) w *= Complex(0.0, 1.0);
  return w;
}

ComplexMatrix OrthoFamily::trace_free_unitary(std::uint32_t m) const {
  const MasaBasis b = basis(m);
  ComplexVector phases(p_);
  for (std::uint32_t l = 0; l < p_; ++l) phases(l) = root_of_unity(l, p_);
  return b.basis * phases.asDiagonal() * b.basis.adjoint();
}

OrthoFamily weyl_family(std::uint32_t p, std::uint32_t count, int leg) {
  return OrthoFamily(p, count, leg);
}

ComplexVector min_projection_vector(const OrthoFamily& family, std::uint32_t m,
                                    std::uint32_t l) {
  return family.vector(m, l);
}

double family_cross_defect(const OrthoFamily& family) {
  double worst = 0.0;
  for (std::uint32_t a = 0; a < family.size(); ++a) {
    const MasaBasis ba = family.basis(a);
    for (std::uint32_t b = a + 1; b < family.size(); ++b) {
      worst = std::max(worst, orthogonality_defect(ba, family.basis(b)));
    }
  }
  return worst;
}

double family_completeness_defect(const OrthoFamily& family) {
  double worst = 0.0;
  const auto p = static_cast<Eigen::Index>(family.prime());
  for (std::uint32_t m = 0; m < family.size(); ++m) {
    const MasaBasis b = family.basis(m);
    worst = std::max(worst, two_norm(b.basis * b.basis.adjoint() - ComplexMatrix::Identity(p, p)));
  }
  return worst;
}

}  // namespace tauer
