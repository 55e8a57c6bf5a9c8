#pragma once

// Families of pairwise orthogonal masas in M_p (p prime), realized as the
// mutually unbiased eigenbases of the Weyl operators Z, X, XZ, ..., XZ^{p-1}.

#include <cstdint>
#include <optional>
#include <vector>

#include "tauer/matrix.hpp"

namespace tauer {

/// A masa of M_p given by a unitary whose columns span its minimal
/// projections e_l = v_l v_l*.
struct MasaBasis {
  ComplexMatrix basis;

  Eigen::Index dim() const { return basis.rows(); }
  ComplexMatrix projection(Eigen::Index l) const {
    return basis.col(l) * basis.col(l).adjoint();
  }
};

/// max_{l,l'} |tr(e_l f_l') - tr(e_l) tr(f_l')| with the normalized trace.
/// Zero exactly when the two masas are orthogonal.
double orthogonality_defect(const MasaBasis& a, const MasaBasis& b);

class OrthoFamily {
 public:
  /// Masa 0 is the clock eigenbasis (the diagonal); masa m >= 1 is the
  /// eigenbasis of X Z^{m-1} (scaled by -i when p = 2 so that the third
  /// masa is the eigenbasis of the Pauli Y). Vector l carries eigenvalue
  /// w^l, w = exp(2 pi i / p), and its first coordinate is real positive for m >= 1.
  OrthoFamily(std::uint32_t p, std::uint32_t count, int leg = 0);

  int leg() const { return leg_; }
  std::uint32_t prime() const { return p_; }
  std::uint32_t size() const { return count_; }

  /// Column v^{(m)}_l. Throws std::out_of_range on bad indices.
  ComplexVector vector(std::uint32_t m, std::uint32_t l) const;
  /// <v^{(m)}_l, v^{(m2)}_{l2}> (conjugate-linear in the first slot).
  Complex overlap(std::uint32_t m, std::uint32_t l, std::uint32_t m2,
                  std::uint32_t l2) const;

  MasaBasis basis(std::uint32_t m) const;

  /// The operator whose eigenbasis is masa m.
  ComplexMatrix weyl_operator(std::uint32_t m) const;
  /// sum_l w^l e^{(m)}_l, a trace-free unitary of masa m.
  ComplexMatrix trace_free_unitary(std::uint32_t m) const;

 private:
  Complex coordinate(std::uint32_t m, std::uint32_t l, std::uint32_t k) const;
  void check(std::uint32_t m, std::uint32_t l) const;

  std::uint32_t p_;
  std::uint32_t count_;
  int leg_;
  // Dense bases are cached only when p * p * count is small; large legs
  // evaluate columns from the closed form on demand.
  std::vector<ComplexMatrix> cache_;
};

/// Throws std::invalid_argument when p is not prime or count > p + 1.
OrthoFamily weyl_family(std::uint32_t p, std::uint32_t count, int leg = 0);

ComplexVector min_projection_vector(const OrthoFamily& family, std::uint32_t m,
                                    std::uint32_t l);

/// Largest orthogonality_defect over distinct masa pairs of the family.
double family_cross_defect(const OrthoFamily& family);
/// Largest ||sum_l e_l - 1||_2 over the masas of the family.
double family_completeness_defect(const OrthoFamily& family);

}  // namespace tauer
