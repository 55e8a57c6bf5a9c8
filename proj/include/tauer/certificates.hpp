#pragma once

// Finite-level certificates for the structural claims about the path A(t):
// singularity witnesses, orthogonality of block masas, the two witness
// computations behind Gamma(A(t)) = t, and the common-cutdown equalities.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tauer/expectations.hpp"

namespace tauer {

enum class CertificateKind {
  kSingularity,
  kBlockOrthogonality,
  kGammaCommutation,
  kAnticommutation,
  kCutdown,
};

std::string to_string(CertificateKind kind);

struct Certificate {
  CertificateKind kind;
  std::vector<std::pair<std::string, std::string>> params{};
  double defect = 0.0;
  double threshold = 0.0;
  std::string witness{};
  std::uint64_t seed = 0;

  bool pass() const { return defect <= threshold; }
};

inline constexpr double kExactZeroThreshold = 1e-10;
inline constexpr double kFloatSumThreshold = 1e-8;

/// For each minimal projection e = f_m(t) of A_{n1}(t) (n1 even), the
/// trace-free unitary w_e = sum_l w^l e^{(m)}_l of its block masa (tensored
/// with 1 up to level n2) and the value max_{f != e} ||E_{A^{(f)}_{n2,n1}}(w_e)||_2.
/// Computed through leg overlaps; n2 defaults to n1 + 1.
Certificate singularity_certificate(const TauerConstruction& c, const TowerRational& t, int n1,
                                    double epsilon = kExactZeroThreshold, int n2 = 0);

/// max |tr(gh) - tr(g)tr(h)| over minimal projections g, h of the block masas
/// of f_m and f_m2 between levels n and n1, via trace pairings.
/// Requires t K_n <= m < m2 < K_n.
Certificate block_orthogonality_check(const TauerConstruction& c, const TowerRational& t, int n,
                                      std::int64_t m, std::int64_t m2, int n1,
                                      double threshold = kExactZeroThreshold);

/// u = p (x) v with p = sum_{m < t K_n} f_m(t) and v the trace-free unitary
/// of the extra masa D^{(K_n)} on leg n + 1 (n odd). Checks membership of u
/// in A_{n+1}(t), tr(u) = 0 and ||[u, pxp (x) 1]||_2 over random x in N_n.
Certificate gamma_commutator_check(const TauerConstruction& c, const TowerRational& t, int n,
                                   int samples, std::uint64_t seed,
                                   double threshold = kExactZeroThreshold);

enum class CornerUnitary {
  /// u = sum_{q in P} q (x) w_q with w_q a trace-free unitary of the
  /// block masa of q (random cyclic phase shift per block).
  kTraceFreeBlocks,
  /// u = q, which has tr(uq) = tr(q).
  kProjection,
};

/// For labels P of A_n(t) above the cut: x cycles P through rank-one partial
/// isometries, q = sum P, and u lives in A_{n+1}(t) q. Verifies
///   ||[u, x] q||_2^2 = 2 tr(q) - 2 Re[conj(tr(x u q x*)) tr(uq)] / tr(q)
/// and, when tr(uq) = 0, ||[u, x] q||_2^2 = 2 tr(q).
Certificate anticommutation_check(const TauerConstruction& c, const TowerRational& t, int n,
                                  const std::vector<std::int64_t>& selection, std::uint64_t seed,
                                  CornerUnitary unitary = CornerUnitary::kTraceFreeBlocks,
                                  double threshold = kFloatSumThreshold);

/// Exact label equality f_m(s) = f_m(t) for m < s K_n and m >= t K_n, with
/// the labels of both parameters recomputed by the uncached recursion, and
/// tr(q) = 1 - (t - s) as exact rationals. The defect counts failures.
Certificate cutdown_equality_check(const TauerConstruction& c, const TowerRational& s,
                                   const TowerRational& t, int n);

struct ContinuityReport {
  TowerRational s;
  TowerRational t;
  int level = 0;
  /// |Gamma(A(s)) - Gamma(A(t))| = |s - t|, exact.
  BigRational gamma_difference;
  /// 15 * 2 sqrt|s - t|.
  double implied_bound = 0.0;
  double gap_lower = 0.0;
  double gap_upper = 0.0;
  bool pass = false;
};

/// Consistency sentinel: |s - t| <= 30 sqrt|s - t| must hold for every pair;
/// a failure means the rational bookkeeping is corrupt.
ContinuityReport gamma_continuity_report(const TowerRational& s, const TowerRational& t,
                                         int level, const GapEstimate& gap);

}  // namespace tauer
