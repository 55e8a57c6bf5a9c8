#pragma once

// Trace-preserving conditional expectations onto approximant masas and the
// finite-level estimate of d_{inf,2}(A_n(s), A_n(t)) = ||E_s - E_t||_{inf,2}.

#include <cstdint>
#include <optional>
#include <vector>

#include "tauer/construction.hpp"

namespace tauer {

enum class ApplicationStrategy { kDense, kFactorized };

class ExpectationOperator {
 public:
  /// labels must be the minimal projections of one masa (pairwise
  /// orthogonal rank-one labels summing to the identity of their leg range);
  /// throws std::invalid_argument otherwise. Orthogonality is checked
  /// pairwise for up to 4096 labels.
  /// Dense application is available when the leg-range dimension fits the
  /// dense budget; otherwise only factorized coefficients are.
  ExpectationOperator(std::vector<ProjLabel> labels, const LegFamilies& families);

  ApplicationStrategy strategy() const { return strategy_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<ProjLabel>& labels() const { return labels_; }

  /// sum_f <v_f, x v_f> f. Dense strategy only.
  ComplexMatrix apply(const ComplexMatrix& x) const;

  /// <v_f, x v_f> for every label f. Dense strategy only.
  ComplexVector coefficients(const ComplexMatrix& x) const;

  /// <v_f, x v_f> for an elementary tensor x = x_first (x) ... (x) x_last,
  /// one factor per leg, computed leg by leg. Works at any dimension.
  ComplexVector coefficients_factorized(const std::vector<ComplexMatrix>& leg_factors) const;

  /// ||E(x)||_2 from the coefficients: sqrt(sum |c_f|^2 / dim).
  double image_norm(const ComplexVector& coefficients) const;

  /// Columns are the label vectors (dense strategy only).
  const ComplexMatrix& basis() const;

 private:
  std::vector<ProjLabel> labels_;
  const LegFamilies* families_;
  Eigen::Index dim_;
  ApplicationStrategy strategy_;
  ComplexMatrix basis_;
};

ComplexMatrix apply_expectation(const ExpectationOperator& e, const ComplexMatrix& x);

/// Expectation onto A_n(t) in N_n.
ExpectationOperator approximant_expectation(const TauerConstruction& c, const TowerRational& t,
                                            int n);

/// max over random unitaries x in N_n of
/// || E_{A_n'(t)}(x (x) 1) - E_{A_n(t)}(x) (x) 1 ||_2.
double compatibility_defect(const TauerConstruction& c, const TowerRational& t, int n,
                            int n_prime, int samples, std::uint64_t seed);

struct GapEstimate {
  TowerRational s;
  TowerRational t;
  int level = 0;
  /// max_u ||E_s(u) - E_t(u)||_2 over probe unitaries u.
  double lower = 0.0;
  /// Largest singular value of E_s - E_t on the Hilbert-Schmidt space by
  /// matrix-free power iteration (principal-angle value at levels where
  /// dense application is refused).
  double upper = 0.0;
  /// Independent value of the same singular value from the principal angles
  /// between the two masas: sqrt(1 - sigma_min(G)^2), G_ab = |<v_a, w_b>|^2.
  double upper_principal_angles = 0.0;
  int probes = 0;
  int iterations = 0;
  bool converged = false;
  /// 2 sqrt|s - t|.
  double bound = 0.0;
};

struct GapOptions {
  int random_probes = 8;
  int max_iterations = 500;
  double relative_tolerance = 1e-8;
  std::uint64_t seed = 1;
};

/// Throws std::invalid_argument when A_n(s) or A_n(t) is not a masa.
GapEstimate gap_estimate(const TauerConstruction& c, const TowerRational& s,
                         const TowerRational& t, int n, const GapOptions& options = {});

/// The same singular value as upper_principal_angles, from the Gram matrix
/// of trace pairings between two complete label sets of one level.
double principal_angle_gap(const std::vector<ProjLabel>& a, const std::vector<ProjLabel>& b,
                           const LegFamilies& families);

/// Pairing matrix G_ab = trace_pairing(a_i, b_j).
Eigen::MatrixXd pairing_matrix(const std::vector<ProjLabel>& a, const std::vector<ProjLabel>& b,
                               const LegFamilies& families);

struct DistanceBound {
  /// 2 sqrt|s - t|.
  double sqrt_bound = 0.0;
  /// 2 ||1 - q||_2 with q the common cutdown at the supplied level.
  std::optional<double> cutdown_bound;
  /// tr(1 - q) as an exact rational, when a level is supplied.
  std::optional<BigRational> cutdown_defect_trace;
};

DistanceBound path_distance_bound(const TowerRational& s, const TowerRational& t);
DistanceBound path_distance_bound(const TauerConstruction& c, const TowerRational& s,
                                  const TowerRational& t, int n);

}  // namespace tauer
