#include "tauer/expectations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tauer {

namespace {

// Dense power iteration is used up to this dimension; above it the gap is
// evaluated through the label pairing matrix.
constexpr Eigen::Index kPowerIterationDimLimit = 256;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double hs_norm(const ComplexMatrix& x) { return two_norm(x); }

// The pairwise check is quadratic in the label count; above this size only
// the count is checked.
constexpr std::size_t kOrthonormalityCheckLimit = 4096;

void require_complete_masa(const std::vector<ProjLabel>& labels, const LegFamilies& families) {
  const std::int64_t dim = label_space_dim(labels.front(), families);
  if (static_cast<std::int64_t>(labels.size()) != dim) {
    throw std::invalid_argument("labels do not form a complete masa");
  }
  if (labels.size() <= kOrthonormalityCheckLimit) {
    const double defect = orthonormality_defect(labels, families);
    if (defect > kDefaultTolerance) {
      throw std::invalid_argument("labels do not form a complete masa (orthonormality defect " +
                                  std::to_string(defect) + ")");
    }
  }
}

/// Phase vectors c (one entry per label) of the structured probe unitaries
/// sum_a c_a f_a built from one approximant: the global phase unitary and,
/// above level 1, the block phase unitaries w = sum_l w^l e_l for every
/// parent block (alone and all blocks at once).
std::vector<ComplexVector> structured_phases(std::int64_t size, std::int64_t block) {
  std::vector<ComplexVector> out;
  ComplexVector global(size);
  for (std::int64_t m = 0; m < size; ++m) global(m) = root_of_unity(m, size);
  out.push_back(std::move(global));
  if (block > 1 && block < size) {
    ComplexVector all(size);
    for (std::int64_t m = 0; m < size; ++m) all(m) = root_of_unity(m % block, block);
    out.push_back(std::move(all));
    for (std::int64_t j = 0; j < size / block; ++j) {
      ComplexVector one = ComplexVector::Ones(size);
      for (std::int64_t l = 0; l < block; ++l) one(j * block + l) = root_of_unity(l, block);
      out.push_back(std::move(one));
    }
  }
  return out;
}

std::vector<ComplexMatrix> dense_probes(const TauerConstruction& c, const TowerRational& s,
                                        const TowerRational& t, int n, const GapOptions& opt) {
  const int n_min = std::max({s.canonical_level(), t.canonical_level(), 1});
  std::vector<ComplexMatrix> probes;
  if (n > n_min) {
    // Probes of the lower level, embedded as x (x) 1, keep the lower bound
    // monotone in the level.
    const auto k = static_cast<Eigen::Index>(c.tower().prime_i64(n));
    const ComplexMatrix id = ComplexMatrix::Identity(k, k);
    for (const auto& u : dense_probes(c, s, t, n - 1, opt)) probes.push_back(kron(u, id));
  }
  const std::int64_t size = c.tower().product_i64(n);
  const std::int64_t block = c.tower().prime_i64(n);
  for (const auto* param : {&s, &t}) {
    const auto labels = c.approximant(*param, n)->labels();
    const ComplexMatrix v = label_basis(labels, c.families());
    for (const auto& phases : structured_phases(size, block)) {
      probes.push_back(v * phases.asDiagonal() * v.adjoint());
    }
  }
  for (int i = 0; i < opt.random_probes; ++i) {
    probes.push_back(random_unitary(size, mix_seed(opt.seed, static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(i))));
  }
  return probes;
}

}  // namespace

ExpectationOperator::ExpectationOperator(std::vector<ProjLabel> labels,
                                         const LegFamilies& families)
    : labels_(std::move(labels)), families_(&families), dim_(0) {
  if (labels_.empty()) throw std::invalid_argument("expectation onto an empty label set");
  dim_ = label_space_dim(labels_.front(), families);
  require_complete_masa(labels_, families);
  if (dim_ <= kDenseDimLimit) {
    strategy_ = ApplicationStrategy::kDense;
    basis_ = label_basis(labels_, families);
  } else {
    strategy_ = ApplicationStrategy::kFactorized;
  }
}

const ComplexMatrix& ExpectationOperator::basis() const {
  if (strategy_ != ApplicationStrategy::kDense) {
    throw std::length_error("dense materialization refused at this level");
  }
  return basis_;
}

ComplexVector ExpectationOperator::coefficients(const ComplexMatrix& x) const {
  const ComplexMatrix& v = basis();
  if (x.rows() != dim_ || x.cols() != dim_) throw std::invalid_argument("dimension mismatch");
  const ComplexMatrix xv = x * v;
  ComplexVector c(v.cols());
  for (Eigen::Index j = 0; j < v.cols(); ++j) c(j) = v.col(j).dot(xv.col(j));
  return c;
}

ComplexMatrix ExpectationOperator::apply(const ComplexMatrix& x) const {
  const ComplexVector c = coefficients(x);
  return basis_ * c.asDiagonal() * basis_.adjoint();
}

ComplexVector ExpectationOperator::coefficients_factorized(
    const std::vector<ComplexMatrix>& leg_factors) const {
  const ProjLabel& first = labels_.front();
  if (leg_factors.size() != first.legs.size()) {
    throw std::invalid_argument("one factor per leg required");
  }
  ComplexVector c(static_cast<Eigen::Index>(labels_.size()));
  for (std::size_t j = 0; j < labels_.size(); ++j) {
    Complex value = 1.0;
    for (std::size_t i = 0; i < first.legs.size(); ++i) {
      const auto& e = labels_[j].legs[i];
      const ComplexVector v =
          families_->leg(first.first_leg + static_cast<int>(i)).vector(e.masa, e.vec);
      value *= v.dot(leg_factors[i] * v);
    }
    c(static_cast<Eigen::Index>(j)) = value;
  }
  return c;
}

double ExpectationOperator::image_norm(const ComplexVector& coefficients) const {
  return std::sqrt(coefficients.squaredNorm() / static_cast<double>(dim_));
}

ComplexMatrix apply_expectation(const ExpectationOperator& e, const ComplexMatrix& x) {
  return e.apply(x);
}

ExpectationOperator approximant_expectation(const TauerConstruction& c, const TowerRational& t,
                                            int n) {
  return ExpectationOperator(c.approximant(t, n)->labels(), c.families());
}

double compatibility_defect(const TauerConstruction& c, const TowerRational& t, int n,
                            int n_prime, int samples, std::uint64_t seed) {
  if (n_prime <= n) throw std::invalid_argument("compatibility needs n' > n");
  const auto dim = static_cast<Eigen::Index>(c.tower().product_i64(n));
  const auto ratio = static_cast<Eigen::Index>(c.tower().product_i64(n_prime)) / dim;
  if (dim * ratio > kDenseDimLimit) throw std::length_error("dense budget exceeded");
  const ExpectationOperator small = approximant_expectation(c, t, n);
  const ExpectationOperator large = approximant_expectation(c, t, n_prime);
  const ComplexMatrix id = ComplexMatrix::Identity(ratio, ratio);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const ComplexMatrix x = random_unitary(dim, mix_seed(seed, 0xC0, static_cast<std::uint64_t>(i)));
    const ComplexMatrix lhs = large.apply(kron(x, id));
    const ComplexMatrix rhs = kron(small.apply(x), id);
    worst = std::max(worst, hs_norm(lhs - rhs));
  }
  return worst;
}

Eigen::MatrixXd pairing_matrix(const std::vector<ProjLabel>& a, const std::vector<ProjLabel>& b,
                               const LegFamilies& families) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          trace_pairing(a[i], b[j], families);
    }
  }
  return g;
}

double principal_angle_gap(const std::vector<ProjLabel>& a, const std::vector<ProjLabel>& b,
                           const LegFamilies& families) {
  if (a.size() != b.size()) throw std::invalid_argument("masas of different sizes");
  const Eigen::MatrixXd g = pairing_matrix(a, b, families);
  const Eigen::MatrixXd gram = g.transpose() * g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double smallest = std::clamp(eig.eigenvalues()(0), 0.0, 1.0);
  return std::sqrt(1.0 - smallest);
}

GapEstimate gap_estimate(const TauerConstruction& c, const TowerRational& s,
                         const TowerRational& t, int n, const GapOptions& options) {
  const auto as = c.approximant(s, n)->labels();
  const auto at = c.approximant(t, n)->labels();
  const std::int64_t size = c.tower().product_i64(n);

  BigRational diff = s.value() - t.value();
  if (diff < 0) diff = -diff;

  require_complete_masa(as, c.families());
  require_complete_masa(at, c.families());

  GapEstimate est{s, t, n};
  est.bound = 2.0 * std::sqrt(diff.convert_to<double>());
  est.upper_principal_angles = principal_angle_gap(as, at, c.families());

  if (size > kPowerIterationDimLimit) {
    // Structured probes u = sum_a c_a f_a lie in one of the two masas, so
    // ||(E_s - E_t) u||_2^2 = ||u||_2^2 - ||E_other(u)||_2^2 with E_other(u)
    // coefficients read off the pairing matrix.
    const Eigen::MatrixXd g = pairing_matrix(as, at, c.families());
    const std::int64_t block = c.tower().prime_i64(n);
    double best = 0.0;
    int probes = 0;
    for (const auto& phases : structured_phases(size, block)) {
      for (bool in_s : {true, false}) {
        const ComplexVector image = in_s ? ComplexVector(g.transpose().cast<Complex>() * phases)
                                         : ComplexVector(g.cast<Complex>() * phases);
        const double sq = (phases.squaredNorm() - image.squaredNorm()) / static_cast<double>(size);
        best = std::max(best, std::sqrt(std::max(sq, 0.0)));
        ++probes;
      }
    }
    est.lower = best;
    est.probes = probes;
    est.upper = est.upper_principal_angles;
    est.iterations = 0;
    est.converged = true;
    return est;
  }

  const ExpectationOperator es(as, c.families());
  const ExpectationOperator et(at, c.families());
  auto phi = [&](const ComplexMatrix& x) -> ComplexMatrix { return es.apply(x) - et.apply(x); };

  const auto probes = dense_probes(c, s, t, n, options);
  double lower = 0.0;
  const ComplexMatrix* best_probe = nullptr;
  for (const auto& u : probes) {
    const double value = hs_norm(phi(u));
    if (value > lower || best_probe == nullptr) {
      lower = std::max(lower, value);
      best_probe = &u;
    }
  }
  est.lower = lower;
  est.probes = static_cast<int>(probes.size());

  // Power iteration on Phi^2 (Phi is self-adjoint on the Hilbert-Schmidt
  // space). Rayleigh quotients are non-decreasing; the probe values are
  // Rayleigh quotients too, so they floor the estimate.
  ComplexMatrix x = random_gaussian(size, mix_seed(options.seed, 0x5EED, static_cast<std::uint64_t>(n)));
  x /= hs_norm(x);
  x = *best_probe + 0.25 * x;
  x /= hs_norm(x);
  double lambda = 0.0;
  int it = 0;
  bool converged = false;
  for (it = 1; it <= options.max_iterations; ++it) {
    const ComplexMatrix y = phi(x);
    const double next = y.squaredNorm() / x.squaredNorm();
    if (next == 0.0) {
      lambda = 0.0;
      converged = true;
      break;
    }
    ComplexMatrix z = phi(y);
    const double zn = hs_norm(z);
    if (zn == 0.0) {
      lambda = next;
      converged = true;
      break;
    }
    const bool done = it > 1 && std::abs(next - lambda) <= options.relative_tolerance * next;
    lambda = next;
    if (done) {
      converged = true;
      break;
    }
    x = z / zn;
  }
  est.iterations = std::min(it, options.max_iterations);
  est.converged = converged;
  est.upper = std::max(std::sqrt(lambda), lower);
  return est;
}

DistanceBound path_distance_bound(const TowerRational& s, const TowerRational& t) {
  BigRational diff = t.value() - s.value();
  if (diff < 0) diff = -diff;
  DistanceBound b;
  b.sqrt_bound = 2.0 * std::sqrt(diff.convert_to<double>());
  return b;
}

DistanceBound path_distance_bound(const TauerConstruction& c, const TowerRational& s,
                                  const TowerRational& t, int n) {
  DistanceBound b = path_distance_bound(s, t);
  if (s == t) {
    b.cutdown_defect_trace = BigRational(0);
    b.cutdown_bound = 0.0;
    return b;
  }
  const auto& lo = s < t ? s : t;
  const auto& hi = s < t ? t : s;
  const auto q = c.common_cutdown(lo, hi, n);
  const BigRational trace_q(BigInt(q.size()), c.tower().product(n));
  const BigRational defect = 1 - trace_q;
  b.cutdown_defect_trace = defect;
  b.cutdown_bound = 2.0 * std::sqrt(defect.convert_to<double>());
  return b;
}

}  // namespace tauer
