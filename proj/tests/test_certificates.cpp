#include <cmath>

#include "doctest.h"
#include "tauer/certificates.hpp"

using namespace tauer;

namespace {

const TauerConstruction& construction() {
  static const TauerConstruction c(build_prime_tower(4));
  return c;
}

// max_{f != e} ||E_{A^(f)}(w_e (x) 1)||_2 with every operator built densely
// on legs n1+1..n2.
double dense_singularity(const TauerConstruction& c, const TowerRational& t, int n1, int n2) {
  const std::int64_t parents = c.tower().product_i64(n1);
  const auto block = static_cast<Eigen::Index>(c.tower().product_i64(n2) / parents);
  const auto k = static_cast<Eigen::Index>(c.tower().prime_i64(n1 + 1));
  double worst = 0.0;
  for (std::int64_t e = 0; e < parents; ++e) {
    const auto step = c.block_masa(t, e, n1, n1 + 1);
    ComplexMatrix w = ComplexMatrix::Zero(k, k);
    for (Eigen::Index l = 0; l < k; ++l) {
      const ComplexVector v = label_vector(step.labels[l], c.families());
      w += root_of_unity(l, k) * v * v.adjoint();
    }
    const ComplexMatrix we = kron(w, ComplexMatrix::Identity(block / k, block / k));
    for (std::int64_t f = 0; f < parents; ++f) {
      if (f == e) continue;
      const ExpectationOperator ef(c.block_masa(t, f, n1, n2).labels, c.families());
      worst = std::max(worst, two_norm(ef.apply(we)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("singularity certificate matches the dense computation") {
  const auto& c = construction();
  for (const auto& t : grid(c.tower(), 2)) {
    const Certificate cert = singularity_certificate(c, t, 2);
    CHECK(cert.pass());
    CHECK(cert.defect <= 1e-10);
    CHECK(std::abs(cert.defect - dense_singularity(c, t, 2, 3)) <= 1e-12);
  }
  const auto half = c.parse("1/2");
  CHECK(std::abs(singularity_certificate(c, half, 2, 1e-10, 4).defect -
                 dense_singularity(c, half, 2, 4)) <= 1e-12);
  CHECK_THROWS(singularity_certificate(c, half, 1));
  CHECK_THROWS(singularity_certificate(c, half, 2, 1e-10, 5));
}

TEST_CASE("dense singularity oracle detects equal witness masas") {
  // Same block masa for e and f makes E_{A^(f)}(w_e) = w_e, of norm 1.
  const auto& c = construction();
  const auto t = c.parse("0");
  const auto step = c.block_masa(t, 0, 2, 3);
  std::vector<ProjLabel> same = step.labels;
  const ExpectationOperator e(same, c.families());
  ComplexMatrix w = ComplexMatrix::Zero(7, 7);
  for (Eigen::Index l = 0; l < 7; ++l) {
    const ComplexVector v = label_vector(same[l], c.families());
    w += root_of_unity(l, 7) * v * v.adjoint();
  }
  CHECK(std::abs(two_norm(e.apply(w)) - 1.0) < 1e-12);
}

TEST_CASE("block orthogonality above the cut") {
  const auto& c = construction();
  for (const auto& t : grid(c.tower(), 1)) {
    for (int n = 1; n <= 2; ++n) {
      const std::int64_t size = c.tower().product_i64(n);
      for (std::int64_t m = c.cut(t, n); m < size; ++m) {
        for (std::int64_t m2 = m + 1; m2 < size; ++m2) {
          for (int n1 = n + 1; n1 <= 3; ++n1) {
            CHECK(block_orthogonality_check(c, t, n, m, m2, n1).pass());
          }
        }
      }
    }
  }
  // Dense oracle for one pair: tr(gh) with g, h materialized.
  const auto zero = c.parse("0");
  const BlockMasa g = c.block_masa(zero, 0, 1, 3);
  const BlockMasa h = c.block_masa(zero, 1, 1, 3);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.labels.size(); i += 4) {
    const std::vector<ProjLabel> gi{g.labels[i]};
    const ComplexMatrix pg = materialize(gi, c.families());
    for (std::size_t j = 0; j < h.labels.size(); j += 3) {
      const std::vector<ProjLabel> hj{h.labels[j]};
      const ComplexMatrix ph = materialize(hj, c.families());
      worst = std::max(worst, std::abs(normalized_trace(pg * ph).real() - 1.0 / (21.0 * 21.0)));
    }
  }
  CHECK(worst < 1e-12);
  CHECK_THROWS_WITH(block_orthogonality_check(c, c.parse("1/2"), 1, 0, 1, 2),
                    "witness indices must lie above the gamma cut");
}

TEST_CASE("a block masa is not orthogonal to itself") {
  const auto& c = construction();
  const auto zero = c.parse("0");
  const BlockMasa g = c.block_masa(zero, 0, 2, 3);
  const double pair = trace_pairing(g.labels[0], g.labels[0], c.families()) / 7.0;
  CHECK(std::abs(pair - 1.0 / 49.0) > 0.1);
}

TEST_CASE("gamma commutator witness") {
  const auto& c = construction();
  for (const char* t : {"1/2", "1"}) {
    const Certificate cert = gamma_commutator_check(c, c.parse(t), 1, 100, 7);
    CHECK(cert.pass());
    CHECK(cert.witness.find("dense") != std::string::npos);
  }
  for (const auto& t : grid(c.tower(), 2)) {
    if (t.is_zero()) continue;
    const Certificate cert = gamma_commutator_check(c, t, 3, 100, 7);
    CHECK(cert.pass());
    CHECK(cert.witness.find("factorized") != std::string::npos);
  }
  const Certificate empty = gamma_commutator_check(c, c.parse("0"), 1, 10, 1);
  CHECK(empty.pass());
  CHECK(empty.witness == "empty witness: p = 0");
  CHECK_THROWS(gamma_commutator_check(c, c.parse("1/2"), 2, 10, 1));
}

TEST_CASE("anticommutation identity") {
  const auto& c = construction();
  const auto zero = c.parse("0");
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Certificate a = anticommutation_check(c, zero, 1, {0, 1}, seed);
    CHECK(a.pass());
    const Certificate b = anticommutation_check(c, zero, 1, {0, 1}, seed, CornerUnitary::kProjection);
    CHECK(b.pass());
  }
  const auto sixth = c.parse("1/6");
  CHECK(anticommutation_check(c, sixth, 2, {1, 3, 5}, 3).pass());
  CHECK(anticommutation_check(c, sixth, 2, {2, 4}, 4, CornerUnitary::kProjection).pass());
  CHECK_THROWS_WITH(anticommutation_check(c, sixth, 2, {0, 3}, 1), "selection intersects the gamma cut");
  CHECK_THROWS(anticommutation_check(c, sixth, 2, {3}, 1));
  CHECK_THROWS(anticommutation_check(c, sixth, 2, {3, 3}, 1));
}

TEST_CASE("cutdown equality") {
  const auto& c = construction();
  const Certificate cert = cutdown_equality_check(c, c.parse("1/2"), c.parse("2/3"), 2);
  CHECK(cert.pass());
  CHECK(cert.params[3].second == "5/6");
  const auto g = grid(c.tower(), 2);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) CHECK(cutdown_equality_check(c, g[i], g[j], 2).pass());
  CHECK_THROWS(cutdown_equality_check(c, c.parse("2/3"), c.parse("1/2"), 2));
}

TEST_CASE("continuity sentinel") {
  const auto& c = construction();
  const auto s = c.parse("0");
  const auto t = c.parse("1");
  GapEstimate g{s, t, 2};
  const ContinuityReport r = gamma_continuity_report(s, t, 2, g);
  CHECK(r.pass);
  CHECK(r.gamma_difference == 1);
  CHECK(r.implied_bound == doctest::Approx(30.0));
}
