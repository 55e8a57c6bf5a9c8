#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "doctest.h"
#include "tauer/expectations.hpp"

using namespace tauer;

namespace {

const TauerConstruction& construction() {
  static const TauerConstruction c(build_prime_tower(4));
  return c;
}

// E(x) = sum_f f x f for rank-one f, written out without the operator class.
ComplexMatrix brute_expectation(const std::vector<ProjLabel>& labels, const LegFamilies& f,
                                const ComplexMatrix& x) {
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const auto& label : labels) {
    const ComplexVector v = label_vector(label, f);
    const ComplexMatrix p = v * v.adjoint();
    out += p * x * p;
  }
  return out;
}

// Matrix of E_s - E_t on vec(x) in the orthonormal basis sqrt(d) e_ij of the
// Hilbert-Schmidt space; its top singular value is the HS -> HS norm.
double superoperator_norm(const std::vector<ProjLabel>& a, const std::vector<ProjLabel>& b,
                          const LegFamilies& f, Eigen::Index d) {
  ComplexMatrix big(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      ComplexMatrix unit = ComplexMatrix::Zero(d, d);
      unit(i, j) = 1.0;
      const ComplexMatrix image = brute_expectation(a, f, unit) - brute_expectation(b, f, unit);
      big.col(i * d + j) = Eigen::Map<const ComplexVector>(image.data(), d * d);
    }
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(big);
  return svd.singularValues()(0);
}

}  // namespace

TEST_CASE("expectation fixes the masa and agrees with the brute formula") {
  const auto& c = construction();
  for (const char* t : {"0", "1/2", "1"}) {
    const auto tt = c.parse(t);
    const ExpectationOperator e = approximant_expectation(c, tt, 2);
    CHECK(e.strategy() == ApplicationStrategy::kDense);
    const auto labels = c.approximant(tt, 2)->labels();
    CHECK(approx_equal(e.apply(ComplexMatrix::Identity(6, 6)), ComplexMatrix::Identity(6, 6), 1e-12));
    const std::vector<ProjLabel> one{labels[4]};
    const ComplexMatrix f = materialize(one, c.families());
    CHECK(approx_equal(e.apply(f), f, 1e-12));
    const ComplexMatrix x = random_gaussian(6, 77);
    CHECK(approx_equal(e.apply(x), brute_expectation(labels, c.families(), x), 1e-12));
    CHECK(approx_equal(apply_expectation(e, x), e.apply(x), 0.0));
  }
}

TEST_CASE("bimodule, idempotence and contractivity") {
  const auto& c = construction();
  const auto t = c.parse("1/2");
  const ExpectationOperator e = approximant_expectation(c, t, 3);
  const ComplexMatrix& v = e.basis();
  Eigen::VectorXcd da = Eigen::VectorXcd::Random(42);
  Eigen::VectorXcd db = Eigen::VectorXcd::Random(42);
  const ComplexMatrix a = v * da.asDiagonal() * v.adjoint();
  const ComplexMatrix b = v * db.asDiagonal() * v.adjoint();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ComplexMatrix x = random_gaussian(42, seed);
    CHECK(approx_equal(e.apply(a * x * b), a * e.apply(x) * b, 1e-10));
    CHECK(approx_equal(e.apply(e.apply(x)), e.apply(x), 1e-12));
    CHECK(two_norm(e.apply(x)) <= two_norm(x) + 1e-12);
    const ComplexMatrix u = random_unitary(42, seed);
    CHECK(operator_norm(e.apply(u)) <= 1.0 + 1e-12);
    CHECK(std::abs(normalized_trace(e.apply(x)) - normalized_trace(x)) < 1e-12);
  }
}

TEST_CASE("orthogonal masa kills trace-free unitaries") {
  const OrthoFamily fam(7, 3);
  LegFamilies legs(build_prime_tower(3));
  // Leg 3 has p = 7; the diagonal masa against the trace-free unitary of masa 1.
  std::vector<ProjLabel> diag;
  for (std::uint32_t l = 0; l < 7; ++l) diag.push_back(ProjLabel{3, {{0, l}}});
  const ExpectationOperator e(diag, legs);
  CHECK(two_norm(e.apply(legs.leg(3).trace_free_unitary(1))) <= 1e-12);
  CHECK(approx_equal(legs.leg(3).trace_free_unitary(1), fam.trace_free_unitary(1), 1e-13));
}

TEST_CASE("factorized coefficients match dense ones") {
  const auto& c = construction();
  const auto t = c.parse("1/2");
  const ExpectationOperator e = approximant_expectation(c, t, 3);
  const std::vector<ComplexMatrix> factors{random_unitary(2, 1), random_unitary(3, 2),
                                           random_unitary(7, 3)};
  const ComplexVector dense = e.coefficients(kron_chain(factors));
  const ComplexVector fact = e.coefficients_factorized(factors);
  CHECK((dense - fact).norm() < 1e-12);
  CHECK(std::abs(e.image_norm(fact) - two_norm(e.apply(kron_chain(factors)))) < 1e-12);
}

TEST_CASE("tower coherence of expectations") {
  const auto& c = construction();
  for (const auto& t : grid(c.tower(), 1)) {
    CHECK(compatibility_defect(c, t, 2, 3, 10, 5) <= 1e-10);
  }
  CHECK(compatibility_defect(c, c.parse("1/2"), 1, 2, 10, 5) <= 1e-10);
  CHECK(compatibility_defect(c, c.parse("1/2"), 1, 3, 5, 5) <= 1e-10);
}

TEST_CASE("gap estimate against the dense superoperator") {
  const auto& c = construction();
  const auto s = c.parse("0");
  const auto t = c.parse("1");
  const GapEstimate g = gap_estimate(c, s, t, 2);
  const double oracle = superoperator_norm(c.approximant(s, 2)->labels(),
                                           c.approximant(t, 2)->labels(), c.families(), 6);
  CHECK(std::abs(g.upper - oracle) <= 1e-6);
  CHECK(std::abs(g.upper_principal_angles - oracle) <= 1e-6);
  CHECK(g.lower <= g.upper + 1e-8);
  CHECK(g.bound == doctest::Approx(2.0));

  for (const char* a : {"0", "1/2"}) {
    for (const char* b : {"1/2", "1"}) {
      if (std::string(a) == b) continue;
      const auto x = c.parse(a);
      const auto y = c.parse(b);
      const GapEstimate h = gap_estimate(c, x, y, 2);
      const double o = superoperator_norm(c.approximant(x, 2)->labels(),
                                          c.approximant(y, 2)->labels(), c.families(), 6);
      CHECK(std::abs(h.upper - o) <= 1e-6);
      CHECK(std::abs(h.upper_principal_angles - o) <= 1e-6);
      CHECK(h.lower <= h.bound + 1e-8);
    }
  }
}

TEST_CASE("gap estimate of equal parameters vanishes") {
  const auto& c = construction();
  const auto t = c.parse("1/2");
  const GapEstimate g = gap_estimate(c, t, t, 3);
  CHECK(g.lower <= 1e-10);
  CHECK(g.upper <= 1e-10);
  CHECK(g.bound == 0.0);
}

TEST_CASE("gap lower bounds grow with the level") {
  const auto& c = construction();
  const auto s = c.parse("1/2");
  const auto t = c.parse("1");
  const GapEstimate g2 = gap_estimate(c, s, t, 2);
  const GapEstimate g3 = gap_estimate(c, s, t, 3);
  CHECK(g2.lower <= g3.lower + 1e-12);
  CHECK(g3.lower <= std::sqrt(2.0));
  // Level 4 uses the factorized route.
  const GapEstimate g4 = gap_estimate(c, s, t, 4);
  CHECK(g4.lower <= g4.upper + 1e-8);
  CHECK(std::abs(g4.upper - g4.upper_principal_angles) < 1e-12);
}

TEST_CASE("path distance bound") {
  const auto& c = construction();
  CHECK(path_distance_bound(c.parse("1/3"), c.parse("1/3")).sqrt_bound == 0.0);
  CHECK(path_distance_bound(c.parse("0"), c.parse("1/2")).sqrt_bound ==
        doctest::Approx(std::sqrt(2.0)));
  const DistanceBound b = path_distance_bound(c, c.parse("1/2"), c.parse("2/3"), 2);
  CHECK(b.sqrt_bound == doctest::Approx(2.0 * std::sqrt(1.0 / 6.0)));
  REQUIRE(b.cutdown_defect_trace.has_value());
  CHECK(*b.cutdown_defect_trace == BigRational(1, 6));
  REQUIRE(b.cutdown_bound.has_value());
  CHECK(*b.cutdown_bound == doctest::Approx(2.0 * std::sqrt(1.0 / 6.0)));
}

TEST_CASE("label sets that are not masas are rejected") {
  const auto& c = construction();
  auto labels = c.approximant(c.parse("0"), 2)->labels();
  labels.pop_back();
  CHECK_THROWS(ExpectationOperator(labels, c.families()));
  const auto mixed = c.approximant(c.parse("1/6"), 2)->labels();
  CHECK_THROWS_AS(ExpectationOperator(mixed, c.families()), std::invalid_argument);
  CHECK_THROWS_AS(gap_estimate(c, c.parse("0"), c.parse("1/6"), 2), std::invalid_argument);
  CHECK_THROWS_AS(compatibility_defect(c, c.parse("1/6"), 2, 3, 1, 1), std::invalid_argument);
}
