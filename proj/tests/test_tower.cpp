#include <algorithm>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "tauer/tower.hpp"

using namespace tauer;

namespace {

bool trial_division_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// Smallest prime above `floor` by plain scanning.
std::int64_t next_prime_above(std::int64_t floor) {
  std::int64_t n = floor + 1;
  while (!trial_division_prime(n)) ++n;
  return n;
}

}  // namespace

TEST_CASE("primality agrees with trial division") {
  for (std::int64_t n = 0; n < 5000; ++n) {
    CHECK(is_prime(BigInt(n)) == trial_division_prime(n));
  }
  CHECK(is_prime(BigInt(3270667)) == trial_division_prime(3270667));
  CHECK(is_prime(BigInt(1811)));
}

TEST_CASE("tower primes follow the scan oracle") {
  CHECK(std::ranges::equal(build_prime_tower(1).primes(), std::vector<BigInt>{2}));
  CHECK(std::ranges::equal(build_prime_tower(2).primes(), std::vector<BigInt>{2, 3}));

  const PrimeTower tower = build_prime_tower(5);
  std::int64_t product = 2;
  std::vector<std::int64_t> expected{2};
  for (int r = 2; r <= 5; ++r) {
    expected.push_back(next_prime_above(product));
    product *= expected.back();
  }
  for (int r = 1; r <= 5; ++r) CHECK(tower.prime_i64(r) == expected[r - 1]);
  CHECK(std::ranges::equal(tower.products(), std::vector<BigInt>{2, 6, 42, 1806, 3270666}));
  CHECK(tower.product(0) == 1);
}

TEST_CASE("tower validation") {
  CHECK_THROWS(PrimeTower::from_primes({3}));
  CHECK_THROWS(PrimeTower::from_primes({2, 5, 7}));  // 7 < 10
  CHECK_THROWS(PrimeTower::from_primes({2, 4}));
  CHECK_NOTHROW(PrimeTower::from_primes({2, 3, 7}));
  CHECK(PrimeTower::from_primes({2, 3, 7}) == build_prime_tower(3));
}

TEST_CASE("level_of") {
  const PrimeTower tower = build_prime_tower(4);
  CHECK(level_of(BigRational(1, 2), tower) == 1);
  CHECK(level_of(BigRational(0), tower) == 1);
  CHECK(level_of(BigRational(1), tower) == 1);
  CHECK(level_of(BigRational(5, 6), tower) == 2);
  CHECK(level_of(BigRational(1, 42), tower) == 3);
  CHECK(level_of(BigRational(1, 1806), tower) == 4);
  CHECK_THROWS_WITH_AS(level_of(BigRational(1, 5), tower), "not a tower rational at this depth",
                       std::domain_error);
  CHECK_THROWS_AS(level_of(BigRational(3, 2), tower), std::domain_error);
  CHECK_THROWS_AS(level_of(BigRational(1, 3270666), tower), std::domain_error);
}

TEST_CASE("tower rationals compare by value") {
  const PrimeTower tower = build_prime_tower(3);
  const TowerRational a(tower, 3, 2);
  const TowerRational b(tower, 21, 3);
  CHECK(a == b);
  CHECK(a.canonical_level() == 1);
  CHECK(b.canonical_level() == 1);
  CHECK(a.to_string() == "1/2");
  CHECK(TowerRational(tower, 0, 3).to_string() == "0");
  CHECK(TowerRational(tower, 42, 3).to_string() == "1");
  CHECK(TowerRational(tower, 1, 3) < TowerRational(tower, 1, 2));
  CHECK(parse_tower_rational(tower, "5/6").canonical_level() == 2);
  CHECK(parse_tower_rational(tower, "1") == TowerRational(tower, 2, 1));
  CHECK_THROWS(parse_tower_rational(tower, "1/5"));
  CHECK_THROWS(parse_tower_rational(tower, "abc"));
}

TEST_CASE("grid") {
  const PrimeTower tower = build_prime_tower(3);
  const auto g1 = grid(tower, 1);
  REQUIRE(g1.size() == 3);
  CHECK(g1[0].is_zero());
  CHECK(g1[1].to_string() == "1/2");
  CHECK(g1[2].to_string() == "1");
  CHECK(grid(tower, 2).size() == 7);
  CHECK(grid(tower, 3).size() == 43);
  const auto g3 = grid(tower, 3);
  for (std::size_t i = 1; i < g3.size(); ++i) CHECK(g3[i - 1] < g3[i]);
}

TEST_CASE("floor and scaled index") {
  const PrimeTower tower = build_prime_tower(3);
  const auto five_sixths = parse_tower_rational(tower, "5/6");
  CHECK(floor_scaled(five_sixths, tower, 1) == 1);
  CHECK(floor_scaled(TowerRational(tower, 0, 1), tower, 3) == 0);
  CHECK(scaled_index(TowerRational(tower, 1, 1), tower, 1) == 1);
  CHECK(scaled_index(parse_tower_rational(tower, "1"), tower, 2) == 6);
  CHECK(scaled_index(five_sixths, tower, 3) == 35);
  CHECK_THROWS_WITH_AS(scaled_index(five_sixths, tower, 1), "parameter not defined at this level",
                       std::domain_error);
}
