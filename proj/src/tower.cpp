#include "tauer/tower.hpp"

#include <limits>
#include <stdexcept>

#include <boost/multiprecision/miller_rabin.hpp>

namespace tauer {

namespace {

std::int64_t to_i64(const BigInt& value, const char* what) {
  if (value > std::numeric_limits<std::int64_t>::max() ||
      value < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error(std::string(what) + " exceeds 64-bit range");
  }
  return value.convert_to<std::int64_t>();
}

}  // namespace

bool is_prime(const BigInt& n) {
  if (n < 2) return false;
  for (int small : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n == small) return true;
    if (n % small == 0) return false;
  }
  // The default-constructed engine makes the witness sequence reproducible.
  return boost::multiprecision::miller_rabin_test(n, 32);
}

PrimeTower PrimeTower::from_primes(std::vector<BigInt> primes) {
  if (primes.empty()) throw std::invalid_argument("tower depth must be >= 1");
  if (primes.front() != 2) throw std::invalid_argument("tower must start at k_1 = 2");

  PrimeTower tower;
  tower.products_.reserve(primes.size() + 1);
  tower.products_.emplace_back(1);
  for (std::size_t r = 0; r < primes.size(); ++r) {
    const BigInt& k = primes[r];
    if (r > 0) {
      if (k <= tower.products_.back()) {
        throw std::invalid_argument("k_" + std::to_string(r + 1) +
                                    " does not exceed K_" + std::to_string(r));
      }
      if (!is_prime(k)) {
        throw std::invalid_argument("k_" + std::to_string(r + 1) + " is not prime");
      }
    }
    tower.products_.push_back(tower.products_.back() * k);
  }
  tower.primes_ = std::move(primes);
  return tower;
}

const BigInt& PrimeTower::prime(int r) const {
  if (r < 1 || r > depth()) throw std::out_of_range("leg index out of range");
  return primes_[static_cast<std::size_t>(r - 1)];
}

const BigInt& PrimeTower::product(int n) const {
  if (n < 0 || n > depth()) throw std::out_of_range("level exceeds tower depth");
  return products_[static_cast<std::size_t>(n)];
}

std::int64_t PrimeTower::product_i64(int n) const {
  return to_i64(product(n), "K_n");
}

std::int64_t PrimeTower::prime_i64(int r) const {
  return to_i64(prime(r), "k_r");
}

PrimeTower build_prime_tower(int depth) {
  if (depth < 1) throw std::invalid_argument("tower depth must be >= 1");
  std::vector<BigInt> primes{BigInt(2)};
  BigInt product = 2;
  for (int r = 2; r <= depth; ++r) {
    BigInt candidate = product + 1;
    while (!is_prime(candidate)) ++candidate;
    primes.push_back(candidate);
    product *= candidate;
  }
  return PrimeTower::from_primes(std::move(primes));
}

int level_of(const BigRational& value, const PrimeTower& tower) {
  if (value < 0 || value > 1) {
    throw std::domain_error("not a tower rational at this depth");
  }
  const BigInt den = boost::multiprecision::denominator(value);
  for (int n = 1; n <= tower.depth(); ++n) {
    if (tower.product(n) % den == 0) return n;
  }
  throw std::domain_error("not a tower rational at this depth");
}

int level_of(const TowerRational& t, const PrimeTower& tower) {
  return level_of(t.value(), tower);
}

TowerRational::TowerRational(const PrimeTower& tower, BigInt numerator, int level)
    : num_(std::move(numerator)), den_(tower.product(level)), level_(level) {
  if (level < 1) throw std::out_of_range("level must be >= 1");
  if (num_ < 0 || num_ > den_) {
    throw std::domain_error("numerator outside [0, K_n]");
  }
  canonical_level_ = level_of(value(), tower);
}

double TowerRational::to_double() const {
  return value().convert_to<double>();
}

std::string TowerRational::to_string() const {
  const BigRational v = value();
  const BigInt& a = boost::multiprecision::numerator(v);
  const BigInt& b = boost::multiprecision::denominator(v);
  if (b == 1) return a.str();
  return a.str() + "/" + b.str();
}

TowerRational parse_tower_rational(const PrimeTower& tower, const std::string& text) {
  BigRational value;
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
      value = BigRational(BigInt(text));
    } else {
      const BigInt a(text.substr(0, slash));
      const BigInt b(text.substr(slash + 1));
      if (b == 0) throw std::domain_error("zero denominator");
      value = BigRational(a, b);
    }
  } catch (const std::domain_error&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational '" + text + "'");
  }
  const int n0 = level_of(value, tower);
  const BigInt num = boost::multiprecision::numerator(value) * tower.product(n0) /
                     boost::multiprecision::denominator(value);
  return TowerRational(tower, num, n0);
}

std::vector<TowerRational> grid(const PrimeTower& tower, int n) {
  const std::int64_t size = tower.product_i64(n);
  std::vector<TowerRational> points;
  points.reserve(static_cast<std::size_t>(size + 1));
  for (std::int64_t m = 0; m <= size; ++m) points.emplace_back(tower, BigInt(m), n);
  return points;
}

BigInt floor_scaled(const TowerRational& t, const PrimeTower& tower, int n) {
  // numerator and denominator are non-negative, so integer division floors.
  return t.numerator() * tower.product(n) / t.denominator();
}

std::int64_t scaled_index(const TowerRational& t, const PrimeTower& tower, int n) {
  const BigInt scaled = t.numerator() * tower.product(n);
  if (scaled % t.denominator() != 0) {
    throw std::domain_error("parameter not defined at this level");
  }
  return to_i64(scaled / t.denominator(), "t * K_n");
}

}  // namespace tauer
