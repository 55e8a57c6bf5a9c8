#pragma once

// Exact index arithmetic for the prime tower k_1 = 2 < k_2 < ... and the
// parameter sets I_n = { m / K_n : 0 <= m <= K_n } with K_n = k_1 ... k_n.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace tauer {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

class PrimeTower {
 public:
  /// Validates the tower invariants: k_1 = 2, every later k_r prime and
  /// strictly larger than K_{r-1}. Throws std::invalid_argument otherwise.
  static PrimeTower from_primes(std::vector<BigInt> primes);

  int depth() const { return static_cast<int>(primes_.size()); }

  /// k_r for 1 <= r <= depth.
  const BigInt& prime(int r) const;
  /// K_n for 0 <= n <= depth (K_0 = 1).
  const BigInt& product(int n) const;

  std::span<const BigInt> primes() const { return primes_; }
  /// K_1 ... K_depth (K_0 omitted).
  std::span<const BigInt> products() const {
    return std::span<const BigInt>(products_).subspan(1);
  }

  /// K_n as a machine integer; throws std::overflow_error above int64 range.
  std::int64_t product_i64(int n) const;
  std::int64_t prime_i64(int r) const;

  bool operator==(const PrimeTower& other) const {
    return primes_ == other.primes_;
  }

 private:
  PrimeTower() = default;

  std::vector<BigInt> primes_;
  std::vector<BigInt> products_;
};

/// k_1 = 2 and k_r = smallest prime strictly greater than K_{r-1}.
PrimeTower build_prime_tower(int depth);

bool is_prime(const BigInt& n);

/// An element m / K_n of I_n. The stored level is the one it was created at;
/// the canonical level n0 is the smallest level whose grid contains the value.
class TowerRational {
 public:
  TowerRational(const PrimeTower& tower, BigInt numerator, int level);

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }
  int level() const { return level_; }
  int canonical_level() const { return canonical_level_; }

  BigRational value() const { return BigRational(num_, den_); }
  double to_double() const;

  /// Reduced "a/b" form ("0" and "1" for the endpoints).
  std::string to_string() const;

  bool is_zero() const { return num_ == 0; }

  friend bool operator==(const TowerRational& a, const TowerRational& b) {
    return a.num_ * b.den_ == b.num_ * a.den_;
  }
  friend std::strong_ordering operator<=>(const TowerRational& a,
                                          const TowerRational& b) {
    const BigInt lhs = a.num_ * b.den_;
    const BigInt rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  BigInt num_;
  BigInt den_;
  int level_ = 1;
  int canonical_level_ = 1;
};

/// Minimal n <= depth with value * K_n integral. Throws std::domain_error
/// ("not a tower rational at this depth") when no such n exists or when the
/// value lies outside [0, 1].
int level_of(const BigRational& value, const PrimeTower& tower);
int level_of(const TowerRational& t, const PrimeTower& tower);

/// Parses "a/b", "a" or a decimal-free fraction and places it at its
/// canonical level.
TowerRational parse_tower_rational(const PrimeTower& tower,
                                   const std::string& text);

/// All K_n + 1 points m / K_n in ascending order.
std::vector<TowerRational> grid(const PrimeTower& tower, int n);

/// floor(t * K_n), exact.
BigInt floor_scaled(const TowerRational& t, const PrimeTower& tower, int n);

/// t * K_n for n >= n0(t); throws std::domain_error if it is not integral.
std::int64_t scaled_index(const TowerRational& t, const PrimeTower& tower,
                          int n);

}  // namespace tauer
