#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace dht {

using BigInt = mpz_class;
using Rational = mpq_class;

std::string to_string(const Rational& q);

/// Exact value numerator / 2^exponent.
///
/// Always stored in lowest terms: either the numerator is odd, or the value is
/// zero with exponent 0. This makes structural equality coincide with value
/// equality, so the type can be used as a map key.
class DyadicRational {
 public:
  DyadicRational() = default;
  DyadicRational(BigInt numerator, std::uint32_t exponent);
  explicit DyadicRational(long numerator) : DyadicRational(BigInt(numerator), 0) {}

  /// Parses "n/d" with d a power of two, an integer, or a finite binary-exact
  /// decimal such as "0.625". Throws Error(ParseError) or Error(NotRepresentable).
  static DyadicRational parse(std::string_view text);

  /// Exact conversion; throws Error(NotRepresentable) if the denominator is not
  /// a power of two.
  static DyadicRational from_rational(const Rational& q);

  const BigInt& numerator() const noexcept { return num_; }
  std::uint32_t exponent() const noexcept { return exp_; }

  Rational to_rational() const;
  double to_double() const;
  std::string to_string() const;

  bool is_zero() const { return sgn(num_) == 0; }
  int sign() const { return sgn(num_); }

  friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b);
  friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b);
  friend DyadicRational operator*(const DyadicRational& a, const DyadicRational& b);
  DyadicRational operator-() const { return DyadicRational(-num_, exp_); }
  DyadicRational abs() const { return DyadicRational(::abs(num_), exp_); }

  friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }
  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b);

 private:
  void normalize();

  BigInt num_{0};
  std::uint32_t exp_{0};
};

}  // namespace dht
