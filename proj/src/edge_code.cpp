#include "dht/edge_code.hpp"

#include <algorithm>
#include <cmath>

#include "dht/error.hpp"

namespace dht {

EdgeCode::EdgeCode(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {
  if (digits_.empty()) throw Error(ErrorKind::InvalidArgument, "edge code needs depth >= 1");
  for (auto d : digits_) {
    if (d > 1) throw Error(ErrorKind::InvalidArgument, "edge code digit must be 0 or 1");
  }
}

EdgeCode EdgeCode::parse(std::string_view text) {
  std::vector<std::uint8_t> digits;
  digits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw Error(ErrorKind::ParseError, "invalid edge code '" + std::string(text) + "'");
    }
    digits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  if (digits.empty()) throw Error(ErrorKind::ParseError, "empty edge code");
  return EdgeCode(std::move(digits));
}

BigInt EdgeCode::integer_value() const {
  BigInt v = 0;
  for (std::size_t j = digits_.size(); j-- > 0;) {
    v *= 2;
    v += digits_[j];
  }
  return v;
}

std::string EdgeCode::to_string() const {
  std::string s;
  s.reserve(digits_.size());
  for (auto d : digits_) s.push_back(static_cast<char>('0' + d));
  return s;
}

EdgeCode EdgeCode::child(std::uint8_t digit) const {
  auto d = digits_;
  d.push_back(digit);
  return EdgeCode(std::move(d));
}

DyadicRational monna_map(const EdgeCode& code) {
  // Reading the digits root-first as a binary fraction 0.a_0 a_1 ... a_k.
  BigInt num = 0;
  for (auto d : code.digits()) {
    num *= 2;
    num += d;
  }
  return DyadicRational(std::move(num), static_cast<std::uint32_t>(code.depth()));
}

EdgeCode inverse_monna(const DyadicRational& value, std::size_t depth) {
  if (depth == 0) throw Error(ErrorKind::InvalidArgument, "depth must be >= 1");
  if (value.sign() < 0 || value >= DyadicRational(1)) {
    throw Error(ErrorKind::NotRepresentable, value.to_string() + " is outside [0,1)");
  }
  if (value.exponent() > depth) {
    throw Error(ErrorKind::NotRepresentable,
                value.to_string() + " needs more than " + std::to_string(depth) + " digits");
  }
  BigInt n = value.numerator();
  mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), depth - value.exponent());
  std::vector<std::uint8_t> digits(depth);
  for (std::size_t j = 0; j < depth; ++j) {
    digits[j] = static_cast<std::uint8_t>(mpz_tstbit(n.get_mpz_t(), depth - 1 - j));
  }
  return EdgeCode(std::move(digits));
}

EdgeCode inverse_monna(const Rational& value, std::size_t depth) {
  return inverse_monna(DyadicRational::from_rational(value), depth);
}

Rational PadicDistance::value() const {
  if (is_zero()) return Rational(0);
  BigInt den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), *valuation);
  return Rational(BigInt(1), den);
}

double PadicDistance::to_double() const {
  return is_zero() ? 0.0 : std::ldexp(1.0, -static_cast<int>(*valuation));
}

PadicDistance padic_distance(const EdgeCode& a, const EdgeCode& b) {
  const auto da = a.digits();
  const auto db = b.digits();
  const std::size_t n = std::max(da.size(), db.size());
  for (std::size_t j = 0; j < n; ++j) {
    const auto x = j < da.size() ? da[j] : 0;
    const auto y = j < db.size() ? db[j] : 0;
    if (x != y) return PadicDistance{j};
  }
  return PadicDistance{};
}

bool ball_membership(const EdgeCode& center, const Rational& radius, bool strict,
                     const EdgeCode& candidate) {
  if (sgn(radius) <= 0) throw Error(ErrorKind::InvalidArgument, "ball radius must be > 0");
  const Rational d = padic_distance(center, candidate).value();
  return strict ? d < radius : d <= radius;
}

std::vector<EdgeCode> all_codes(std::size_t depth) {
  std::vector<EdgeCode> out;
  const std::size_t count = std::size_t{1} << depth;
  out.reserve(count);
  for (std::size_t v = 0; v < count; ++v) {
    std::vector<std::uint8_t> digits(depth);
    for (std::size_t j = 0; j < depth; ++j) digits[j] = static_cast<std::uint8_t>((v >> j) & 1U);
    out.emplace_back(std::move(digits));
  }
  return out;
}

}  // namespace dht
