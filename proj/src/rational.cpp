#include "dht/rational.hpp"

#include <algorithm>

#include "dht/error.hpp"

namespace dht {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotRepresentable: return "NotRepresentable";
    case ErrorKind::InvalidAttachPoint: return "InvalidAttachPoint";
    case ErrorKind::TooFewLeaves: return "TooFewLeaves";
    case ErrorKind::InvalidDendrogram: return "InvalidDendrogram";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DuplicateEvent: return "DuplicateEvent";
    case ErrorKind::TooFewEvents: return "TooFewEvents";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::TooFewObservers: return "TooFewObservers";
    case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorKind::EmptyThetaClass: return "EmptyThetaClass";
    case ErrorKind::EmptyTargets: return "EmptyTargets";
    case ErrorKind::EmptyProjection: return "EmptyProjection";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string to_string(const Rational& q) { return q.get_str(); }

DyadicRational::DyadicRational(BigInt numerator, std::uint32_t exponent)
    : num_(std::move(numerator)), exp_(exponent) {
  normalize();
}

void DyadicRational::normalize() {
  if (sgn(num_) == 0) {
    exp_ = 0;
    return;
  }
  const auto twos = static_cast<std::uint32_t>(mpz_scan1(num_.get_mpz_t(), 0));
  const std::uint32_t shift = std::min(twos, exp_);
  if (shift > 0) {
    mpz_fdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), shift);
    exp_ -= shift;
  }
}

namespace {

// Brings both operands to the larger exponent.
std::pair<BigInt, BigInt> aligned(const DyadicRational& a, const DyadicRational& b,
                                  std::uint32_t e) {
  BigInt x = a.numerator();
  BigInt y = b.numerator();
  mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), e - a.exponent());
  mpz_mul_2exp(y.get_mpz_t(), y.get_mpz_t(), e - b.exponent());
  return {std::move(x), std::move(y)};
}

}  // namespace

DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
  const auto e = std::max(a.exp_, b.exp_);
  auto [x, y] = aligned(a, b, e);
  return DyadicRational(x + y, e);
}

DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) {
  const auto e = std::max(a.exp_, b.exp_);
  auto [x, y] = aligned(a, b, e);
  return DyadicRational(x - y, e);
}

DyadicRational operator*(const DyadicRational& a, const DyadicRational& b) {
  return DyadicRational(a.num_ * b.num_, a.exp_ + b.exp_);
}

std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
  const auto e = std::max(a.exp_, b.exp_);
  auto [x, y] = aligned(a, b, e);
  const int c = cmp(x, y);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational DyadicRational::to_rational() const {
  BigInt den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), exp_);
  Rational q(num_, den);
  q.canonicalize();
  return q;
}

double DyadicRational::to_double() const {
  // mpz_get_d truncates; go through mpq for a correctly rounded result.
  return to_rational().get_d();
}

std::string DyadicRational::to_string() const {
  if (exp_ == 0) return num_.get_str();
  BigInt den = 1;
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), exp_);
  return num_.get_str() + "/" + den.get_str();
}

DyadicRational DyadicRational::from_rational(const Rational& q) {
  const BigInt& den = q.get_den();
  if (mpz_popcount(den.get_mpz_t()) != 1) {
    throw Error(ErrorKind::NotRepresentable, ::dht::to_string(q) + " is not dyadic");
  }
  const auto e = static_cast<std::uint32_t>(mpz_scan1(den.get_mpz_t(), 0));
  return DyadicRational(q.get_num(), e);
}

DyadicRational DyadicRational::parse(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw Error(ErrorKind::ParseError, "empty dyadic literal");
  Rational q;
  const auto dot = s.find('.');
  try {
    if (dot != std::string::npos) {
      // Decimal literal: digits after the point become n / 10^k.
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      const auto frac_len = s.size() - dot - 1;
      if (digits.empty() || digits == "-") throw Error(ErrorKind::ParseError, s);
      BigInt num(digits, 10);
      BigInt den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
      q = Rational(num, den);
    } else {
      q = Rational(s, 10);
    }
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::ParseError, "not a number: '" + s + "'");
  }
  if (sgn(q.get_den()) == 0) throw Error(ErrorKind::ParseError, "zero denominator: " + s);
  q.canonicalize();
  return from_rational(q);
}

}  // namespace dht
