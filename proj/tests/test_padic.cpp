#include <doctest.h>

#include <random>

#include "dht/edge_code.hpp"
#include "dht/error.hpp"
#include "dht/kernels.hpp"
#include "dht/rational.hpp"
#include "oracles.hpp"

using namespace dht;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

DyadicRational dy(const char* s) { return DyadicRational::parse(s); }

std::string bits(std::uint64_t v, std::size_t depth) {
  std::string s;
  for (std::size_t j = 0; j < depth; ++j) s += ((v >> j) & 1U) ? '1' : '0';
  return s;
}

}  // namespace

TEST_CASE("dyadic parsing and normal form") {
  CHECK(dy("5/8").numerator() == 5);
  CHECK(dy("5/8").exponent() == 3);
  CHECK(dy("0.625") == dy("5/8"));
  CHECK(dy("2/4") == dy("1/2"));
  CHECK(dy("-3") == DyadicRational(-3));
  CHECK(dy("0/16").exponent() == 0);
  CHECK(dy("0").is_zero());
  CHECK(dy("3/4").to_string() == "3/4");
  CHECK(dy("-6/8").to_string() == "-3/4");
  CHECK(dy("1/2").to_double() == 0.5);

  CHECK(kind_of([] { dy("1/3"); }) == ErrorKind::NotRepresentable);
  CHECK(kind_of([] { dy("0.1"); }) == ErrorKind::NotRepresentable);
  CHECK(kind_of([] { dy("abc"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { dy("1/0"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { dy(""); }) == ErrorKind::ParseError);
}

TEST_CASE("dyadic arithmetic agrees with mpq") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 500; ++t) {
    const long an = static_cast<long>(rng() % 2001) - 1000, bn = static_cast<long>(rng() % 2001) - 1000;
    const auto ae = static_cast<std::uint32_t>(rng() % 12), be = static_cast<std::uint32_t>(rng() % 12);
    const DyadicRational a(BigInt(an), ae), b(BigInt(bn), be);
    const Rational qa = a.to_rational(), qb = b.to_rational();
    CHECK((a + b).to_rational() == qa + qb);
    CHECK((a - b).to_rational() == qa - qb);
    CHECK((a * b).to_rational() == qa * qb);
    CHECK((a < b) == (qa < qb));
    CHECK((a == b) == (qa == qb));
    CHECK(DyadicRational::from_rational(qa) == a);
  }
}

TEST_CASE("edge codes") {
  const auto c = EdgeCode::parse("1011");
  CHECK(c.depth() == 4);
  CHECK(c.digit(0) == 1);
  CHECK(c.digit(1) == 0);
  CHECK(c.integer_value() == 13);
  CHECK(c.to_string() == "1011");
  CHECK(c.child(0).to_string() == "10110");
  CHECK(EdgeCode::parse("1") != EdgeCode::parse("10"));
  CHECK(kind_of([] { EdgeCode(std::vector<std::uint8_t>{}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { EdgeCode(std::vector<std::uint8_t>{0, 2}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { EdgeCode::parse("01a"); }) == ErrorKind::ParseError);
}

TEST_CASE("monna map values") {
  CHECK(monna_map(EdgeCode::parse("1")) == dy("1/2"));
  CHECK(monna_map(EdgeCode::parse("01")) == dy("1/4"));
  CHECK(monna_map(EdgeCode::parse("11")) == dy("3/4"));
  CHECK(monna_map(EdgeCode::parse("1011")) == dy("11/16"));
  CHECK(monna_map(EdgeCode::parse("0000")).is_zero());
  for (std::size_t depth = 1; depth <= 8; ++depth) {
    for (const auto& code : all_codes(depth)) {
      CHECK(monna_map(code).to_rational() == oracle::code_monna(code.to_string()));
    }
  }
}

TEST_CASE("inverse monna round trip and failures") {
  for (std::size_t depth = 1; depth <= 10; ++depth) {
    for (const auto& code : all_codes(depth)) CHECK(inverse_monna(monna_map(code), depth) == code);
  }
  CHECK(inverse_monna(dy("1/2"), 3).to_string() == "100");
  CHECK(inverse_monna(Rational(3, 4), 2).to_string() == "11");
  CHECK(kind_of([] { inverse_monna(dy("1/8"), 2); }) == ErrorKind::NotRepresentable);
  CHECK(kind_of([] { inverse_monna(dy("1"), 4); }) == ErrorKind::NotRepresentable);
  CHECK(kind_of([] { inverse_monna(dy("-1/2"), 4); }) == ErrorKind::NotRepresentable);
  CHECK(kind_of([] { inverse_monna(Rational(1, 3), 8); }) == ErrorKind::NotRepresentable);
}

TEST_CASE("2-adic distance matches the valuation of the integer difference") {
  std::vector<EdgeCode> codes;
  for (std::size_t depth = 1; depth <= 5; ++depth) {
    for (const auto& c : all_codes(depth)) codes.push_back(c);
  }
  for (const auto& a : codes) {
    for (const auto& b : codes) {
      const mpz_class diff = oracle::code_integer(a.to_string()) - oracle::code_integer(b.to_string());
      const auto d = padic_distance(a, b);
      if (diff == 0) {
        CHECK(d.is_zero());
        CHECK(d.value() == 0);
      } else {
        REQUIRE_FALSE(d.is_zero());
        CHECK(*d.valuation == oracle::valuation2(diff));
      }
    }
  }
  CHECK(padic_distance(EdgeCode::parse("1"), EdgeCode::parse("10")).is_zero());
  CHECK(padic_distance(EdgeCode::parse("0"), EdgeCode::parse("1")).value() == 1);
  CHECK(padic_distance(EdgeCode::parse("001"), EdgeCode::parse("000")).value() == Rational(1, 4));
}

TEST_CASE("distance ordering") {
  const PadicDistance zero{}, quarter{2}, half{1}, one{0};
  CHECK(zero < quarter);
  CHECK(quarter < half);
  CHECK(half < one);
  CHECK(quarter.to_double() == 0.25);
}

TEST_CASE("balls") {
  const auto center = EdgeCode::parse("011");
  for (std::size_t depth = 1; depth <= 5; ++depth) {
    for (const auto& c : all_codes(depth)) {
      const auto d = padic_distance(center, c).value();
      for (const Rational& r : {Rational(1, 8), Rational(1, 4), Rational(1, 3), Rational(1)}) {
        CHECK(ball_membership(center, r, false, c) == (d <= r));
        CHECK(ball_membership(center, r, true, c) == (d < r));
      }
    }
  }
  CHECK(kind_of([&] { ball_membership(center, Rational(0), false, center); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("all codes are in increasing integer order") {
  const auto codes = all_codes(4);
  REQUIRE(codes.size() == 16);
  for (std::size_t k = 0; k < codes.size(); ++k) {
    CHECK(codes[k].integer_value() == static_cast<unsigned long>(k));
    CHECK(codes[k].to_string() == bits(k, 4));
  }
}

TEST_CASE("ultrametric on small depth, serial and parallel") {
  std::vector<EdgeCode> codes;
  for (std::size_t depth = 1; depth <= 3; ++depth) {
    for (const auto& c : all_codes(depth)) codes.push_back(c);
  }
  const auto s = kernels::check_ultrametric(codes, kernels::Exec::Serial);
  const auto p = kernels::check_ultrametric(codes, kernels::Exec::Parallel);
  CHECK(s.triples == codes.size() * codes.size() * codes.size());
  CHECK(s.strong_triangle_violations == 0);
  CHECK(s.isosceles_violations == 0);
  CHECK(p.triples == s.triples);
  CHECK(p.strong_triangle_violations == 0);
  CHECK(p.isosceles_violations == 0);
}
