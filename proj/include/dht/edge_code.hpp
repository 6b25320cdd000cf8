#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dht/rational.hpp"

namespace dht {

/// A finite 2-adic digit string a_0 a_1 ... a_k identifying one dendrogram
/// branch. a_0 is the answer to the first (root) question and is the
/// lowest-order digit of the integer value sum a_j 2^j.
///
/// Codes are depth-tagged: [1] and [1,0] have the same integer value but are
/// different codes, because they name leaves at different depths.
class EdgeCode {
 public:
  /// Throws Error(InvalidArgument) on an empty sequence or a digit outside {0,1}.
  explicit EdgeCode(std::vector<std::uint8_t> digits);

  /// Root-first digit string, e.g. "01" is a_0 = 0, a_1 = 1.
  static EdgeCode parse(std::string_view text);

  std::size_t depth() const noexcept { return digits_.size(); }
  std::uint8_t digit(std::size_t j) const { return digits_.at(j); }
  std::span<const std::uint8_t> digits() const noexcept { return digits_; }

  /// sum a_j 2^j
  BigInt integer_value() const;
  std::string to_string() const;

  EdgeCode child(std::uint8_t digit) const;

  friend bool operator==(const EdgeCode&, const EdgeCode&) = default;
  friend auto operator<=>(const EdgeCode& a, const EdgeCode& b) {
    return a.digits_ <=> b.digits_;
  }

 private:
  std::vector<std::uint8_t> digits_;
};

/// Monna map: sum a_j 2^{-j-1}, exact, in [0,1).
DyadicRational monna_map(const EdgeCode& code);

/// Inverse of monna_map producing exactly `depth` digits. Throws
/// Error(NotRepresentable) when the value needs more than `depth` binary
/// fraction digits or lies outside [0,1).
EdgeCode inverse_monna(const DyadicRational& value, std::size_t depth);
EdgeCode inverse_monna(const Rational& value, std::size_t depth);

/// |edge_a - edge_b|_2 = 2^{-valuation}, or zero when the integer values agree.
///
/// Ordered by the distance it denotes: zero < 2^{-5} < 2^{-1} < 1.
struct PadicDistance {
  std::optional<std::size_t> valuation;  // empty means distance 0

  bool is_zero() const { return !valuation.has_value(); }
  Rational value() const;
  double to_double() const;

  friend bool operator==(const PadicDistance&, const PadicDistance&) = default;
  friend std::strong_ordering operator<=>(const PadicDistance& a, const PadicDistance& b) {
    if (a.is_zero() || b.is_zero()) return b.is_zero() <=> a.is_zero();
    return *b.valuation <=> *a.valuation;
  }
};

/// The valuation is the index of the first digit where the zero-padded codes
/// differ, i.e. the length of the shared root path.
PadicDistance padic_distance(const EdgeCode& a, const EdgeCode& b);

/// Closed ball B(R; center) when strict is false, open ball B_-(R; center) when
/// true. Throws Error(InvalidArgument) if radius <= 0.
bool ball_membership(const EdgeCode& center, const Rational& radius, bool strict,
                     const EdgeCode& candidate);

/// All 2^depth codes of the given depth, in increasing integer order.
std::vector<EdgeCode> all_codes(std::size_t depth);

}  // namespace dht
