#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dht {

enum class ErrorKind {
  NotRepresentable,
  InvalidAttachPoint,
  TooFewLeaves,
  InvalidDendrogram,
  ParseError,
  DuplicateEvent,
  TooFewEvents,
  GridMismatch,
  TooFewObservers,
  ValueOutOfRange,
  EmptyThetaClass,
  EmptyTargets,
  EmptyProjection,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

// Every library failure carries a kind so callers (the CLI in particular) can
// map it to an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

// Raised when an internal invariant fails; indicates a bug, not bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define DHT_ENSURE(cond, msg)                          \
  do {                                                 \
    if (!(cond)) throw ::dht::InvariantViolation(msg); \
  } while (0)

}  // namespace dht
