#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace nafree {

/// Stand-in for +infinity in valuations and precisions.
inline constexpr std::int64_t kInfinity = std::numeric_limits<std::int64_t>::max() / 4;
inline constexpr std::int64_t kNegInfinity = -kInfinity;

inline constexpr bool is_infinite(std::int64_t v) noexcept { return v >= kInfinity; }

/// Three-valued truth for predicates evaluated on values known only to finite precision.
enum class Tri : std::uint8_t { False, True, Unknown };

constexpr Tri to_tri(bool b) noexcept { return b ? Tri::True : Tri::False; }

constexpr Tri operator!(Tri a) noexcept {
  switch (a) {
    case Tri::False: return Tri::True;
    case Tri::True: return Tri::False;
    default: return Tri::Unknown;
  }
}

constexpr Tri operator&&(Tri a, Tri b) noexcept {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::True && b == Tri::True) return Tri::True;
  return Tri::Unknown;
}

constexpr Tri operator||(Tri a, Tri b) noexcept {
  if (a == Tri::True || b == Tri::True) return Tri::True;
  if (a == Tri::False && b == Tri::False) return Tri::False;
  return Tri::Unknown;
}

const char* to_string(Tri t) noexcept;

// Error hierarchy. Every failure the library reports derives from Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InsufficientPrecision : public Error {
 public:
  using Error::Error;
};

class ZeroOrUnknownLeadingDigit : public Error {
 public:
  using Error::Error;
};

class SingularOrUndecidable : public Error {
 public:
  using Error::Error;
};

class NotSimpleSegment : public Error {
 public:
  using Error::Error;
};

class AllCoordinatesVanish : public Error {
 public:
  using Error::Error;
};

class EqualPoints : public Error {
 public:
  using Error::Error;
};

class OutsideChart : public Error {
 public:
  using Error::Error;
};

class SearchExhausted : public Error {
 public:
  using Error::Error;
};

class InsufficientLevel : public Error {
 public:
  using Error::Error;
};

class ExclusionFailed : public Error {
 public:
  ExclusionFailed(std::string case_label, const std::string& detail)
      : Error("sigma exclusion failed in case " + case_label + ": " + detail),
        case_label_(std::move(case_label)) {}
  const std::string& case_label() const noexcept { return case_label_; }

 private:
  std::string case_label_;
};

/// Text that does not match one of the element/matrix/certificate grammars.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class DigitOutOfRange : public ParseError {
 public:
  using ParseError::ParseError;
};

bool is_prime(std::uint64_t n) noexcept;

}  // namespace nafree
