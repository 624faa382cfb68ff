#pragma once

// Arithmetic in the residue field F_q (q prime) and in k = F_q((u)), where u is
// the uniformizer 1/t. Elements carry a precision: they are known modulo
// u^known_to, and are exact when known_to is infinite.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nafree/common.hpp"

namespace nafree {

using Digit = std::uint8_t;

/// Largest supported residue characteristic; digits are stored in one byte.
inline constexpr std::uint32_t kMaxPrime = 251;

struct FieldParams {
  std::uint32_t q = 2;
  std::int64_t default_precision = 32;

  /// Throws InvalidArgument unless q is a supported prime and precision >= 8.
  void validate() const;
};

// Residue field F_q helpers.
namespace residue {
inline std::uint32_t add(std::uint32_t a, std::uint32_t b, std::uint32_t q) { return (a + b) % q; }
inline std::uint32_t sub(std::uint32_t a, std::uint32_t b, std::uint32_t q) { return (a + q - b) % q; }
inline std::uint32_t mul(std::uint32_t a, std::uint32_t b, std::uint32_t q) { return (a * b) % q; }
std::uint32_t inv(std::uint32_t a, std::uint32_t q);
std::uint32_t pow(std::uint32_t a, std::uint64_t e, std::uint32_t q);
}  // namespace residue

/// Valuation of an element: a finite integer, +infinity (exact zero), or
/// undecidable (only a lower bound is known).
struct Valuation {
  enum class Kind : std::uint8_t { Finite, Infinite, Undecidable };
  Kind kind = Kind::Infinite;
  std::int64_t value = 0;  // for Undecidable, the known lower bound

  bool finite() const noexcept { return kind == Kind::Finite; }
  bool infinite() const noexcept { return kind == Kind::Infinite; }
  bool undecidable() const noexcept { return kind == Kind::Undecidable; }
};

/// The regions classify() decides membership in.
enum class Region : std::uint8_t {
  Integers,          // O
  MaximalIdeal,      // m
  OnePlusPiM,        // 1 + u m
  PiPlusPiM,         // u + u m
};

class Laurent {
 public:
  /// Exact zero over F_q.
  explicit Laurent(std::uint32_t q = 2) : q_(q) {}

  static Laurent zero(std::uint32_t q) { return Laurent(q); }
  static Laurent one(std::uint32_t q) { return monomial(q, 1, 0); }
  static Laurent uniformizer(std::uint32_t q) { return monomial(q, 1, 1); }
  /// c * u^e, exact. c is reduced mod q.
  static Laurent monomial(std::uint32_t q, std::int64_t c, std::int64_t e);
  /// O(u^n): an unknown element of valuation >= n.
  static Laurent unknown(std::uint32_t q, std::int64_t n);
  /// Builds sum digits[i] u^(lead_val + i) + O(u^known_to) and canonicalizes.
  static Laurent from_digits(std::uint32_t q, std::int64_t lead_val, std::vector<Digit> digits,
                             std::int64_t known_to = kInfinity);
  /// Exact element from an integer-coefficient Laurent polynomial, coeffs[i] at u^(low + i).
  static Laurent from_coeffs(std::uint32_t q, std::int64_t low, std::span<const std::int64_t> coeffs);

  std::uint32_t q() const noexcept { return q_; }
  bool exact() const noexcept { return is_infinite(known_to_); }
  std::int64_t known_to() const noexcept { return known_to_; }
  /// Exponent of the first digit; meaningful only when digits are nonempty.
  std::int64_t lead_val() const noexcept { return lead_; }
  std::span<const Digit> digits() const noexcept { return digits_; }
  bool has_digits() const noexcept { return !digits_.empty(); }
  bool is_exact_zero() const noexcept { return digits_.empty() && exact(); }
  bool is_exact_one() const noexcept;

  Valuation valuation() const noexcept;
  /// Largest v with val(x) >= v guaranteed; kInfinity for exact zero.
  std::int64_t val_lower_bound() const noexcept;
  /// Exponent one past the last stored digit (lead_val for no digits).
  std::int64_t digit_end() const noexcept { return lead_ + static_cast<std::int64_t>(digits_.size()); }

  /// Digit at exponent e, or nullopt when e >= known_to.
  std::optional<Digit> digit_at(std::int64_t e) const noexcept;
  Digit lead_digit() const;

  /// Forgets everything at and beyond u^n.
  Laurent truncated(std::int64_t n) const;
  /// Drops digits at and beyond u^n but keeps the result exact (polynomial truncation).
  Laurent truncated_exact(std::int64_t n) const;
  /// Multiplies by u^k.
  Laurent shifted(std::int64_t k) const;
  Laurent scaled(std::uint32_t c) const;

  Laurent operator-() const;
  friend Laurent operator+(const Laurent& x, const Laurent& y);
  friend Laurent operator-(const Laurent& x, const Laurent& y);
  friend Laurent operator*(const Laurent& x, const Laurent& y);
  Laurent& operator+=(const Laurent& y) { return *this = *this + y; }
  Laurent& operator-=(const Laurent& y) { return *this = *this - y; }
  Laurent& operator*=(const Laurent& y) { return *this = *this * y; }

  /// Structural identity of representations (digits, valuation and precision).
  /// This is not field equality for inexact values; see equal_mod.
  bool identical(const Laurent& other) const noexcept;

 private:
  void canonicalize();

  std::uint32_t q_;
  std::int64_t lead_ = 0;
  std::int64_t known_to_ = kInfinity;
  std::vector<Digit> digits_;
};

/// x^-1 known modulo u^target_precision (absolute precision of the result).
/// An input of valuation v known mod u^N supports targets up to N - 2v.
/// Exact monomials invert exactly.
Laurent inv(const Laurent& x, std::int64_t target_precision);

/// x / y with `relative` digits of relative precision requested for y^-1.
Laurent divide(const Laurent& x, const Laurent& y, std::int64_t relative);

/// x^n for n >= 0 by repeated squaring.
Laurent pow(const Laurent& x, std::uint64_t n);

/// Equality modulo u^n; Unknown when either side is not known that far.
Tri equal_mod(const Laurent& x, const Laurent& y, std::int64_t n);

/// Membership in O, m, 1+um or u+um, decided from the leading digits.
Tri classify(const Laurent& x, Region region);

/// Convenience: val(x) as Valuation.
inline Valuation val_of(const Laurent& x) { return x.valuation(); }

// Text grammar: "1 + u^2 + 2*u^-3 + O(u^5)". Sums of c*u^e monomials with an
// optional trailing O(u^N). A leading '-' negates a term modulo q.
Laurent parse_laurent(std::string_view text, std::uint32_t q);
std::string to_string(const Laurent& x);

}  // namespace nafree
