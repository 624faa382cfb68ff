#pragma once

// Square matrices over k. Norms are carried as integer exponents: lognorm(A) = e
// means ||A|| = q^e for the l-infinity operator norm.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nafree/field.hpp"

namespace nafree {

using Vec = std::vector<Laurent>;

class Matrix {
 public:
  /// Zero matrix.
  Matrix(std::uint32_t q, std::size_t dim);

  static Matrix identity(std::uint32_t q, std::size_t dim = 3);
  static Matrix diagonal(const std::vector<Laurent>& diag);
  /// Diagonal matrix of monomials u^exps[i].
  static Matrix diagonal_monomials(std::uint32_t q, const std::vector<std::int64_t>& exps);
  static Matrix from_columns(const std::vector<Vec>& columns);
  /// Identity plus `entry` at (row, col), row != col.
  static Matrix elementary(std::size_t dim, std::size_t row, std::size_t col, const Laurent& entry);

  std::size_t dim() const noexcept { return dim_; }
  std::uint32_t q() const noexcept { return q_; }
  bool exact() const noexcept;
  bool is_diagonal() const noexcept;

  Laurent& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const Laurent& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  Vec column(std::size_t j) const;
  Vec row(std::size_t i) const;

  Matrix transposed() const;
  Matrix minor(std::size_t skip_row, std::size_t skip_col) const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  Matrix scaled(const Laurent& c) const;

  /// Structural identity of all entries.
  bool identical(const Matrix& other) const noexcept;
  bool is_identity() const noexcept;

 private:
  std::uint32_t q_;
  std::size_t dim_;
  std::vector<Laurent> entries_;
};

Matrix mat_mul(const Matrix& a, const Matrix& b);
Vec mat_apply(const Matrix& a, const Vec& v);

/// Determinant by cofactor expansion.
Laurent det(const Matrix& a);
Matrix adjugate(const Matrix& a);

/// Inverse. For det = 1 exactly this is the adjugate (exact for exact input);
/// otherwise the adjugate scaled by det^-1 with `relative_precision` digits.
Matrix mat_inv(const Matrix& a, std::int64_t relative_precision = 32);

/// A^n for any integer n; negative powers go through mat_inv.
Matrix mat_pow(const Matrix& a, std::int64_t n);

/// e with ||A|| = q^e: minus the least entry valuation.
std::int64_t lognorm(const Matrix& a);
/// ||v|| = q^e for the l-infinity norm.
std::int64_t lognorm(const Vec& v);

struct CartanVec {
  std::vector<std::int64_t> mu;  // non-increasing

  std::int64_t spread() const { return mu.front() - mu.back(); }
  friend bool operator==(const CartanVec&, const CartanVec&) = default;
};

/// Negated elementary-divisor valuations of A sorted non-increasing, by Smith
/// normal form over O with full minimal-valuation pivoting (row-major ties).
CartanVec cartan_projection(const Matrix& a);

/// Polynomial over k; coeffs[i] multiplies X^i.
struct Poly {
  std::vector<Laurent> coeffs;

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  Laurent operator()(const Laurent& x) const;
  Poly derivative() const;
};

/// Characteristic polynomial det(X I - A), monic, via the division-free
/// Berkowitz recurrence.
Poly char_poly(const Matrix& a);

/// Evaluates p(A).
Matrix eval_poly(const Poly& p, const Matrix& a);

// "e11, e12, e13; e21, e22, e23; e31, e32, e33"
Matrix parse_matrix(std::string_view text, std::uint32_t q);
std::string to_string(const Matrix& a);
std::string to_string(const Vec& v);

}  // namespace nafree
