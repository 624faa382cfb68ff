#pragma once

// Diagonal generator pairs, the symbolic valuation argument for the chart
// ratio sigma, regular elements with flags in W, contraction powers, the
// exhaustive ping-pong check over residue balls, quasi-isometry constants and
// the reduced-word survey.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nafree/spectral.hpp"

namespace nafree {

struct DiagPair {
  Matrix a;
  Matrix b;
  Laurent alpha1, alpha2, beta1, beta2;  // a_i / a_3 and b_i / b_3
  std::int64_t power_applied = 1;
  std::int64_t s = 1, s_prime = 1;  // valuation profile before the power

  std::uint32_t q() const { return a.q(); }
  /// The (pre-power) valuation pattern val(a1) = val(b2) > val(a2) = val(a3) = val(b1) = val(b3).
  bool pattern_holds() const;
  /// diag(a^m b^n)
  Matrix element(std::int64_t m, std::int64_t n) const;

  /// Any two diagonal matrices; ratios are computed from the diagonals.
  static DiagPair from_diagonals(const Matrix& a, const Matrix& b);
};

/// a = diag(u^2s, u^-s, u^-s), b = diag(u^-s', u^2s', u^-s'), both raised to
/// the q(q-1)-th power.
DiagPair make_generators(std::uint32_t q, std::int64_t s, std::int64_t s_prime);

/// Abstract set of field elements described by their valuations.
struct ValInterval {
  std::int64_t lo = 0;          // kNegInfinity: unbounded below
  std::int64_t hi = 0;          // kInfinity: unbounded above
  bool may_vanish = false;      // the element may be exactly 0
  bool may_be_infinite = false; // quotients only: the denominator may vanish
  std::int64_t modulus = 0;     // 0: valuation is exactly lo (== hi); else val = residue mod modulus
  std::int64_t residue = 0;
  std::vector<Digit> prefix;    // leading relative digits shared by every nonzero member

  static ValInterval exact(std::int64_t v, std::vector<Digit> prefix);
  bool singleton() const { return modulus == 0 && lo == hi; }
  /// Some nonzero member may have valuation v.
  bool admits(std::int64_t v) const;
  std::optional<Digit> lead_digit() const;
  std::string str() const;
};

ValInterval vi_mul(const ValInterval& x, const ValInterval& y, std::uint32_t q);
ValInterval vi_sub(const ValInterval& x, const ValInterval& y, std::uint32_t q);
ValInterval vi_div(const ValInterval& x, const ValInterval& y, std::uint32_t q);
/// {x^m : m in sign set}, sign in {-1, 0, 1}.
ValInterval vi_power(const Laurent& x, int sign);

struct SigmaCase {
  int sign_m = 0, sign_n = 0;
  ValInterval numerator, denominator, quotient;
  bool excluded = false;

  std::string label() const;
};

struct SigmaProof {
  std::vector<SigmaCase> cases;
  std::string trace;   // one line per case
  std::string digest;  // FNV-1a 64 of the trace, hex

  bool certified() const;
};

/// Runs all eight sign cases; throws ExclusionFailed on the first case where
/// valuation 1 cannot be excluded. With digit_refinement, a known leading
/// digit other than 1 also excludes.
SigmaProof sigma_exclusion(const DiagPair& pair, bool digit_refinement = false);
/// Same computation without throwing.
SigmaProof sigma_cases(const DiagPair& pair, bool digit_refinement = false);

/// Numerator and denominator of sigma for concrete exponents and perturbations.
struct SigmaSample {
  Laurent num, den;
};
SigmaSample sigma_parts(const DiagPair& pair, std::int64_t m, std::int64_t n, const Laurent& lambda1,
                        const Laurent& lambda2, const Laurent& mu1, const Laurent& mu2);

enum class Strategy : std::uint8_t { Synthetic, Lattice };
const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

struct SearchOptions {
  std::uint64_t budget = 100000;
  std::size_t factors = 6;
  std::int64_t degree = 2;
  std::int64_t exponent = 2;  // synthetic: eigenvalue valuations -e, 0, e
};

struct SearchResult {
  Matrix h;
  std::uint64_t trials = 0;
};

/// Change of basis for the synthetic element: columns x+ = [1:1:1],
/// [1:u:0] (slope u), x- = [1:1+u^2:1]. det = u^2.
Matrix synthetic_basis(std::uint32_t q);

SearchResult find_regular_search(Strategy strategy, std::uint64_t seed, const DiagPair& pair,
                                 const SearchOptions& opts = {});
Matrix find_regular(Strategy strategy, std::uint64_t seed, const DiagPair& pair);

/// Valuation data of the eigenbasis of a regular element.
struct EigenBasisBound {
  std::vector<std::int64_t> eig_val;  // valuations of the eigenvalues, increasing
  std::vector<std::int64_t> rho;      // least valuation in each row of P^-1
  std::int64_t lognorm_p = 0, lognorm_pinv = 0;
  std::int64_t kappa = kDecidingDepth;  // val of the repelling-line form outside V
};

EigenBasisBound eigenbasis_bound(const Matrix& h);

struct ContractionResult {
  std::int64_t n0 = 0;
  std::string method;  // "eigenbasis-bound" or "search"
};

ContractionResult contraction_analysis(const Matrix& h, const DiagPair& pair);
std::int64_t contraction_power(const Matrix& h, const DiagPair& pair);

struct Constants {
  std::int64_t theta = 0;        // theta = q^-theta
  std::int64_t theta_prime = 0;
  std::int64_t epsilon_exponent = 0;
  Rational alpha1, alpha2, alpha;
  Rational c;
  Rational c_total;  // 4 epsilon_exponent + 2c
  std::int64_t N0 = 0;
  std::int64_t R_prime = 1;
  std::int64_t gap = 0;  // val(lambda_3) - val(lambda_1) for g
};

/// min of max(s|m|, s'|n|, |sm - s'n|) * 3 * power over real |m| + |n| = 1.
Rational delta_growth_rate(const DiagPair& pair);
Constants qi_constants(const DiagPair& pair, const Matrix& g, std::int64_t n0 = 1);

struct PingPongReport {
  std::int64_t level = 0;
  std::uint64_t balls_checked = 0;
  std::uint64_t violation_count = 0;
  std::vector<std::string> violations;  // first entries in canonical order
  std::int64_t word_bound = 0;
  Rational min_growth_margin{0};

  bool success() const { return violation_count == 0 && violations.empty() && min_growth_margin >= 0; }
};

struct PingPongOptions {
  std::size_t max_listed = 200;
  unsigned threads = 0;  // 0: hardware concurrency
  /// Element whose eigenflags give the anchors x+, x- (default: g itself).
  std::optional<Matrix> anchor_source;
};

/// Exhaustive check over level-M balls with C1 = P \ (V_x+ u V_x-), C2 = U.
PingPongReport verify_pingpong(const DiagPair& pair, const Matrix& g, std::int64_t level, std::int64_t gamma_bound,
                               const Constants& constants, const PingPongOptions& opts = {});
PingPongReport verify_pingpong(const DiagPair& pair, const Matrix& g, std::int64_t level, std::int64_t gamma_bound);

struct DeltaSyllable {
  std::int64_t m = 0, n = 0;
  friend bool operator==(const DeltaSyllable&, const DeltaSyllable&) = default;
};
struct GSyllable {
  std::int64_t r = 0;
  friend bool operator==(const GSyllable&, const GSyllable&) = default;
};
using Syllable = std::variant<DeltaSyllable, GSyllable>;

struct ReducedWord {
  std::vector<Syllable> syllables;

  std::int64_t length() const;
  bool valid() const;
  std::string str() const;
};

struct WordRow {
  ReducedWord word;
  std::int64_t length = 0;
  std::int64_t log_norm_product = 0;  // lognorm(w) + lognorm(w^-1)
  std::vector<std::int64_t> mu;
  Rational margin;      // log_norm_product - (alpha |w| - c_total)
  bool identity = false;
  bool mu_ok = false;
};

struct WordSurvey {
  std::vector<WordRow> rows;
  std::uint64_t words = 0;
  std::uint64_t violations = 0;
  Rational min_margin{0};
  Rational a, C;  // ||mu(w)|| >= a |w| - C
};

/// All reduced words of length 1..L in Delta and <g^R'>.
WordSurvey word_survey(const DiagPair& pair, const Matrix& g, std::int64_t L, const Constants& constants,
                       bool keep_rows = true);

/// g moves every coordinate point and every coordinate plane.
bool irreducibility_witness(const DiagPair& pair, const Matrix& g);

}  // namespace nafree
