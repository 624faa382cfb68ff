#include "nafree/field.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace nafree {

namespace {

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (is_infinite(a) || is_infinite(b)) return kInfinity;
  return a + b;
}

void require_same_field(const Laurent& x, const Laurent& y) {
  if (x.q() != y.q()) throw InvalidArgument("mixing elements over different residue fields");
}

}  // namespace

const char* to_string(Tri t) noexcept {
  switch (t) {
    case Tri::True: return "true";
    case Tri::False: return "false";
    default: return "undecidable";
  }
}

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void FieldParams::validate() const {
  if (!is_prime(q) || q > kMaxPrime)
    throw InvalidArgument("q must be a prime <= " + std::to_string(kMaxPrime) + ", got " + std::to_string(q));
  if (default_precision < 8) throw InvalidArgument("default precision must be at least 8");
}

namespace residue {

std::uint32_t pow(std::uint32_t a, std::uint64_t e, std::uint32_t q) {
  std::uint32_t result = 1 % q;
  a %= q;
  while (e > 0) {
    if (e & 1u) result = mul(result, a, q);
    a = mul(a, a, q);
    e >>= 1u;
  }
  return result;
}

std::uint32_t inv(std::uint32_t a, std::uint32_t q) {
  if (a % q == 0) throw ZeroOrUnknownLeadingDigit("inverse of zero residue");
  return pow(a, q - 2, q);
}

}  // namespace residue

// ---------------------------------------------------------------------------

Laurent Laurent::monomial(std::uint32_t q, std::int64_t c, std::int64_t e) {
  Laurent x(q);
  std::int64_t r = c % static_cast<std::int64_t>(q);
  if (r < 0) r += q;
  if (r != 0) {
    x.lead_ = e;
    x.digits_.push_back(static_cast<Digit>(r));
  }
  return x;
}

Laurent Laurent::unknown(std::uint32_t q, std::int64_t n) {
  Laurent x(q);
  x.known_to_ = n;
  x.lead_ = n;
  return x;
}

Laurent Laurent::from_digits(std::uint32_t q, std::int64_t lead_val, std::vector<Digit> digits,
                             std::int64_t known_to) {
  Laurent x(q);
  for (auto& d : digits) d = static_cast<Digit>(d % q);
  x.lead_ = lead_val;
  x.digits_ = std::move(digits);
  x.known_to_ = known_to;
  x.canonicalize();
  return x;
}

Laurent Laurent::from_coeffs(std::uint32_t q, std::int64_t low, std::span<const std::int64_t> coeffs) {
  std::vector<Digit> digits(coeffs.size());
  const auto qq = static_cast<std::int64_t>(q);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    std::int64_t r = coeffs[i] % qq;
    if (r < 0) r += qq;
    digits[i] = static_cast<Digit>(r);
  }
  return from_digits(q, low, std::move(digits));
}

void Laurent::canonicalize() {
  if (!exact()) {
    const std::int64_t keep = std::max<std::int64_t>(0, known_to_ - lead_);
    if (static_cast<std::int64_t>(digits_.size()) > keep) digits_.resize(static_cast<std::size_t>(keep));
  }
  auto first = std::find_if(digits_.begin(), digits_.end(), [](Digit d) { return d != 0; });
  lead_ += first - digits_.begin();
  digits_.erase(digits_.begin(), first);
  while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
  if (digits_.empty()) lead_ = exact() ? 0 : known_to_;
}

bool Laurent::is_exact_one() const noexcept {
  return exact() && digits_.size() == 1 && lead_ == 0 && digits_[0] == 1;
}

Valuation Laurent::valuation() const noexcept {
  if (!digits_.empty()) return {Valuation::Kind::Finite, lead_};
  if (exact()) return {Valuation::Kind::Infinite, kInfinity};
  return {Valuation::Kind::Undecidable, known_to_};
}

std::int64_t Laurent::val_lower_bound() const noexcept {
  if (!digits_.empty()) return lead_;
  return known_to_;
}

std::optional<Digit> Laurent::digit_at(std::int64_t e) const noexcept {
  if (e >= known_to_) return std::nullopt;
  if (e < lead_ || e >= digit_end()) return Digit{0};
  return digits_[static_cast<std::size_t>(e - lead_)];
}

Digit Laurent::lead_digit() const {
  if (digits_.empty()) throw ZeroOrUnknownLeadingDigit("element has no known leading digit: " + to_string(*this));
  return digits_.front();
}

Laurent Laurent::truncated(std::int64_t n) const {
  if (n >= known_to_) return *this;
  Laurent x = *this;
  x.known_to_ = n;
  x.canonicalize();
  return x;
}

Laurent Laurent::truncated_exact(std::int64_t n) const {
  Laurent x = *this;
  if (n < x.digit_end()) x.digits_.resize(static_cast<std::size_t>(std::max<std::int64_t>(0, n - x.lead_)));
  x.known_to_ = kInfinity;
  x.canonicalize();
  return x;
}

Laurent Laurent::shifted(std::int64_t k) const {
  Laurent x = *this;
  x.lead_ += k;
  if (!exact()) x.known_to_ += k;
  return x;
}

Laurent Laurent::scaled(std::uint32_t c) const {
  c %= q_;
  Laurent x = *this;
  for (auto& d : x.digits_) d = static_cast<Digit>(residue::mul(d, c, q_));
  x.canonicalize();
  return x;
}

Laurent Laurent::operator-() const {
  Laurent x = *this;
  for (auto& d : x.digits_) d = static_cast<Digit>(d == 0 ? 0 : q_ - d);
  return x;
}

namespace {

Laurent add_impl(const Laurent& x, const Laurent& y, bool negate_y) {
  require_same_field(x, y);
  const std::uint32_t q = x.q();
  const std::int64_t known = std::min(x.known_to(), y.known_to());
  std::int64_t lo = kInfinity;
  std::int64_t hi = kNegInfinity;
  for (const Laurent* z : {&x, &y}) {
    if (!z->has_digits()) continue;
    lo = std::min(lo, z->lead_val());
    hi = std::max(hi, z->digit_end());
  }
  hi = std::min(hi, known);
  if (lo >= hi) return is_infinite(known) ? Laurent(q) : Laurent::unknown(q, known);

  std::vector<Digit> out(static_cast<std::size_t>(hi - lo), 0);
  auto accumulate = [&](const Laurent& z, bool neg) {
    const auto digits = z.digits();
    for (std::size_t i = 0; i < digits.size(); ++i) {
      const std::int64_t e = z.lead_val() + static_cast<std::int64_t>(i);
      if (e >= hi) break;
      auto& slot = out[static_cast<std::size_t>(e - lo)];
      slot = static_cast<Digit>(neg ? residue::sub(slot, digits[i], q) : residue::add(slot, digits[i], q));
    }
  };
  accumulate(x, false);
  accumulate(y, negate_y);
  return Laurent::from_digits(q, lo, std::move(out), known);
}

}  // namespace

Laurent operator+(const Laurent& x, const Laurent& y) { return add_impl(x, y, false); }
Laurent operator-(const Laurent& x, const Laurent& y) { return add_impl(x, y, true); }

Laurent operator*(const Laurent& x, const Laurent& y) {
  require_same_field(x, y);
  const std::uint32_t q = x.q();
  if (x.is_exact_zero() || y.is_exact_zero()) return Laurent(q);
  const std::int64_t known =
      std::min(sat_add(x.val_lower_bound(), y.known_to()), sat_add(y.val_lower_bound(), x.known_to()));
  if (!x.has_digits() || !y.has_digits()) return Laurent::unknown(q, known);

  const std::int64_t lead = x.lead_val() + y.lead_val();
  const auto dx = x.digits();
  const auto dy = y.digits();
  std::int64_t len = static_cast<std::int64_t>(dx.size() + dy.size() - 1);
  if (!is_infinite(known)) len = std::min(len, known - lead);
  if (len <= 0) return Laurent::unknown(q, known);

  std::vector<std::uint32_t> acc(static_cast<std::size_t>(len), 0);
  const std::size_t n = acc.size();
  for (std::size_t i = 0; i < dx.size() && i < n; ++i) {
    const std::uint32_t a = dx[i];
    if (a == 0) continue;
    const std::size_t jmax = std::min(dy.size(), n - i);
    for (std::size_t j = 0; j < jmax; ++j) acc[i + j] += a * dy[j];
    // keep the accumulator far from overflow for large q
    if ((i & 0xFFF) == 0xFFF)
      for (auto& v : acc) v %= q;
  }
  std::vector<Digit> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<Digit>(acc[i] % q);
  return Laurent::from_digits(q, lead, std::move(out), known);
}

bool Laurent::identical(const Laurent& other) const noexcept {
  return q_ == other.q_ && known_to_ == other.known_to_ && lead_ == other.lead_ && digits_ == other.digits_;
}

// ---------------------------------------------------------------------------

Laurent inv(const Laurent& x, std::int64_t target_precision) {
  if (!x.has_digits())
    throw ZeroOrUnknownLeadingDigit("cannot invert " + to_string(x) + ": leading digit unknown or zero");
  const std::uint32_t q = x.q();
  const std::int64_t v = x.lead_val();
  const auto digits = x.digits();
  if (x.exact() && digits.size() == 1) return Laurent::monomial(q, residue::inv(digits[0], q), -v);
  if (!x.exact() && x.known_to() - 2 * v < target_precision)
    throw InsufficientPrecision("inverse of " + to_string(x) + " is known only mod u^" +
                                std::to_string(x.known_to() - 2 * v) + ", requested u^" +
                                std::to_string(target_precision));
  // unit part w = digits, need its inverse modulo u^n
  const std::int64_t n = target_precision + v;
  if (n <= 0) return Laurent::unknown(q, target_precision);
  const std::uint32_t w0inv = residue::inv(digits[0], q);
  std::vector<Digit> z(static_cast<std::size_t>(n), 0);
  z[0] = static_cast<Digit>(w0inv);
  for (std::int64_t k = 1; k < n; ++k) {
    std::uint64_t s = 0;
    const std::int64_t jmax = std::min<std::int64_t>(k, static_cast<std::int64_t>(digits.size()) - 1);
    for (std::int64_t j = 1; j <= jmax; ++j) s += static_cast<std::uint64_t>(digits[j]) * z[k - j];
    s %= q;
    z[k] = static_cast<Digit>(residue::mul(static_cast<std::uint32_t>((q - s) % q), w0inv, q));
  }
  return Laurent::from_digits(q, -v, std::move(z), target_precision);
}

Laurent divide(const Laurent& x, const Laurent& y, std::int64_t relative) {
  if (!y.has_digits())
    throw ZeroOrUnknownLeadingDigit("division by " + to_string(y) + ": leading digit unknown or zero");
  std::int64_t target = -y.lead_val() + relative;
  if (!y.exact()) target = std::min(target, y.known_to() - 2 * y.lead_val());
  return x * inv(y, target);
}

Laurent pow(const Laurent& x, std::uint64_t n) {
  Laurent result = Laurent::one(x.q());
  Laurent base = x;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

Tri equal_mod(const Laurent& x, const Laurent& y, std::int64_t n) {
  const Laurent d = x - y;
  if (d.has_digits()) return to_tri(d.lead_val() >= n);
  if (d.exact()) return Tri::True;
  return d.known_to() >= n ? Tri::True : Tri::Unknown;
}

Tri classify(const Laurent& x, Region region) {
  const std::uint32_t q = x.q();
  switch (region) {
    case Region::Integers: return equal_mod(x, Laurent(q), 0);
    case Region::MaximalIdeal: return equal_mod(x, Laurent(q), 1);
    case Region::OnePlusPiM: return equal_mod(x, Laurent::one(q), 2);
    case Region::PiPlusPiM: return equal_mod(x, Laurent::uniformizer(q), 2);
  }
  return Tri::Unknown;
}

// ---------------------------------------------------------------------------
// Text grammar

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos);
  }
  bool peek_digit() {
    skip_ws();
    return pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]));
  }
  std::int64_t integer() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    std::int64_t value = 0;
    const char* first = text.data() + start;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, text.data() + pos, value);
    if (ec != std::errc() || ptr != text.data() + pos) throw ParseError("expected integer", start);
    return value;
  }
  /// Parses "u" or "u^e", returning e.
  std::int64_t power_of_u() {
    expect('u');
    if (accept('^')) return integer();
    return 1;
  }
};

}  // namespace

Laurent parse_laurent(std::string_view text, std::uint32_t q) {
  if (q < 2 || q > kMaxPrime || !is_prime(q)) throw InvalidArgument("q must be a supported prime");
  Cursor cur{text};
  struct Term {
    std::int64_t exp;
    std::uint32_t coeff;
  };
  std::vector<Term> terms;
  std::int64_t known_to = kInfinity;
  bool first = true;
  if (cur.done()) throw ParseError("empty element", 0);
  while (!cur.done()) {
    bool negative = false;
    if (!first) {
      if (cur.accept('-')) {
        negative = true;
      } else {
        cur.expect('+');
      }
    } else if (cur.accept('-')) {
      negative = true;
    }
    first = false;
    cur.skip_ws();
    const std::size_t term_pos = cur.pos;
    if (cur.accept('O')) {
      if (!is_infinite(known_to)) throw ParseError("repeated O() term", term_pos);
      cur.expect('(');
      known_to = cur.power_of_u();
      cur.expect(')');
      continue;
    }
    std::int64_t coeff = 1;
    std::int64_t exp = 0;
    if (cur.peek_digit()) {
      coeff = cur.integer();
      if (coeff < 0 || coeff >= static_cast<std::int64_t>(q))
        throw DigitOutOfRange("coefficient " + std::to_string(coeff) + " not in [0, " + std::to_string(q) + ")",
                              term_pos);
      if (cur.accept('*')) exp = cur.power_of_u();
    } else {
      exp = cur.power_of_u();
    }
    std::uint32_t c = static_cast<std::uint32_t>(coeff);
    if (negative) c = (q - c) % q;
    terms.push_back({exp, c});
  }
  if (terms.empty()) return is_infinite(known_to) ? Laurent(q) : Laurent::unknown(q, known_to);
  auto [lo_it, hi_it] =
      std::minmax_element(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.exp < b.exp; });
  const std::int64_t lo = lo_it->exp;
  const std::int64_t hi = hi_it->exp;
  if (hi - lo > (std::int64_t{1} << 24)) throw ParseError("exponent range too large", 0);
  std::vector<Digit> digits(static_cast<std::size_t>(hi - lo + 1), 0);
  for (const auto& t : terms) {
    auto& d = digits[static_cast<std::size_t>(t.exp - lo)];
    d = static_cast<Digit>(residue::add(d, t.coeff, q));
  }
  return Laurent::from_digits(q, lo, std::move(digits), known_to);
}

std::string to_string(const Laurent& x) {
  std::string out;
  const auto digits = x.digits();
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const Digit d = digits[i];
    if (d == 0) continue;
    const std::int64_t e = x.lead_val() + static_cast<std::int64_t>(i);
    if (!out.empty()) out += " + ";
    if (e == 0) {
      out += std::to_string(d);
      continue;
    }
    if (d != 1) out += std::to_string(d) + "*";
    out += "u";
    if (e != 1) out += "^" + std::to_string(e);
  }
  if (!x.exact()) {
    if (!out.empty()) out += " + ";
    out += x.known_to() == 1 ? std::string("O(u)") : "O(u^" + std::to_string(x.known_to()) + ")";
  }
  if (out.empty()) out = "0";
  return out;
}

}  // namespace nafree
