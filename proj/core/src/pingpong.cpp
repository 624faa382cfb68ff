#include "nafree/pingpong.hpp"

#include <algorithm>
#include <cstdio>
#include <atomic>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace nafree {

namespace {

std::int64_t sat(std::int64_t v) { return std::clamp(v, kNegInfinity, kInfinity); }

std::int64_t add_bound(std::int64_t a, std::int64_t b) {
  if (a <= kNegInfinity || b <= kNegInfinity) return kNegInfinity;
  if (a >= kInfinity || b >= kInfinity) return kInfinity;
  return sat(a + b);
}

std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// x^m for any integer m; monomials invert exactly.
Laurent lpow(const Laurent& x, std::int64_t m) {
  if (m >= 0) return pow(x, static_cast<std::uint64_t>(m));
  return pow(inv(x, kNormalizePrecision * 2), static_cast<std::uint64_t>(-m));
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  // b > 0
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

std::int64_t ceil_rational(const Rational& r) {
  return ceil_div(r.numerator(), r.denominator());
}

std::string bound_str(std::int64_t v) {
  if (v >= kInfinity) return "+inf";
  if (v <= kNegInfinity) return "-inf";
  return std::to_string(v);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Runs body(begin, end, out) over [0, n) in contiguous chunks and concatenates
// the per-chunk outputs in index order.
template <typename Out>
std::vector<Out> parallel_chunks(std::uint64_t n, unsigned threads,
                                 const std::function<void(std::uint64_t, std::uint64_t, Out&)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t chunks = std::min<std::uint64_t>(std::max<std::uint64_t>(n, 1), threads * 4ull);
  std::vector<Out> outs(chunks);
  std::vector<std::exception_ptr> errors(chunks);
  auto run = [&](std::uint64_t c) {
    try {
      body(n * c / chunks, n * (c + 1) / chunks, outs[c]);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  if (threads == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run(c);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) run(c);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return outs;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generators

bool DiagPair::pattern_holds() const {
  if (!a.is_diagonal() || !b.is_diagonal()) return false;
  std::int64_t va[3], vb[3];
  for (std::size_t i = 0; i < 3; ++i) {
    if (!a(i, i).has_digits() || !b(i, i).has_digits()) return false;
    va[i] = a(i, i).lead_val();
    vb[i] = b(i, i).lead_val();
  }
  return va[0] == vb[1] && va[0] > va[1] && va[1] == va[2] && va[2] == vb[0] && vb[0] == vb[2];
}

Matrix DiagPair::element(std::int64_t m, std::int64_t n) const {
  std::vector<Laurent> d;
  for (std::size_t i = 0; i < 3; ++i) d.push_back(lpow(a(i, i), m) * lpow(b(i, i), n));
  return Matrix::diagonal(d);
}

DiagPair DiagPair::from_diagonals(const Matrix& a, const Matrix& b) {
  if (a.dim() != 3 || b.dim() != 3 || !a.is_diagonal() || !b.is_diagonal())
    throw InvalidArgument("generators must be 3x3 diagonal matrices");
  DiagPair p{a, b, Laurent(a.q()), Laurent(a.q()), Laurent(a.q()), Laurent(a.q())};
  p.alpha1 = divide(a(0, 0), a(2, 2), 2 * kNormalizePrecision);
  p.alpha2 = divide(a(1, 1), a(2, 2), 2 * kNormalizePrecision);
  p.beta1 = divide(b(0, 0), b(2, 2), 2 * kNormalizePrecision);
  p.beta2 = divide(b(1, 1), b(2, 2), 2 * kNormalizePrecision);
  p.power_applied = 1;
  p.s = p.s_prime = 0;
  return p;
}

DiagPair make_generators(std::uint32_t q, std::int64_t s, std::int64_t s_prime) {
  FieldParams{q, 32}.validate();
  if (s < 1 || s_prime < 1) throw InvalidArgument("valuation profile entries must be >= 1");
  const std::int64_t power = static_cast<std::int64_t>(q) * (q - 1);
  const Matrix a = Matrix::diagonal_monomials(q, {2 * s * power, -s * power, -s * power});
  const Matrix b = Matrix::diagonal_monomials(q, {-s_prime * power, 2 * s_prime * power, -s_prime * power});
  DiagPair p = DiagPair::from_diagonals(a, b);
  p.power_applied = power;
  p.s = s;
  p.s_prime = s_prime;
  return p;
}

// ---------------------------------------------------------------------------
// Valuation intervals

ValInterval ValInterval::exact(std::int64_t v, std::vector<Digit> prefix) {
  ValInterval x;
  x.lo = x.hi = v;
  x.prefix = std::move(prefix);
  return x;
}

bool ValInterval::admits(std::int64_t v) const {
  if (v < lo || v > hi) return false;
  if (modulus == 0) return v == lo;
  return mod_floor(v - residue, modulus) == 0;
}

std::optional<Digit> ValInterval::lead_digit() const {
  if (prefix.empty()) return std::nullopt;
  return prefix.front();
}

std::string ValInterval::str() const {
  std::ostringstream os;
  if (singleton())
    os << "{" << lo << "}";
  else
    os << "[" << bound_str(lo) << "," << bound_str(hi) << "]";
  if (modulus > 1) os << " = " << residue << " mod " << modulus;
  if (!prefix.empty()) {
    os << " lead ";
    for (std::size_t i = 0; i < prefix.size(); ++i) os << (i ? "." : "") << int(prefix[i]);
  }
  if (may_vanish) os << " or 0";
  if (may_be_infinite) os << " or inf";
  return os.str();
}

namespace {

std::int64_t residue_of(const ValInterval& x) { return x.modulus == 0 ? x.lo : x.residue; }

std::vector<Digit> prefix_mul(const std::vector<Digit>& x, const std::vector<Digit>& y, std::uint32_t q) {
  const std::size_t n = std::min(x.size(), y.size());
  std::vector<Digit> out(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::uint32_t acc = 0;
    for (std::size_t i = 0; i <= k; ++i) acc = (acc + std::uint32_t{x[i]} * y[k - i]) % q;
    out[k] = static_cast<Digit>(acc);
  }
  return out;
}

std::vector<Digit> prefix_div(const std::vector<Digit>& x, const std::vector<Digit>& y, std::uint32_t q) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n == 0 || y[0] == 0) return {};
  const std::uint32_t y0inv = residue::inv(y[0], q);
  std::vector<Digit> out(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::uint32_t acc = x[k];
    for (std::size_t i = 0; i < k; ++i) acc = residue::sub(acc, residue::mul(out[i], y[k - i], q), q);
    out[k] = static_cast<Digit>(residue::mul(acc, y0inv, q));
  }
  return out;
}

void set_congruence(ValInterval& out, const ValInterval& x, const ValInterval& y, std::int64_t r) {
  const std::int64_t g = std::gcd(x.modulus, y.modulus);
  out.modulus = g;
  out.residue = g == 0 ? 0 : mod_floor(r, g);
  if (g == 0) out.lo = out.hi = r;
}

}  // namespace

ValInterval vi_mul(const ValInterval& x, const ValInterval& y, std::uint32_t q) {
  ValInterval out;
  out.lo = add_bound(x.lo, y.lo);
  out.hi = add_bound(x.hi, y.hi);
  out.may_vanish = x.may_vanish || y.may_vanish;
  set_congruence(out, x, y, residue_of(x) + residue_of(y));
  out.prefix = prefix_mul(x.prefix, y.prefix, q);
  return out;
}

ValInterval vi_sub(const ValInterval& x, const ValInterval& y, std::uint32_t q) {
  if (x.hi < y.lo && !x.may_vanish) {
    ValInterval out = x;
    out.may_vanish = false;
    // y only disturbs digits from relative position y.lo - x.hi on
    if (y.lo < kInfinity) out.prefix.resize(std::min<std::size_t>(out.prefix.size(), y.lo - x.hi));
    return out;
  }
  if (y.hi < x.lo && !y.may_vanish) {
    ValInterval out = y;
    out.may_vanish = false;
    if (x.lo < kInfinity) out.prefix.resize(std::min<std::size_t>(out.prefix.size(), x.lo - y.hi));
    for (auto& d : out.prefix) d = static_cast<Digit>(residue::sub(0, d, q));
    return out;
  }
  ValInterval out;
  if (x.singleton() && y.singleton() && x.lo == y.lo && !x.may_vanish && !y.may_vanish) {
    const std::size_t r = std::min(x.prefix.size(), y.prefix.size());
    for (std::size_t k = 0; k < r; ++k) {
      if (x.prefix[k] != y.prefix[k]) {
        return ValInterval::exact(x.lo + static_cast<std::int64_t>(k),
                                  {static_cast<Digit>(residue::sub(x.prefix[k], y.prefix[k], q))});
      }
    }
    out.lo = x.lo + static_cast<std::int64_t>(r);
  } else {
    out.lo = std::min(x.lo, y.lo);
  }
  out.hi = kInfinity;
  out.may_vanish = true;
  out.modulus = 1;
  out.residue = 0;
  return out;
}

ValInterval vi_div(const ValInterval& x, const ValInterval& y, std::uint32_t q) {
  ValInterval out;
  out.lo = (x.lo <= kNegInfinity || y.hi >= kInfinity) ? kNegInfinity : sat(x.lo - y.hi);
  out.hi = (x.hi >= kInfinity || y.lo <= kNegInfinity) ? kInfinity : sat(x.hi - y.lo);
  out.may_vanish = x.may_vanish;
  out.may_be_infinite = y.may_vanish || x.may_be_infinite;
  set_congruence(out, x, y, residue_of(x) - residue_of(y));
  out.prefix = prefix_div(x.prefix, y.prefix, q);
  return out;
}

ValInterval vi_power(const Laurent& x, int sign) {
  if (!x.has_digits()) throw InsufficientPrecision("power of an element with unknown valuation");
  if (sign == 0) return ValInterval::exact(0, {1, 0});
  const std::int64_t v = x.lead_val();
  const auto d0 = x.digit_at(v), d1 = x.digit_at(v + 1);
  std::vector<Digit> prefix;
  if (d0 && *d0 == 1) {
    prefix.push_back(1);
    if (d1 && *d1 == 0) prefix.push_back(0);
  }
  ValInterval out;
  out.prefix = std::move(prefix);
  if (v == 0) {
    out.lo = out.hi = 0;
    return out;
  }
  const std::int64_t step = v * sign;  // valuation of x^m is m v, m of the given sign
  out.modulus = std::abs(v);
  out.residue = 0;
  if (step > 0) {
    out.lo = step;
    out.hi = kInfinity;
  } else {
    out.lo = kNegInfinity;
    out.hi = step;
  }
  return out;
}

std::string SigmaCase::label() const {
  auto c = [](int s) { return s < 0 ? '-' : (s > 0 ? '+' : '0'); };
  return std::string("(") + c(sign_m) + "," + c(sign_n) + ")";
}

bool SigmaProof::certified() const {
  return cases.size() == 8 && std::all_of(cases.begin(), cases.end(), [](const SigmaCase& c) { return c.excluded; });
}

SigmaProof sigma_cases(const DiagPair& pair, bool digit_refinement) {
  const std::uint32_t q = pair.q();
  const ValInterval one_plus_m = ValInterval::exact(0, {1, 0});  // 1 + lambda, lambda in u m
  SigmaProof proof;
  for (int sm : {-1, 0, 1}) {
    for (int sn : {-1, 0, 1}) {
      if (sm == 0 && sn == 0) continue;
      SigmaCase c;
      c.sign_m = sm;
      c.sign_n = sn;
      const ValInterval a2 = vi_mul(vi_power(pair.alpha2, sm), vi_power(pair.beta2, sn), q);
      const ValInterval a1 = vi_mul(vi_power(pair.alpha1, sm), vi_power(pair.beta1, sn), q);
      c.numerator = vi_sub(vi_mul(a2, one_plus_m, q), one_plus_m, q);
      c.denominator = vi_sub(vi_mul(a1, one_plus_m, q), one_plus_m, q);
      c.quotient = vi_div(c.numerator, c.denominator, q);
      c.excluded = !c.quotient.admits(1);
      if (!c.excluded && digit_refinement) {
        const auto d = c.quotient.lead_digit();
        if (d && *d != 1) c.excluded = true;
      }
      proof.trace += c.label() + " num " + c.numerator.str() + " | den " + c.denominator.str() + " | sigma " +
                     c.quotient.str() + " | " + (c.excluded ? "val 1 excluded" : "val 1 possible") + "\n";
      proof.cases.push_back(std::move(c));
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(proof.trace)));
  proof.digest = buf;
  return proof;
}

SigmaProof sigma_exclusion(const DiagPair& pair, bool digit_refinement) {
  SigmaProof proof = sigma_cases(pair, digit_refinement);
  for (const auto& c : proof.cases)
    if (!c.excluded) throw ExclusionFailed(c.label(), "sigma " + c.quotient.str());
  return proof;
}

SigmaSample sigma_parts(const DiagPair& pair, std::int64_t m, std::int64_t n, const Laurent& lambda1,
                        const Laurent& lambda2, const Laurent& mu1, const Laurent& mu2) {
  const Laurent one = Laurent::one(pair.q());
  const Laurent a2 = lpow(pair.alpha2, m) * lpow(pair.beta2, n);
  const Laurent a1 = lpow(pair.alpha1, m) * lpow(pair.beta1, n);
  return {a2 * (one + lambda2) - (one + mu2), a1 * (one + lambda1) - (one + mu1)};
}

// ---------------------------------------------------------------------------
// Regular elements

const char* to_string(Strategy s) { return s == Strategy::Synthetic ? "synthetic" : "lattice"; }

Strategy parse_strategy(const std::string& s) {
  if (s == "synthetic") return Strategy::Synthetic;
  if (s == "lattice") return Strategy::Lattice;
  throw InvalidArgument("unknown strategy '" + s + "'");
}

Matrix synthetic_basis(std::uint32_t q) {
  const Laurent one = Laurent::one(q), u = Laurent::uniformizer(q);
  return Matrix::from_columns({{one, one, one}, {one, u, Laurent(q)}, {one, one + u * u, one}});
}

namespace {

bool flags_in_W(const Matrix& h, std::optional<std::int64_t> precision) {
  try {
    const EigenSystem sys = eigen_flags(h, precision);
    return in_W(sys.attracting) == Tri::True && in_W(sys.repelling) == Tri::True;
  } catch (const Error&) {
    return false;
  }
}

Laurent random_poly_in_t(std::mt19937_64& rng, std::uint32_t q, std::int64_t degree) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(degree + 1));
  for (auto& x : c) x = static_cast<std::int64_t>(rng() % q);
  return Laurent::from_coeffs(q, -degree, c);  // t^k = u^-k
}

}  // namespace

SearchResult find_regular_search(Strategy strategy, std::uint64_t seed, const DiagPair& pair,
                                 const SearchOptions& opts) {
  const std::uint32_t q = pair.q();
  if (strategy == Strategy::Synthetic) {
    if (opts.exponent < 1) throw InvalidArgument("synthetic exponent must be >= 1");
    const Matrix p = synthetic_basis(q);
    const Matrix h = p * Matrix::diagonal_monomials(q, {-opts.exponent, 0, opts.exponent}) * mat_inv(p);
    if (!h.exact() || !det(h).is_exact_one() || !regularity_test(h) || !flags_in_W(h, std::nullopt))
      throw Error("synthetic element failed its own checks");
    return {h, 1};
  }
  // Direct hits with both flags in W are rare (about q^-12 per flag). A
  // sampled k whose attracting flag is in W pulls generic flags into W, so
  // k^N h0 k^-N is tried for the first regular sample h0 as well.
  std::mt19937_64 rng(seed);
  std::optional<Matrix> h0;
  for (std::uint64_t trial = 1; trial <= opts.budget; ++trial) {
    Matrix h = Matrix::identity(q);
    for (std::size_t k = 0; k < opts.factors; ++k) {
      const std::size_t i = rng() % 3;
      const std::size_t j = (i + 1 + rng() % 2) % 3;
      h = h * Matrix::elementary(3, i, j, random_poly_in_t(rng, q, opts.degree));
    }
    if (!regularity_test(h)) continue;
    if (!h0) {
      h0 = h;
      continue;
    }
    if (flags_in_W(h, 12) && flags_in_W(h, std::nullopt)) return {h, trial};
    bool attracting_in_W = false;
    try {
      attracting_in_W = in_W(eigen_flags(h, 12).attracting) == Tri::True;
    } catch (const Error&) {
    }
    if (!attracting_in_W) continue;
    for (std::int64_t n = 1; n <= 4; ++n) {
      const Matrix kn = mat_pow(h, n);
      const Matrix c = kn * *h0 * mat_pow(h, -n);
      if (flags_in_W(c, 12) && flags_in_W(c, std::nullopt)) return {c, trial};
    }
  }
  throw SearchExhausted("no regular element with flags in W within " + std::to_string(opts.budget) + " trials");
}

Matrix find_regular(Strategy strategy, std::uint64_t seed, const DiagPair& pair) {
  return find_regular_search(strategy, seed, pair).h;
}

// ---------------------------------------------------------------------------
// Contraction

namespace {

std::int64_t exact_row_min(const Matrix& m, std::size_t row) {
  std::int64_t best = kInfinity, floor = kInfinity;
  for (std::size_t j = 0; j < m.dim(); ++j) {
    const Valuation v = m(row, j).valuation();
    if (v.finite())
      best = std::min(best, v.value);
    else if (v.undecidable())
      floor = std::min(floor, v.value);
  }
  if (floor <= best) throw InsufficientPrecision("row valuation of the inverse eigenbasis is undecidable");
  return best;
}

struct Anchors {
  Vec plus, minus;
};

Vec anchor_of(const ProjPoint& p) {
  Vec out;
  for (const auto& c : p.coords) out.push_back(c.truncated_exact(std::min<std::int64_t>(c.known_to(), 16)));
  return out;
}

Anchors anchors_from(const Matrix& h) {
  const EigenSystem sys = eigen_flags(h);
  return {anchor_of(sys.attracting.point), anchor_of(sys.repelling.point)};
}

// Some coordinate of y certainly has valuation <= -e, i.e. ||y|| >= q^e.
bool norm_at_least(const Vec& y, std::int64_t e) {
  for (const auto& c : y) {
    const Valuation v = c.valuation();
    if (v.finite() && -v.value >= e) return true;
  }
  return false;
}

// Balls outside V_x- (resp. V_x+) whose image under g^N (resp. g^-N) is not certainly in U.
bool contracts_everything(const Matrix& fwd, const Matrix& bwd, const Anchors& an, std::uint32_t q,
                          std::int64_t level) {
  const std::uint64_t n = ball_count(q, level);
  for (std::uint64_t i = 0; i < n; ++i) {
    const Vec w = ball_at(q, level, i).abstract_vector();
    if (in_V(an.minus, w) != Tri::True && in_U(mat_apply(fwd, w)) != Tri::True) return false;
    if (in_V(an.plus, w) != Tri::True && in_U(mat_apply(bwd, w)) != Tri::True) return false;
  }
  return true;
}

}  // namespace

EigenBasisBound eigenbasis_bound(const Matrix& h) {
  const EigenSystem sys = eigen_flags(h);
  std::vector<Vec> cols;
  for (const auto& p : sys.eigenvectors) cols.push_back(p.coords);
  const Matrix p = Matrix::from_columns(cols);
  const Matrix pinv = mat_inv(p, kNormalizePrecision);
  EigenBasisBound b;
  for (const auto& lam : sys.eigenvalues) b.eig_val.push_back(lam.valuation().value);
  for (std::size_t i = 0; i < 3; ++i) b.rho.push_back(exact_row_min(pinv, i));
  b.lognorm_p = lognorm(p);
  b.lognorm_pinv = lognorm(pinv);
  return b;
}

ContractionResult contraction_analysis(const Matrix& h, const DiagPair& pair) {
  (void)pair;
  try {
    const EigenBasisBound b = eigenbasis_bound(h);
    const std::int64_t need = b.kappa + kDecidingDepth;
    std::int64_t n0 = 1;
    // Forward: the dominant coordinate c_0 has valuation <= rho_0 + kappa off V_x-.
    for (std::size_t i : {1u, 2u})
      n0 = std::max(n0, ceil_div(b.rho[0] - b.rho[i] + need, b.eig_val[i] - b.eig_val[0]));
    // Backward: c_2 dominates under h^-1 off V_x+.
    for (std::size_t i : {0u, 1u})
      n0 = std::max(n0, ceil_div(b.rho[2] - b.rho[i] + need, b.eig_val[2] - b.eig_val[i]));
    return {n0, "eigenbasis-bound"};
  } catch (const InsufficientPrecision&) {
  } catch (const SingularOrUndecidable&) {
  }
  const Anchors an = anchors_from(h);
  const std::uint32_t q = h.q();
  const std::int64_t level = q == 2 ? 6 : 4;
  for (std::int64_t n = 1; n <= 32; ++n)
    if (contracts_everything(mat_pow(h, n), mat_pow(h, -n), an, q, level)) return {n, "search"};
  throw InsufficientPrecision("no contraction power up to 32 found by search");
}

std::int64_t contraction_power(const Matrix& h, const DiagPair& pair) { return contraction_analysis(h, pair).n0; }

// ---------------------------------------------------------------------------
// Constants

Rational delta_growth_rate(const DiagPair& pair) {
  std::int64_t va[3], vb[3];
  for (std::size_t i = 0; i < 3; ++i) {
    va[i] = pair.a(i, i).lead_val();
    vb[i] = pair.b(i, i).lead_val();
  }
  // log_q(||a^m b^n|| ||(a^m b^n)^-1||) = max over i, j of (va_i - va_j) m + (vb_i - vb_j) n.
  std::vector<std::pair<std::int64_t, std::int64_t>> forms;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) forms.emplace_back(va[i] - va[j], vb[i] - vb[j]);
  auto f = [&](const Rational& m, const Rational& n) {
    Rational best(0);
    for (auto [x, y] : forms) best = std::max(best, m * x + n * y);
    return best;
  };
  Rational best(-1);
  for (int sm : {-1, 1}) {
    for (int sn : {-1, 1}) {
      // edge (m, n) = (sm t, sn (1 - t)), t in [0, 1]; each form is A t + B
      std::vector<Rational> ts{Rational(0), Rational(1)};
      std::vector<std::pair<std::int64_t, std::int64_t>> lines;
      for (auto [x, y] : forms) lines.emplace_back(sm * x - sn * y, sn * y);
      lines.emplace_back(0, 0);
      for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
          const std::int64_t da = lines[i].first - lines[j].first;
          if (da == 0) continue;
          const Rational t(lines[j].second - lines[i].second, da);
          if (t > 0 && t < 1) ts.push_back(t);
        }
      for (const auto& t : ts) {
        const Rational v = f(Rational(sm) * t, Rational(sn) * (1 - t));
        if (best < 0 || v < best) best = v;
      }
    }
  }
  return best;
}

Constants qi_constants(const DiagPair& pair, const Matrix& g, std::int64_t n0) {
  const EigenBasisBound b = eigenbasis_bound(g);
  Constants k;
  k.theta = 0;
  k.theta_prime = std::max<std::int64_t>(0, std::max(b.rho[0], b.rho[2]) + b.kappa + b.lognorm_p + 2 * b.lognorm_pinv);
  k.epsilon_exponent = std::max(k.theta, k.theta_prime);
  k.alpha1 = delta_growth_rate(pair);
  k.c = Rational(0);
  k.gap = b.eig_val[2] - b.eig_val[0];
  if (k.gap <= 0) throw InvalidArgument("g is not regular");
  k.R_prime = std::max<std::int64_t>(1, ceil_rational((Rational(4 * k.epsilon_exponent) + k.c + k.alpha1) / k.gap));
  k.alpha2 = k.alpha1;
  k.alpha = std::min(k.alpha1, k.alpha2);
  k.c_total = Rational(4 * k.epsilon_exponent) + 2 * k.c;
  k.N0 = n0;
  return k;
}

// ---------------------------------------------------------------------------
// Ping-pong

namespace {

struct BallFindings {
  std::uint64_t count = 0;
  std::vector<std::string> listed;
};

struct Power {
  std::string name;
  Matrix m;
  std::int64_t norm;
  bool in_gamma2;  // a power of g^R'
};

}  // namespace

PingPongReport verify_pingpong(const DiagPair& pair, const Matrix& g, std::int64_t level, std::int64_t gamma_bound,
                               const Constants& constants, const PingPongOptions& opts) {
  if (level < 3) throw InsufficientLevel("ball level must be at least 3 to decide the level-2 regions");
  if (gamma_bound < 1) throw InvalidArgument("gamma bound must be >= 1");
  if (!g.exact()) throw InvalidArgument("g must be exact");
  const std::uint32_t q = pair.q();
  PingPongReport report;
  report.level = level;

  Anchors an;
  try {
    an = anchors_from(opts.anchor_source ? *opts.anchor_source : g);
  } catch (const Error& e) {
    report.violation_count = 1;
    report.violations.push_back(std::string("no attracting/repelling flags: ") + e.what());
    return report;
  }
  for (const auto* x : {&an.plus, &an.minus})
    if (in_U(*x) != Tri::True) {
      ++report.violation_count;
      report.violations.push_back("anchor " + to_string(*x) + " is not in U");
    }
  if (report.violation_count) return report;

  std::vector<std::int64_t> exps;
  for (std::int64_t r = 1; r <= gamma_bound; ++r) {
    exps.push_back(r);
    exps.push_back(r * constants.R_prime);
  }
  std::sort(exps.begin(), exps.end());
  exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
  std::vector<Power> fwd, bwd;
  for (std::int64_t n : exps) {
    const bool sub = n % constants.R_prime == 0 && n / constants.R_prime <= gamma_bound;
    Matrix f = mat_pow(g, n), b = mat_pow(g, -n);
    fwd.push_back({"g^" + std::to_string(n), f, lognorm(f), sub});
    bwd.push_back({"g^" + std::to_string(-n), b, lognorm(b), sub});
  }
  std::vector<Power> deltas;
  for (std::int64_t m = -gamma_bound; m <= gamma_bound; ++m)
    for (std::int64_t n = -gamma_bound; n <= gamma_bound; ++n) {
      if (m == 0 && n == 0) continue;
      Matrix d = pair.element(m, n);
      deltas.push_back({"a^" + std::to_string(m) + " b^" + std::to_string(n), d, lognorm(d), true});
    }
  const std::int64_t theta_prime = constants.theta_prime;
  const std::int64_t theta = constants.theta;
  const std::size_t max_listed = opts.max_listed;

  const std::uint64_t total = ball_count(q, level);
  auto body = [&](std::uint64_t begin, std::uint64_t end, BallFindings& out) {
    auto flag = [&](const ResidueBall& ball, const std::string& what) {
      ++out.count;
      if (out.listed.size() < max_listed) out.listed.push_back(to_string(ball) + " " + what);
    };
    for (std::uint64_t i = begin; i < end; ++i) {
      const ResidueBall ball = ball_at(q, level, i);
      const Vec w = ball.abstract_vector();
      const Tri u = in_U(w);
      const Tri vp = in_V(an.plus, w), vm = in_V(an.minus, w);
      if (u == Tri::Unknown) flag(ball, "membership in U undecided");
      const bool meets_c1 = vp != Tri::True && vm != Tri::True;
      // Powers of g send everything off V_x-/V_x+ into U, and satisfy the norm bound on C1.
      for (const auto* side : {&fwd, &bwd}) {
        const bool outside = side == &fwd ? vm != Tri::True : vp != Tri::True;
        if (!outside) continue;
        for (const Power& p : *side) {
          const Vec y = mat_apply(p.m, w);
          if (in_U(y) != Tri::True) flag(ball, p.name + " image not in U");
          if (meets_c1 && p.in_gamma2 && !norm_at_least(y, p.norm - theta_prime)) flag(ball, p.name + " norm condition");
        }
      }
      // Nontrivial elements of Delta send U off V_x+ and V_x-.
      if (u == Tri::True) {
        for (const Power& d : deltas) {
          const Vec y = mat_apply(d.m, w);
          if (in_V(an.plus, y) != Tri::False || in_V(an.minus, y) != Tri::False) flag(ball, d.name + " image meets V");
          if (!norm_at_least(y, d.norm - theta)) flag(ball, d.name + " norm condition");
        }
      }
    }
  };
  const auto parts = parallel_chunks<BallFindings>(total, opts.threads, body);
  for (const auto& part : parts) {
    report.violation_count += part.count;
    for (const auto& s : part.listed)
      if (report.violations.size() < max_listed) report.violations.push_back(s);
  }
  report.balls_checked = total;
  return report;
}

PingPongReport verify_pingpong(const DiagPair& pair, const Matrix& g, std::int64_t level, std::int64_t gamma_bound) {
  return verify_pingpong(pair, g, level, gamma_bound, qi_constants(pair, g));
}

// ---------------------------------------------------------------------------
// Words

std::int64_t ReducedWord::length() const {
  std::int64_t n = 0;
  for (const auto& s : syllables) {
    if (const auto* d = std::get_if<DeltaSyllable>(&s))
      n += std::abs(d->m) + std::abs(d->n);
    else
      n += std::abs(std::get<GSyllable>(s).r);
  }
  return n;
}

bool ReducedWord::valid() const {
  for (std::size_t i = 0; i < syllables.size(); ++i) {
    const auto& s = syllables[i];
    if (const auto* d = std::get_if<DeltaSyllable>(&s)) {
      if (d->m == 0 && d->n == 0) return false;
    } else if (std::get<GSyllable>(s).r == 0) {
      return false;
    }
    if (i > 0 && s.index() == syllables[i - 1].index()) return false;
  }
  return true;
}

std::string ReducedWord::str() const {
  if (syllables.empty()) return "1";
  std::string out;
  for (const auto& s : syllables) {
    if (!out.empty()) out += " ";
    if (const auto* d = std::get_if<DeltaSyllable>(&s))
      out += "d(" + std::to_string(d->m) + "," + std::to_string(d->n) + ")";
    else
      out += "G^" + std::to_string(std::get<GSyllable>(s).r);
  }
  return out;
}

namespace {

struct SyllableMats {
  Syllable s;
  std::int64_t len;
  Matrix m, minv;
};

struct SurveyState {
  const std::vector<SyllableMats>* delta;
  const std::vector<SyllableMats>* gs;
  Rational alpha, c_total, a, C;
  bool keep;
  WordSurvey* out;
};

Rational record(SurveyState& st, const ReducedWord& w, std::int64_t len, const Matrix& m, const Matrix& minv) {
  WordRow row;
  row.length = len;
  row.identity = m.is_identity();
  row.log_norm_product = lognorm(m) + lognorm(minv);
  row.mu = cartan_projection(m).mu;
  row.margin = Rational(row.log_norm_product) - (st.alpha * len - st.c_total);
  const Rational rhs = st.a * len - st.C;
  Rational norm2(0);
  for (auto x : row.mu) norm2 += Rational(x * x);
  row.mu_ok = rhs <= 0 || norm2 >= rhs * rhs;
  WordSurvey& out = *st.out;
  ++out.words;
  if (row.identity || row.margin < 0 || !row.mu_ok) ++out.violations;
  const Rational margin = row.margin;
  if (st.keep) {
    row.word = w;
    out.rows.push_back(std::move(row));
  }
  return margin;
}

void extend(SurveyState& st, ReducedWord& w, std::int64_t len, std::int64_t budget, const Matrix& m,
            const Matrix& minv, int last, bool& first, Rational& min_margin) {
  for (int kind : {0, 1}) {
    if (kind == last) continue;
    for (const auto& s : kind == 0 ? *st.delta : *st.gs) {
      if (s.len > budget) continue;
      const Matrix m2 = m * s.m;
      const Matrix minv2 = s.minv * minv;
      w.syllables.push_back(s.s);
      const Rational margin = record(st, w, len + s.len, m2, minv2);
      if (first || margin < min_margin) min_margin = margin;
      first = false;
      extend(st, w, len + s.len, budget - s.len, m2, minv2, kind, first, min_margin);
      w.syllables.pop_back();
    }
  }
}

}  // namespace

WordSurvey word_survey(const DiagPair& pair, const Matrix& g, std::int64_t L, const Constants& constants,
                       bool keep_rows) {
  const std::uint32_t q = pair.q();
  std::vector<SyllableMats> delta, gs;
  for (std::int64_t k = 1; k <= L; ++k)
    for (std::int64_t m = -k; m <= k; ++m) {
      const std::int64_t rest = k - std::abs(m);
      for (std::int64_t n : {-rest, rest}) {
        delta.push_back({DeltaSyllable{m, n}, k, pair.element(m, n), pair.element(-m, -n)});
        if (rest == 0) break;
      }
    }
  const Matrix G = mat_pow(g, constants.R_prime);
  const Matrix Ginv = mat_pow(g, -constants.R_prime);
  for (std::int64_t r = 1; r <= L; ++r) {
    const Matrix p = mat_pow(G, r), pinv = mat_pow(Ginv, r);
    gs.push_back({GSyllable{r}, r, p, pinv});
    gs.push_back({GSyllable{-r}, r, pinv, p});
  }
  WordSurvey out;
  out.a = constants.alpha * Rational(7, 10);
  out.C = constants.c_total;
  SurveyState st{&delta, &gs, constants.alpha, constants.c_total, out.a, out.C, keep_rows, &out};
  ReducedWord w;
  bool first = true;
  Rational min_margin(0);
  extend(st, w, 0, L, Matrix::identity(q), Matrix::identity(q), -1, first, min_margin);
  out.min_margin = min_margin;
  return out;
}

bool irreducibility_witness(const DiagPair& pair, const Matrix& g) {
  if (!pair.a.is_diagonal() || !pair.b.is_diagonal()) throw InvalidArgument("Delta must be diagonal");
  if (g.dim() != 3) throw InvalidArgument("g must be 3x3");
  for (std::size_t k = 0; k < 3; ++k) {
    bool moves_point = false, moves_plane = false;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i == k) continue;
      if (!g(i, k).is_exact_zero()) moves_point = true;  // column k leaves the line of e_k
      if (!g(k, i).is_exact_zero()) moves_plane = true;  // row k: the plane x_k = 0 is not invariant
    }
    if (!moves_point || !moves_plane) return false;
  }
  return true;
}

}  // namespace nafree
