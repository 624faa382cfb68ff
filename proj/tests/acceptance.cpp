// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "nafree/certificate.hpp"
#include "oracle.hpp"

using namespace nafree;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::optional<Certificate> main_q2, main_q3;

PipelineArgs synthetic_args(std::uint32_t q, std::int64_t level) {
  PipelineArgs a;
  a.q = q;
  a.seed = 7;
  a.level = level;
  a.gamma_bound = 3;
  a.word_bound = 8;
  return a;
}

std::string summary(const Certificate& c) {
  std::ostringstream os;
  os << "q=" << c.q << " M=" << c.level << " balls=" << c.balls_checked << " pp_violations=" << c.pingpong_violations
     << " words=" << c.words_checked << " word_violations=" << c.word_violations
     << " min_margin=" << to_string(c.min_growth_margin) << " N0=" << c.n0 << " R'=" << c.constants.R_prime
     << " alpha=" << to_string(c.constants.alpha) << " c_total=" << to_string(c.constants.c_total);
  return os.str();
}

bool same_point(const ProjPoint& a, const Vec& b, std::int64_t depth) {
  const ProjPoint nb = normalize_point(b);
  for (std::size_t i = 0; i < 3; ++i)
    if (equal_mod(a.coords[i], nb.coords[i], depth) != Tri::True) return false;
  return true;
}

Vec sample_in_ball(std::mt19937_64& rng, const ResidueBall& b, std::int64_t extra) {
  Vec v = b.representative();
  const Vec a = b.abstract_vector();
  for (std::size_t i = 0; i < 3; ++i)
    if (!a[i].exact()) v[i] += oracle::random_laurent(rng, b.q, b.level, b.level + extra);
  return v;
}

Outcome c1_end_to_end() {
  bool ok = true;
  std::string detail;
  for (auto [q, level] : {std::pair<std::uint32_t, std::int64_t>{2, 10}, {3, 6}}) {
    Certificate c = construct_pipeline(synthetic_args(q, level));
    const VerifyReport r = verify_certificate(c);
    ok = ok && c.passed() && r.ok && c.balls_checked == ball_count(q, level);
    detail += (detail.empty() ? "" : "; ") + summary(c) + (r.ok ? " verify=ok" : " verify=FAILED");
    (q == 2 ? main_q2 : main_q3) = std::move(c);
  }
  return {ok, detail};
}

Outcome c2_sigma() {
  std::uint64_t samples = 0, hits = 0, unsound = 0;
  bool certified = true;
  std::string digests;
  for (std::uint32_t q : {2u, 3u}) {
    const DiagPair pair = make_generators(q, 1, 1);
    const SigmaProof proof = sigma_cases(pair);
    certified = certified && proof.certified();
    digests += (digests.empty() ? "" : ",") + proof.digest;
    std::mt19937_64 rng(1000 + q);
    std::uniform_int_distribution<std::int64_t> mag(1, 5);
    auto small = [&] { return rng() % 5 == 0 ? Laurent(q) : oracle::random_laurent(rng, q, 2, 9); };
    for (const auto& c : proof.cases) {
      for (int t = 0; t < 10000; ++t) {
        const std::int64_t m = c.sign_m * mag(rng), n = c.sign_n * mag(rng);
        const Laurent l1 = small(), l2 = small();
        const Laurent m1 = t % 11 == 0 ? l1 : small(), m2 = t % 7 == 0 ? l2 : small();
        const SigmaSample s = sigma_parts(pair, m, n, l1, l2, m1, m2);
        ++samples;
        if (ratio_in(s.num, s.den, Region::PiPlusPiM) != Tri::False) ++hits;
        const bool num_ok = s.num.is_exact_zero() ? c.numerator.may_vanish : c.numerator.admits(s.num.lead_val());
        const bool den_ok = s.den.is_exact_zero() ? c.denominator.may_vanish : c.denominator.admits(s.den.lead_val());
        if (!num_ok || !den_ok) ++unsound;
      }
    }
  }
  return {certified && hits == 0 && unsound == 0,
          "8/8 cases certified for q=2,3: " + std::string(certified ? "yes" : "no") + "; samples=" +
              std::to_string(samples) + " sigma in u+um: " + std::to_string(hits) +
              " interval misses: " + std::to_string(unsound) + "; digests " + digests};
}

Outcome c3_norm_cartan() {
  std::uint64_t checked = 0, bad = 0;
  for (std::uint32_t q : {2u, 3u}) {
    std::mt19937_64 rng(300 + q);
    for (int t = 0; t < 1000; ++t) {
      const Matrix a = oracle::random_sl3(rng, q, 2 + t % 7, 1 + t % 3);
      const CartanVec mu = cartan_projection(a);
      ++checked;
      if (lognorm(a) + lognorm(mat_pow(a, -1)) != mu.mu[0] - mu.mu[2]) ++bad;
      // elementary divisors against brute-force minors
      if (-mu.mu[0] != oracle::min_minor_val(a, 1) || -(mu.mu[0] + mu.mu[1]) != oracle::min_minor_val(a, 2)) ++bad;
    }
  }
  return {bad == 0, std::to_string(checked) + " elements, " + std::to_string(bad) + " mismatches"};
}

Outcome c4_operator_norm() {
  const std::uint32_t q = 2;
  const std::int64_t level = 3;
  // every nonzero vector with coordinates in O/u^3
  std::vector<Vec> grid;
  const std::uint64_t per = 1u << level, total = per * per * per;
  for (std::uint64_t code = 1; code < total; ++code) {
    Vec v;
    for (int c = 0; c < 3; ++c) {
      const std::uint64_t bits = (code >> (level * c)) & (per - 1);
      Laurent x(q);
      for (std::int64_t e = 0; e < level; ++e)
        if (bits >> e & 1) x += Laurent::monomial(q, 1, e);
      v.push_back(x);
    }
    grid.push_back(std::move(v));
  }
  std::mt19937_64 rng(400);
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    Matrix a(q, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) a(i, j) = oracle::random_laurent(rng, q, -3, 3);
    std::int64_t sup = kNegInfinity;
    for (const auto& v : grid) {
      const Vec av = mat_apply(a, v);
      bool zero = true;
      for (const auto& x : av) zero = zero && x.is_exact_zero();
      if (!zero) sup = std::max(sup, lognorm(av) - lognorm(v));
    }
    if (sup != lognorm(a)) ++bad;
  }
  return {bad == 0, "100 matrices over " + std::to_string(grid.size()) + " grid vectors, " + std::to_string(bad) +
                        " mismatches"};
}

Outcome c5_spectral() {
  const std::uint32_t q = 2;
  std::mt19937_64 rng(500);
  int found = 0, bad_root = 0, bad_prod = 0, bad_equiv = 0, bad_synth = 0;
  for (int it = 0; it < 100000 && found < 100; ++it) {
    const Matrix h = oracle::random_sl3(rng, q, 6, 2);
    if (!regularity_test(h)) continue;
    ++found;
    const EigenSystem sys = eigen_flags(h);
    const Poly f = char_poly(h);
    Laurent prod = Laurent::one(q);
    for (std::size_t i = 0; i < 3; ++i) {
      const Laurent& lam = sys.eigenvalues[i];
      prod *= lam;
      std::int64_t gaps = 0;
      for (std::size_t j = 0; j < 3; ++j)
        if (j != i) gaps += std::min(lam.valuation().value, sys.eigenvalues[j].valuation().value);
      if (f(lam).val_lower_bound() < lam.valuation().value + sys.precision + gaps) ++bad_root;
    }
    if (prod.known_to() < 8 || equal_mod(prod, Laurent::one(q), prod.known_to()) != Tri::True) ++bad_prod;
    // eigenflags of k h k^-1 are k applied to those of h
    const Matrix k = oracle::random_sl3(rng, q, 2, 1);
    const EigenSystem conj = eigen_flags(mat_mul(mat_mul(k, h), mat_pow(k, -1)));
    for (std::size_t i = 0; i < 3; ++i)
      if (!same_point(conj.eigenvectors[i], mat_apply(k, sys.eigenvectors[i].coords), 8)) {
        ++bad_equiv;
        break;
      }
    // synthetic oracle: known eigenbasis k P
    const Matrix p = synthetic_basis(q);
    const std::int64_t e = 1 + found % 3;
    const Matrix kp = mat_mul(k, p);
    const Matrix hs = mat_mul(mat_mul(kp, Matrix::diagonal_monomials(q, {-e, 0, e})), mat_inv(kp));
    const EigenSystem ss = eigen_flags(hs);
    for (std::size_t i = 0; i < 3; ++i)
      if (!same_point(ss.eigenvectors[i], kp.column(i), 8)) {
        ++bad_synth;
        break;
      }
  }
  const bool ok = found == 100 && bad_root + bad_prod + bad_equiv + bad_synth == 0;
  return {ok, std::to_string(found) + " regular elements; root failures " + std::to_string(bad_root) +
                  ", product failures " + std::to_string(bad_prod) + ", equivariance failures " +
                  std::to_string(bad_equiv) + ", synthetic-oracle failures " + std::to_string(bad_synth)};
}

Outcome c6_balls() {
  const std::uint32_t q = 2;
  bool ok = true;
  std::string counts;
  for (std::int64_t level = 1; level <= 3; ++level) {
    const auto balls = enumerate_balls(q, level);
    counts += (counts.empty() ? "" : ",") + std::to_string(balls.size());
    std::map<std::string, std::uint64_t> hits;
    for (const auto& b : balls) hits[to_string(b)] = 0;
    // every primitive vector over O/u^level lands in exactly one enumerated ball
    const std::uint64_t per = 1u << level, total = per * per * per;
    std::uint64_t primitive = 0;
    for (std::uint64_t code = 1; code < total; ++code) {
      Vec v;
      bool unit = false;
      for (int c = 0; c < 3; ++c) {
        const std::uint64_t bits = (code >> (level * c)) & (per - 1);
        unit = unit || (bits & 1);
        Laurent x(q);
        for (std::int64_t e = 0; e < level; ++e)
          if (bits >> e & 1) x += Laurent::monomial(q, 1, e);
        v.push_back(x);
      }
      if (!unit) continue;
      ++primitive;
      auto it = hits.find(to_string(ball_of(v, level)));
      if (it == hits.end()) ok = false;
      else ++it->second;
    }
    // each ball has exactly as many primitive representatives as there are units mod u^level
    const std::uint64_t units = per - per / 2;
    for (const auto& [name, n] : hits) ok = ok && n == units;
    ok = ok && hits.size() == balls.size() && primitive == balls.size() * units;
  }
  ok = ok && counts == "7,28,112";

  std::mt19937_64 rng(600);
  std::vector<Matrix> gs;
  if (main_q2) gs.push_back(main_q2->g);
  for (int i = 0; i < 3; ++i) gs.push_back(oracle::random_sl3(rng, q, 4, 1));
  std::uint64_t pairs = 0, samples = 0, escapes = 0;
  for (const auto& g : gs) {
    for (int j = 0; j < 5; ++j) {
      const std::int64_t level = 6;
      const ResidueBall b = ball_at(q, level, rng() % ball_count(q, level));
      const ImageBall img = image_ball(g, b);
      if (img.guaranteed_level <= 0) continue;
      ++pairs;
      const ResidueBall target = ball_of(img.center.coords, img.guaranteed_level);
      for (int k = 0; k < 1000; ++k, ++samples)
        if (!(ball_of(mat_apply(g, sample_in_ball(rng, b, 10)), img.guaranteed_level) == target)) ++escapes;
    }
  }
  ok = ok && pairs > 0 && escapes == 0;
  return {ok, "ball counts " + counts + "; " + std::to_string(pairs) + " (g, ball) pairs, " + std::to_string(samples) +
                  " samples, " + std::to_string(escapes) + " escapes"};
}

Outcome c7_word_bound() {
  if (!main_q2) return {false, "criterion 1 produced no certificate"};
  const Certificate& c = *main_q2;
  const DiagPair pair = pair_of(c);
  const WordSurvey ws = word_survey(pair, c.g, 8, c.constants, true);
  const Matrix G = mat_pow(c.g, c.constants.R_prime);
  std::uint64_t below = 0, recomputed = 0, mismatched = 0;
  for (std::size_t i = 0; i < ws.rows.size(); ++i) {
    const WordRow& row = ws.rows[i];
    if (row.identity || Rational(row.log_norm_product) < c.constants.alpha * Rational(row.length) - c.constants.c_total)
      ++below;
    if (i % 97 != 0) continue;
    // rebuild the word from its syllables
    Matrix w = Matrix::identity(c.q, 3);
    for (const auto& s : row.word.syllables) {
      if (const auto* d = std::get_if<DeltaSyllable>(&s)) w = mat_mul(w, pair.element(d->m, d->n));
      else w = mat_mul(w, mat_pow(G, std::get<GSyllable>(s).r));
    }
    ++recomputed;
    if (lognorm(w) + lognorm(mat_pow(w, -1)) != row.log_norm_product || w.identical(Matrix::identity(c.q, 3)))
      ++mismatched;
  }
  return {below == 0 && mismatched == 0 && ws.words == c.words_checked,
          std::to_string(ws.words) + " reduced words, alpha=" + to_string(c.constants.alpha) +
              " c_total=" + to_string(c.constants.c_total) + ", violations " + std::to_string(below) +
              ", min margin " + to_string(ws.min_margin) + ", independently rebuilt " + std::to_string(recomputed) +
              " (" + std::to_string(mismatched) + " mismatches)"};
}

Outcome c8_lattice() {
  PipelineArgs a = synthetic_args(2, 10);
  a.strategy = Strategy::Lattice;
  a.seed = 1;
  a.search_budget = 100000;
  const Certificate c = construct_pipeline(a);
  bool polynomial = det(c.h).is_exact_one();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      polynomial = polynomial && c.h(i, j).exact() && (!c.h(i, j).has_digits() || c.h(i, j).digit_end() <= 1);
  return {c.passed() && polynomial && c.search_trials <= a.search_budget,
          "seed 1, trials " + std::to_string(c.search_trials) + ", h in SL3(F_q[t]): " + (polynomial ? "yes" : "no") +
              "; " + summary(c)};
}

Outcome c9_negative() {
  if (!main_q2) return {false, "criterion 1 produced no certificate"};
  Certificate t = *main_q2;
  t.g = Matrix::identity(2, 3);
  const VerifyReport r = verify_certificate(t);
  bool raised = false;
  std::string what;
  try {
    sigma_exclusion(DiagPair::from_diagonals(Matrix::diagonal_monomials(2, {1, 0, -1}), make_generators(2, 1, 1).b));
  } catch (const ExclusionFailed& e) {
    raised = true;
    what = e.what();
  }
  return {!r.ok && r.pingpong.violation_count > 0 && raised,
          "tampered g=I: " + std::string(r.ok ? "accepted" : "rejected") + " (" +
              std::to_string(r.pingpong.violation_count) + " ping-pong violations, " +
              std::to_string(r.failures.size()) + " failures); diag(u,1,u^-1): " +
              (raised ? "ExclusionFailed " + what : "no exception")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"end-to-end construction q=2 M=10 and q=3 M=6", c1_end_to_end},
      {"symbolic sigma exclusion with Monte-Carlo cross-check", c2_sigma},
      {"norm-Cartan identity", c3_norm_cartan},
      {"operator-norm oracle", c4_operator_norm},
      {"spectral correctness", c5_spectral},
      {"ball partition and image-ball soundness", c6_balls},
      {"word growth bound L=8", c7_word_bound},
      {"lattice realization", c8_lattice},
      {"negative controls", c9_negative},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("Criterion %zu: %s  %s [%.1fs]\n  %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed;
}
