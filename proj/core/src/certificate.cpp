#include "nafree/certificate.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nafree {

using nlohmann::json;

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& s) {
  try {
    std::size_t pos = 0;
    const std::int64_t num = std::stoll(s, &pos);
    if (pos == s.size()) return Rational(num);
    if (s[pos] != '/') throw ParseError("bad rational '" + s + "'", pos);
    std::size_t pos2 = 0;
    const std::string rest = s.substr(pos + 1);
    const std::int64_t den = std::stoll(rest, &pos2);
    if (pos2 != rest.size() || den == 0) throw ParseError("bad rational '" + s + "'", pos + 1 + pos2);
    return Rational(num, den);
  } catch (const std::logic_error&) {
    throw ParseError("bad rational '" + s + "'", 0);
  }
}

void PipelineArgs::validate() const {
  FieldParams{q, 32}.validate();
  if (s < 1 || s_prime < 1) throw InvalidArgument("profile entries must be >= 1");
  if (level < 3) throw InvalidArgument("level must be >= 3");
  if (gamma_bound < 1) throw InvalidArgument("gamma bound must be >= 1");
  if (word_bound < 1) throw InvalidArgument("word bound must be >= 1");
  if (strategy == Strategy::Lattice && !seed) throw InvalidArgument("the lattice strategy needs --seed");
}

DiagPair pair_of(const Certificate& cert) {
  DiagPair p = DiagPair::from_diagonals(cert.a, cert.b);
  p.power_applied = cert.power_applied;
  p.s = cert.s;
  p.s_prime = cert.s_prime;
  return p;
}

namespace {

template <typename F>
auto stage(const char* name, bool verification, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const ExclusionFailed& e) {
    throw StageError(name, e.what(), true);
  } catch (const SearchExhausted& e) {
    throw StageError(name, e.what(), true);
  } catch (const InvalidArgument& e) {
    throw StageError(name, e.what(), false);
  } catch (const Error& e) {
    throw StageError(name, e.what(), verification);
  }
}

void say(const Progress& p, const std::string& s) {
  if (p) p(s);
}

}  // namespace

Certificate construct_pipeline(const PipelineArgs& args, const Progress& progress) {
  stage("args", false, [&] {
    args.validate();
    return 0;
  });
  Certificate cert;
  cert.q = args.q;
  cert.s = args.s;
  cert.s_prime = args.s_prime;
  cert.strategy = args.strategy;
  cert.seed = args.seed;
  cert.level = args.level;
  cert.gamma_bound = args.gamma_bound;
  cert.word_bound = args.word_bound;

  const DiagPair pair = stage("generators", false, [&] { return make_generators(args.q, args.s, args.s_prime); });
  cert.a = pair.a;
  cert.b = pair.b;
  cert.power_applied = pair.power_applied;

  const SigmaProof proof = stage("sigma", true, [&] { return sigma_exclusion(pair); });
  cert.sigma_digest = proof.digest;
  say(progress, "sigma exclusion: 8 cases certified, digest " + proof.digest);

  const SearchResult found = stage("regular", true, [&] {
    SearchOptions opts;
    opts.budget = args.search_budget;
    return find_regular_search(args.strategy, args.seed.value_or(0), pair, opts);
  });
  cert.h = found.h;
  cert.search_trials = found.trials;
  say(progress, "regular element found after " + std::to_string(found.trials) + " trial(s)");

  const ContractionResult n0 = stage("contraction", true, [&] { return contraction_analysis(found.h, pair); });
  cert.n0 = n0.n0;
  cert.n0_method = n0.method;
  cert.g = mat_pow(found.h, n0.n0);
  say(progress, "N0 = " + std::to_string(n0.n0) + " (" + n0.method + ")");

  cert.constants = stage("constants", true, [&] { return qi_constants(pair, cert.g, n0.n0); });
  say(progress, "epsilon exponent " + std::to_string(cert.constants.epsilon_exponent) + ", alpha " +
                    to_string(cert.constants.alpha) + ", R' " + std::to_string(cert.constants.R_prime));

  const PingPongReport pp = stage("pingpong", true, [&] {
    PingPongOptions opts;
    opts.threads = args.threads;
    opts.anchor_source = cert.h;
    return verify_pingpong(pair, cert.g, args.level, args.gamma_bound, cert.constants, opts);
  });
  cert.balls_checked = pp.balls_checked;
  cert.pingpong_violations = pp.violation_count;
  say(progress, "ping-pong: " + std::to_string(pp.balls_checked) + " balls, " + std::to_string(pp.violation_count) +
                    " violation(s)");

  const WordSurvey ws = stage("words", true, [&] { return word_survey(pair, cert.g, args.word_bound, cert.constants, false); });
  cert.words_checked = ws.words;
  cert.word_violations = ws.violations;
  cert.min_growth_margin = ws.min_margin;
  say(progress, "words: " + std::to_string(ws.words) + " checked, " + std::to_string(ws.violations) +
                    " violation(s), min margin " + to_string(ws.min_margin));

  cert.irreducible = stage("irreducibility", true, [&] { return irreducibility_witness(pair, cert.g); });
  return cert;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json constants_json(const Constants& k) {
  return json{{"theta", std::to_string(k.theta)},
              {"theta_prime", std::to_string(k.theta_prime)},
              {"epsilon", std::to_string(k.epsilon_exponent)},
              {"alpha1", to_string(k.alpha1)},
              {"alpha2", to_string(k.alpha2)},
              {"alpha", to_string(k.alpha)},
              {"c", to_string(k.c)},
              {"c_total", to_string(k.c_total)},
              {"N0", std::to_string(k.N0)},
              {"R_prime", std::to_string(k.R_prime)},
              {"gap", std::to_string(k.gap)}};
}

std::int64_t int_field(const json& j, const char* key) {
  const std::string s = j.at(key).get<std::string>();
  std::size_t pos = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::logic_error&) {
    throw ParseError(std::string("field '") + key + "' is not an integer", 0);
  }
  if (pos != s.size()) throw ParseError(std::string("field '") + key + "' is not an integer", pos);
  return v;
}

std::uint64_t uint_field(const json& j, const char* key) {
  const std::int64_t v = int_field(j, key);
  if (v < 0) throw ParseError(std::string("field '") + key + "' is negative", 0);
  return static_cast<std::uint64_t>(v);
}

Constants constants_from(const json& j) {
  Constants k;
  k.theta = int_field(j, "theta");
  k.theta_prime = int_field(j, "theta_prime");
  k.epsilon_exponent = int_field(j, "epsilon");
  k.alpha1 = parse_rational(j.at("alpha1").get<std::string>());
  k.alpha2 = parse_rational(j.at("alpha2").get<std::string>());
  k.alpha = parse_rational(j.at("alpha").get<std::string>());
  k.c = parse_rational(j.at("c").get<std::string>());
  k.c_total = parse_rational(j.at("c_total").get<std::string>());
  k.N0 = int_field(j, "N0");
  k.R_prime = int_field(j, "R_prime");
  k.gap = int_field(j, "gap");
  return k;
}

}  // namespace

std::string to_json_text(const Certificate& c) {
  json j;
  j["version"] = c.version;
  j["field"] = {{"q", std::to_string(c.q)}};
  j["generators"] = {{"a", to_string(c.a)},
                     {"b", to_string(c.b)},
                     {"profile", std::to_string(c.s) + "," + std::to_string(c.s_prime)},
                     {"power_applied", std::to_string(c.power_applied)}};
  j["search"] = {{"strategy", to_string(c.strategy)},
                 {"seed", c.seed ? json(std::to_string(*c.seed)) : json(nullptr)},
                 {"trials", std::to_string(c.search_trials)}};
  j["h"] = to_string(c.h);
  j["N0"] = std::to_string(c.n0);
  j["N0_method"] = c.n0_method;
  j["g"] = to_string(c.g);
  j["constants"] = constants_json(c.constants);
  j["verification"] = {{"level", std::to_string(c.level)},
                       {"gamma_bound", std::to_string(c.gamma_bound)},
                       {"word_bound", std::to_string(c.word_bound)}};
  j["sigma_digest"] = c.sigma_digest;
  j["results"] = {{"balls_checked", std::to_string(c.balls_checked)},
                  {"pingpong_violations", std::to_string(c.pingpong_violations)},
                  {"words_checked", std::to_string(c.words_checked)},
                  {"word_violations", std::to_string(c.word_violations)},
                  {"min_growth_margin", to_string(c.min_growth_margin)},
                  {"irreducible", c.irreducible ? "true" : "false"}};
  return j.dump(2) + "\n";
}

Certificate parse_certificate(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("certificate is not valid JSON: ") + e.what(), e.byte);
  }
  try {
    Certificate c;
    c.version = j.at("version").get<std::string>();
    if (c.version != kCertificateVersion) throw ParseError("unsupported certificate version '" + c.version + "'", 0);
    c.q = static_cast<std::uint32_t>(uint_field(j.at("field"), "q"));
    FieldParams{c.q, 32}.validate();
    const json& gen = j.at("generators");
    c.a = parse_matrix(gen.at("a").get<std::string>(), c.q);
    c.b = parse_matrix(gen.at("b").get<std::string>(), c.q);
    const std::string profile = gen.at("profile").get<std::string>();
    const auto comma = profile.find(',');
    if (comma == std::string::npos) throw ParseError("profile must be 's,s''", 0);
    c.s = std::stoll(profile.substr(0, comma));
    c.s_prime = std::stoll(profile.substr(comma + 1));
    c.power_applied = int_field(gen, "power_applied");
    const json& search = j.at("search");
    c.strategy = parse_strategy(search.at("strategy").get<std::string>());
    if (!search.at("seed").is_null()) c.seed = uint_field(search, "seed");
    c.search_trials = uint_field(search, "trials");
    c.h = parse_matrix(j.at("h").get<std::string>(), c.q);
    c.n0 = int_field(j, "N0");
    c.n0_method = j.at("N0_method").get<std::string>();
    c.g = parse_matrix(j.at("g").get<std::string>(), c.q);
    c.constants = constants_from(j.at("constants"));
    const json& ver = j.at("verification");
    c.level = int_field(ver, "level");
    c.gamma_bound = int_field(ver, "gamma_bound");
    c.word_bound = int_field(ver, "word_bound");
    c.sigma_digest = j.at("sigma_digest").get<std::string>();
    const json& res = j.at("results");
    c.balls_checked = uint_field(res, "balls_checked");
    c.pingpong_violations = uint_field(res, "pingpong_violations");
    c.words_checked = uint_field(res, "words_checked");
    c.word_violations = uint_field(res, "word_violations");
    c.min_growth_margin = parse_rational(res.at("min_growth_margin").get<std::string>());
    c.irreducible = res.at("irreducible").get<std::string>() == "true";
    for (const Matrix* m : {&c.a, &c.b, &c.h, &c.g})
      if (m->dim() != 3 || !m->exact()) throw ParseError("certificate matrices must be exact 3x3", 0);
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what(), 0);
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what(), 0);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what(), 0);
  }
}

Certificate read_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_certificate(ss.str());
}

void write_certificate(const Certificate& cert, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << to_json_text(cert);
}

// ---------------------------------------------------------------------------
// Verification

VerifyReport verify_certificate(const Certificate& cert, const VerifyOverrides& overrides, const Progress& progress) {
  auto raised = [](std::optional<std::int64_t> o, std::int64_t stored, const char* what) {
    if (!o) return stored;
    if (*o < stored) throw InvalidArgument(std::string("override may not lower the stored ") + what);
    return *o;
  };
  const std::int64_t level = raised(overrides.level, cert.level, "level");
  const std::int64_t bound = raised(overrides.gamma_bound, cert.gamma_bound, "gamma bound");
  const std::int64_t words = raised(overrides.word_bound, cert.word_bound, "word bound");

  VerifyReport r;
  auto fail = [&](const std::string& s) { r.failures.push_back(s); };
  const DiagPair pair = pair_of(cert);
  if (!pair.pattern_holds()) fail("generators: valuation pattern does not hold");
  if (!det(pair.a).is_exact_one() || !det(pair.b).is_exact_one()) fail("generators: det != 1");

  try {
    const SigmaProof proof = sigma_exclusion(pair);
    if (proof.digest != cert.sigma_digest) fail("sigma: trace digest " + proof.digest + " differs from stored " + cert.sigma_digest);
    say(progress, "sigma exclusion certified");
  } catch (const ExclusionFailed& e) {
    fail(std::string("sigma: ") + e.what());
  }

  if (!det(cert.h).is_exact_one()) fail("h: det != 1");
  if (!regularity_test(cert.h)) fail("h: not regular");
  try {
    const EigenSystem sys = eigen_flags(cert.h);
    if (in_W(sys.attracting) != Tri::True || in_W(sys.repelling) != Tri::True) fail("h: flags not certified in W");
  } catch (const Error& e) {
    fail(std::string("h: ") + e.what());
  }
  if (cert.n0 < 1) fail("N0 must be >= 1");
  if (!mat_pow(cert.h, cert.n0).identical(cert.g)) fail("g != h^N0");

  // Constants are re-derived from the stored g when possible; the stored ones drive the checks.
  try {
    const Constants k = qi_constants(pair, cert.g, cert.n0);
    const Constants& s = cert.constants;
    if (k.theta != s.theta || k.theta_prime != s.theta_prime || k.epsilon_exponent != s.epsilon_exponent ||
        k.alpha != s.alpha || k.c_total != s.c_total || k.R_prime != s.R_prime)
      fail("constants: stored values differ from recomputed ones");
  } catch (const Error& e) {
    fail(std::string("constants: ") + e.what());
  }
  if (cert.constants.R_prime < 1) {
    fail("constants: R' must be >= 1");
    return r;
  }

  PingPongOptions opts;
  opts.threads = overrides.threads;
  opts.anchor_source = cert.h;
  r.pingpong = verify_pingpong(pair, cert.g, level, bound, cert.constants, opts);
  if (r.pingpong.violation_count > 0)
    fail("pingpong: " + std::to_string(r.pingpong.violation_count) + " violation(s) at level " + std::to_string(level));
  say(progress, "ping-pong: " + std::to_string(r.pingpong.balls_checked) + " balls, " +
                    std::to_string(r.pingpong.violation_count) + " violation(s)");

  try {
    const WordSurvey ws = word_survey(pair, cert.g, words, cert.constants, false);
    r.words_checked = ws.words;
    r.word_violations = ws.violations;
    r.pingpong.word_bound = words;
    r.pingpong.min_growth_margin = ws.min_margin;
    if (ws.violations > 0 || ws.min_margin < 0)
      fail("words: " + std::to_string(ws.violations) + " violation(s), min margin " + to_string(ws.min_margin));
    say(progress, "words: " + std::to_string(ws.words) + " checked");
  } catch (const Error& e) {
    fail(std::string("words: ") + e.what());
  }

  if (!irreducibility_witness(pair, cert.g)) fail("irreducibility: g fixes a coordinate point or plane");
  r.ok = r.failures.empty();
  return r;
}

}  // namespace nafree
