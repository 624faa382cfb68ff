// nafree: construct, verify and inspect ping-pong certificates.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

#include <iostream>
#include <sstream>

#include <CLI/CLI.hpp>
#include "nafree/certificate.hpp"

using namespace nafree;

namespace {

constexpr int kOk = 0, kFailed = 1, kUsage = 2;

std::pair<std::int64_t, std::int64_t> parse_profile(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InvalidArgument("profile must look like 's,s''");
  try {
    return {std::stoll(s.substr(0, comma)), std::stoll(s.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw InvalidArgument("profile entries must be integers");
  }
}

void log_line(const std::string& s) { std::cerr << s << "\n"; }

int run_construct(const PipelineArgs& args, const std::string& out, bool quiet) {
  Certificate cert;
  try {
    cert = construct_pipeline(args, quiet ? Progress{} : Progress{log_line});
  } catch (const StageError& e) {
    std::cerr << "construct failed: " << e.what() << "\n";
    return e.verification_failure() ? kFailed : kUsage;
  }
  const std::string text = to_json_text(cert);
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_certificate(cert, out);
  if (!cert.passed()) {
    std::cerr << "certificate written, but verification did not pass\n";
    return kFailed;
  }
  return kOk;
}

int run_verify(const std::string& path, const VerifyOverrides& ov, bool quiet) {
  const Certificate cert = read_certificate(path);
  const VerifyReport r = verify_certificate(cert, ov, quiet ? Progress{} : Progress{log_line});
  for (const auto& f : r.failures) std::cout << "FAIL " << f << "\n";
  for (const auto& v : r.pingpong.violations) std::cout << "  violation: " << v << "\n";
  if (r.pingpong.violation_count > r.pingpong.violations.size())
    std::cout << "  ... " << r.pingpong.violation_count - r.pingpong.violations.size() << " more\n";
  std::cout << (r.ok ? "certificate verified" : "certificate rejected") << "\n";
  return r.ok ? kOk : kFailed;
}

int run_words(const std::string& path, std::optional<std::int64_t> bound) {
  const Certificate cert = read_certificate(path);
  const std::int64_t L = bound.value_or(cert.word_bound);
  const WordSurvey ws = word_survey(pair_of(cert), cert.g, L, cert.constants, true);
  std::cout << "word\tlength\tlog_norm_product\tmu\tmargin\tidentity\tmu_ok\n";
  for (const auto& row : ws.rows) {
    std::cout << row.word.str() << "\t" << row.length << "\t" << row.log_norm_product << "\t";
    for (std::size_t i = 0; i < row.mu.size(); ++i) std::cout << (i ? "," : "") << row.mu[i];
    std::cout << "\t" << to_string(row.margin) << "\t" << (row.identity ? "yes" : "no") << "\t"
              << (row.mu_ok ? "yes" : "no") << "\n";
  }
  std::cerr << ws.words << " words, " << ws.violations << " violation(s), min margin " << to_string(ws.min_margin)
            << "\n";
  return ws.violations == 0 && ws.min_margin >= 0 ? kOk : kFailed;
}

int run_inspect(const std::string& path) {
  const Certificate cert = read_certificate(path);
  const DiagPair pair = pair_of(cert);
  std::cout << "q = " << cert.q << ", profile (" << cert.s << "," << cert.s_prime << "), power " << cert.power_applied
            << "\n";
  std::cout << "a = " << to_string(cert.a) << "\nb = " << to_string(cert.b) << "\n";
  std::cout << "h = " << to_string(cert.h) << "\n";
  const NewtonPolygon np = newton_polygon(char_poly(cert.h));
  std::cout << "Newton polygon of char(h): vertices";
  for (auto [x, y] : np.vertices) std::cout << " (" << x << "," << y << ")";
  std::cout << "; root valuations";
  for (const auto& r : np.root_valuations()) std::cout << " " << to_string(r);
  std::cout << "\n";
  try {
    const EigenSystem sys = eigen_flags(cert.h);
    std::cout << "attracting point " << to_string(sys.attracting.point) << "\n";
    std::cout << "attracting line  " << to_string(sys.attracting.line) << "\n";
    std::cout << "repelling point  " << to_string(sys.repelling.point) << "\n";
    std::cout << "repelling line   " << to_string(sys.repelling.line) << "\n";
  } catch (const Error& e) {
    std::cout << "flags unavailable: " << e.what() << "\n";
  }
  const Constants& k = cert.constants;
  std::cout << "N0 = " << cert.n0 << " (" << cert.n0_method << "), R' = " << k.R_prime << "\n";
  std::cout << "theta = q^-" << k.theta << ", theta' = q^-" << k.theta_prime << ", epsilon = q^-"
            << k.epsilon_exponent << "\n";
  std::cout << "alpha1 = " << to_string(k.alpha1) << ", alpha2 = " << to_string(k.alpha2) << ", alpha = "
            << to_string(k.alpha) << ", c = " << to_string(k.c) << ", c_total = " << to_string(k.c_total) << "\n";
  const SigmaProof proof = sigma_cases(pair);
  std::cout << "sigma trace (digest " << proof.digest << "):\n" << proof.trace;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ping-pong certificates for free products in SL_3(F_q((1/t)))"};
  app.require_subcommand(1);
  bool quiet = false;
  unsigned threads = 0;
  app.add_flag("--quiet", quiet, "suppress progress output");
  app.add_option("--threads", threads, "worker threads (0: all cores)");

  PipelineArgs args;
  std::string profile = "1,1", strategy = "synthetic", out;
  std::uint64_t seed = 0;
  auto* construct = app.add_subcommand("construct", "run the pipeline and write a certificate");
  construct->add_option("--q", args.q, "residue field size (prime)")->required();
  construct->add_option("--profile", profile, "valuation profile s,s'");
  construct->add_option("--strategy", strategy, "synthetic | lattice");
  auto* seed_opt = construct->add_option("--seed", seed, "search seed (required for lattice)");
  construct->add_option("--level", args.level, "ball level M");
  construct->add_option("--gamma-bound", args.gamma_bound, "bound B on |m|, |n| and on powers of g");
  construct->add_option("--word-bound", args.word_bound, "word length bound L");
  construct->add_option("--budget", args.search_budget, "lattice search budget");
  construct->add_option("--out,-o", out, "certificate path (default stdout)");

  std::string path;
  std::optional<std::int64_t> level, gamma_bound, word_bound;
  auto* verify = app.add_subcommand("verify", "re-verify a certificate");
  verify->add_option("certificate", path)->required();
  verify->add_option("--level", level, "raise the ball level");
  verify->add_option("--gamma-bound", gamma_bound, "raise the gamma bound");
  verify->add_option("--word-bound", word_bound, "raise the word bound");

  auto* words = app.add_subcommand("words", "dump the word-survey table");
  words->add_option("certificate", path)->required();
  words->add_option("--word-bound", word_bound, "word length bound");

  auto* inspect = app.add_subcommand("inspect", "print Newton polygon, flags, constants and the sigma trace");
  inspect->add_option("certificate", path)->required();

  for (auto* sub : {construct, verify, words, inspect}) sub->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*construct) {
      auto [s, sp] = parse_profile(profile);
      args.s = s;
      args.s_prime = sp;
      args.strategy = parse_strategy(strategy);
      if (*seed_opt) args.seed = seed;
      args.threads = threads;
      return run_construct(args, out, quiet);
    }
    if (*verify) {
      VerifyOverrides ov{level, gamma_bound, word_bound, threads};
      return run_verify(path, ov, quiet);
    }
    if (*words) return run_words(path, word_bound);
    if (*inspect) return run_inspect(path);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
