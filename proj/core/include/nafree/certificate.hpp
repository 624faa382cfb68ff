#pragma once

// Pipeline orchestration and self-contained certificates. Certificates are
// JSON documents whose numeric content is stored as exact strings.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nafree/pingpong.hpp"

namespace nafree {

inline constexpr const char* kCertificateVersion = "nafree-certificate/1";

/// A pipeline stage failed; what() carries "[stage] message".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& message, bool verification_failure)
      : Error("[" + stage + "] " + message), stage_(std::move(stage)), verification_(verification_failure) {}
  const std::string& stage() const noexcept { return stage_; }
  /// True when the stage ran and refuted something (as opposed to bad input).
  bool verification_failure() const noexcept { return verification_; }

 private:
  std::string stage_;
  bool verification_;
};

struct PipelineArgs {
  std::uint32_t q = 2;
  std::int64_t s = 1, s_prime = 1;
  Strategy strategy = Strategy::Synthetic;
  std::optional<std::uint64_t> seed;
  std::int64_t level = 10;
  std::int64_t gamma_bound = 3;
  std::int64_t word_bound = 8;
  std::uint64_t search_budget = 100000;
  unsigned threads = 0;

  void validate() const;
};

struct Certificate {
  std::string version = kCertificateVersion;
  std::uint32_t q = 2;
  std::int64_t s = 1, s_prime = 1;
  Matrix a{2, 3}, b{2, 3};
  std::int64_t power_applied = 1;
  Strategy strategy = Strategy::Synthetic;
  std::optional<std::uint64_t> seed;
  std::uint64_t search_trials = 0;
  Matrix h{2, 3};
  std::int64_t n0 = 1;
  std::string n0_method;
  Matrix g{2, 3};
  Constants constants;
  std::int64_t level = 0, gamma_bound = 0, word_bound = 0;
  std::string sigma_digest;
  // Results recorded at construction time.
  std::uint64_t balls_checked = 0;
  std::uint64_t pingpong_violations = 0;
  std::uint64_t words_checked = 0;
  std::uint64_t word_violations = 0;
  Rational min_growth_margin{0};
  bool irreducible = false;

  bool passed() const { return pingpong_violations == 0 && word_violations == 0 && min_growth_margin >= 0 && irreducible; }
};

using Progress = std::function<void(const std::string&)>;

/// generators, sigma exclusion, regular element, contraction power, constants,
/// ping-pong, word survey, irreducibility. Throws StageError.
Certificate construct_pipeline(const PipelineArgs& args, const Progress& progress = {});

std::string to_json_text(const Certificate& cert);
Certificate parse_certificate(const std::string& text);
Certificate read_certificate(const std::string& path);
void write_certificate(const Certificate& cert, const std::string& path);

struct VerifyOverrides {
  std::optional<std::int64_t> level, gamma_bound, word_bound;
  unsigned threads = 0;
};

struct VerifyReport {
  bool ok = false;
  std::vector<std::string> failures;
  PingPongReport pingpong;
  std::uint64_t words_checked = 0;
  std::uint64_t word_violations = 0;
};

/// Re-runs every check from the stored objects. Overrides may only raise the
/// stored level and bounds (InvalidArgument otherwise).
VerifyReport verify_certificate(const Certificate& cert, const VerifyOverrides& overrides = {},
                                const Progress& progress = {});

DiagPair pair_of(const Certificate& cert);
std::string to_string(const Rational& r);
Rational parse_rational(const std::string& s);

}  // namespace nafree
