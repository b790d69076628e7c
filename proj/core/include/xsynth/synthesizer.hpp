#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xsynth/oracle.hpp"
#include "xsynth/search.hpp"
#include "xsynth/verify.hpp"

namespace xsynth {

struct SynthesisConfig {
  SearchConfig search;
  unsigned max_outer = 5;
  /// Wall-clock budget in seconds; 0 disables it.
  double time_budget = 0;
  /// Consecutive outer iterations without norm improvement before stopping.
  unsigned stall_limit = 2;
  bool abduction = true;
  OpcodeSet dsl = OpcodeSet::full();
  SuitePolicy suite = SuitePolicy::synthesis_defaults();
  VerifyConfig verify;
  /// Capacity of the pool of precise but unsound bodies fed to abduction.
  unsigned pool_cap = 15;
  /// Directory for cached test suites; empty disables caching.
  std::string cache_dir;
};

struct Member {
  NamedTransformer named;
  unsigned iteration = 0;
  std::vector<unsigned> exhaustive_widths;
  std::vector<unsigned> sampled_widths;
};

struct IterationLog {
  unsigned iteration = 0;
  uint64_t seed = 0;
  unsigned plain_chains = 0;
  unsigned abduction_chains = 0;
  unsigned skipped_chains = 0;
  uint64_t proposals = 0;
  uint64_t accepted = 0;
  uint64_t rechecks = 0;
  uint64_t recheck_mismatches = 0;
  /// Distinct sound-on-suite candidates sent to the verifier.
  unsigned candidates = 0;
  unsigned verified = 0;
  unsigned rejected = 0;
  /// Verified candidates that would not lower the norm of the meet.
  unsigned subsumed = 0;
  unsigned admitted = 0;
  unsigned pool_size = 0;
  unsigned imprecise_cases = 0;
  uint64_t norm_before = 0;
  uint64_t norm_after = 0;
  std::map<std::string, double> weights;
  double seconds = 0;
};

struct SynthesisReport {
  OpId op = OpId::And;
  Domain domain = Domain::KnownBits;
  SynthesisConfig config;
  std::size_t suite_cases = 0;
  uint64_t top_norm = 0;
  uint64_t best_norm = 0;
  uint64_t final_norm = 0;
  std::size_t exact_cases = 0;
  std::vector<IterationLog> iterations;
  std::string stop_reason;
  unsigned removed_redundant = 0;
  std::vector<Member> members;
  double total_seconds = 0;
};

struct SynthesisResult {
  /// Never empty: holds the top transformer when nothing better was found.
  std::vector<Member> members;
  SynthesisReport report;

  std::vector<Transformer> transformers() const;
  std::vector<NamedTransformer> named() const;
};

/// Meet-decomposed synthesis: rounds of MCMC chains whose verified results
/// accumulate into a set whose pointwise meet is the final transformer.
SynthesisResult synthesize(OpId op, Domain domain, const SynthesisConfig &cfg);

/// Greedily drops members, in order, whose removal leaves the norm of the
/// meet on `suite` unchanged. Returns the number removed.
unsigned remove_redundant(std::vector<Member> &members, const TestSuite &suite);

/// True when no member can be dropped without raising the norm on `suite`.
bool is_non_redundant(std::span<const Transformer> set, const TestSuite &suite);

/// Builds the suite for a run, reading and writing the cache when enabled.
TestSuite load_or_gen_suite(OpId op, Domain domain, const SuitePolicy &policy, uint64_t seed,
                            const std::string &cache_dir);

/// Deterministic JSON document; wall-clock figures live only under "timing".
std::string report_json(const SynthesisReport &report);

} // namespace xsynth
