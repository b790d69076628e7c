#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "xsynth/batch_eval.hpp"
#include "xsynth/dsl.hpp"
#include "xsynth/oracle.hpp"

namespace xsynth {

struct SearchConfig {
  unsigned n_step = 1000;
  double temperature = 0.5;
  double lambda_function = 1.0;
  double kappa_function = 3.0;
  double lambda_condition = 3.0;
  double kappa_condition = 1.0;
  unsigned chains = 100;
  double abduction_fraction = 0.30;
  uint64_t seed = 0;
  unsigned function_length = kTransformerLength;
  unsigned condition_length = kConditionLength;
  unsigned top_k = 3;
  /// Worker threads for a round; 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// Fraction of steps whose cached score is recomputed from scratch.
  double recheck_fraction = 0.01;

  bool valid() const;
};

enum class CandidateKind : uint8_t { Plain, Abduction };

struct Candidate {
  Transformer transformer;
  double soundness = 0;
  double improvement = 0;
  double cost = 0;
};

double cost(double soundness, double improvement, double lambda, double kappa);

/// Metropolis rule: accept when current − proposed > T·log(p), p ~ U(0,1).
bool metropolis_accept(double current_cost, double proposed_cost, double temperature, Rng &rng);

/// Read-only scoring state for one round.
struct ScoringContext {
  const TestSuite *suite = nullptr;
  const SuiteOutputs *g_meet = nullptr;
  const CaseMask *imprecise = nullptr;
  /// norm(g_meet) over the imprecise subset; must be positive.
  uint64_t g_norm = 0;
};

ScoringContext make_context(const TestSuite &suite, const SuiteOutputs &g_meet, const CaseMask &imprecise);

struct Scores {
  double soundness = 0;
  double improvement = 0;
};

/// Scores candidates against a context. Owns evaluation scratch, so each
/// chain needs its own instance.
class Scorer {
public:
  explicit Scorer(const ScoringContext &ctx) : ctx_(ctx) {}
  Scores score(const Transformer &t);
  /// Scores `condition` guarding a body whose outputs are already known.
  Scores score_guarded(const Program &condition, const SuiteOutputs &body_outputs);
  Scores score_outputs(const SuiteOutputs &f) const;

private:
  const ScoringContext &ctx_;
  BatchEvaluator ev_;
  SuiteOutputs out_;
  std::vector<uint8_t> cond_;
};

struct ChainResult {
  CandidateKind kind = CandidateKind::Plain;
  /// Lowest-cost sound candidate; the top transformer when none was seen.
  Candidate best_sound;
  bool found_sound = false;
  /// Lowest-cost distinct candidates, best first.
  std::vector<Candidate> top;
  uint64_t proposals = 0;
  uint64_t accepted = 0;
  uint64_t rechecks = 0;
  uint64_t recheck_mismatches = 0;
  /// True when every proposal left the body program untouched.
  bool body_fixed = true;
  /// True when the chain never ran because the deadline had passed.
  bool skipped = false;
};

/// For abduction, `pool` must be nonempty; otherwise `kind` falls back to
/// Plain.
Candidate init_for_kind(CandidateKind &kind, std::span<const Program> pool, Domain domain, unsigned arity,
                        const OpcodeSampler &sampler, const SearchConfig &cfg, Rng &rng);

ChainResult mcmc_run(CandidateKind kind, Candidate init, const ScoringContext &ctx, const SearchConfig &cfg,
                     const OpcodeSampler &sampler, Rng &rng);

struct ChainTask {
  CandidateKind kind;
  uint64_t seed;
};

using Deadline = std::chrono::steady_clock::time_point;

/// Runs independent chains (in parallel when threads allow); results are
/// returned in task order and do not depend on the thread count. Chains not
/// yet started when `deadline` passes are skipped.
std::vector<ChainResult> run_chains(std::span<const ChainTask> tasks, std::span<const Program> pool, Domain domain,
                                    unsigned arity, const ScoringContext &ctx, const SearchConfig &cfg,
                                    const OpcodeSampler &sampler, Deadline deadline = Deadline::max());

/// weight(op) = 1 + occurrences of op across all programs of `fs`.
OpWeights update_weights(std::span<const Transformer> fs);

/// Mixes a base seed with two coordinates into an independent stream seed.
uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b);

} // namespace xsynth
