#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xsynth/batch_eval.hpp"
#include "xsynth/concrete_ops.hpp"
#include "xsynth/domains.hpp"
#include "xsynth/dsl.hpp"

namespace xsynth {

/// Results of a concrete operation for every argument pair at one small width.
class OpTable {
public:
  OpTable(OpId op, unsigned width);
  unsigned width() const { return width_; }
  bool ok(uint64_t a, uint64_t b) const { return table_[index(a, b)] != kExcluded; }
  uint64_t value(uint64_t a, uint64_t b) const { return table_[index(a, b)]; }

  static constexpr unsigned kMaxWidth = 8;

private:
  static constexpr uint16_t kExcluded = 0xFFFF;
  std::size_t index(uint64_t a, uint64_t b) const { return (a << width_) | b; }
  unsigned width_;
  std::vector<uint16_t> table_;
};

inline constexpr uint64_t kDefaultBestBudget = uint64_t{1} << 24;

struct BudgetExceeded : std::length_error {
  using std::length_error::length_error;
};

/// Join of β(op(c)) over all admissible concrete tuples; Bottom when there
/// are none. Throws BudgetExceeded when the tuple count exceeds `budget`.
AbstractValue best_transformer(OpId op, std::span<const AbstractValue> inputs,
                               uint64_t budget = kDefaultBestBudget);
AbstractValue best_transformer(const OpTable &table, OpId op, std::span<const AbstractValue> inputs);

enum class Tier : uint8_t {
  Exhaustive,      // every abstract tuple, every concrete tuple
  SampledAbstract, // sampled abstract tuples, every concrete tuple
  SampledConcrete, // sampled abstract tuples, sampled concrete tuples
};
std::string_view tier_name(Tier t);

struct SuitePolicy {
  unsigned exhaustive_max_width = 4;
  std::vector<unsigned> mid_widths = {5, 6, 7, 8};
  unsigned mid_samples = 1000;
  std::vector<unsigned> large_widths = {64};
  unsigned large_samples = 10000;
  unsigned large_concrete_samples = 10000;
  /// Rejection sampling gives up after this many draws per requested case.
  unsigned resample_factor = 100;

  /// Tier sizes used for evaluation tables.
  static SuitePolicy evaluation_defaults() { return {}; }
  /// Lighter tiers used inside the synthesis loop.
  static SuitePolicy synthesis_defaults();
  std::string key() const;
  friend bool operator==(const SuitePolicy &, const SuitePolicy &) = default;
};

/// Test cases of one width and tier, stored column-wise.
struct WidthGroup {
  unsigned width = 1;
  Tier tier = Tier::Exhaustive;
  ColumnBlock inputs;
  OutputColumns best;
  /// Concrete tuples drawn per case; 0 for exhaustive concretization.
  unsigned concrete_samples = 0;
  /// Abstract draws discarded because no admissible tuple was found.
  uint64_t skipped = 0;
};

struct TestCase {
  std::vector<AbstractValue> inputs;
  bool exhaustive_concrete = true;
  AbstractValue best;
};

struct TestSuite {
  OpId op = OpId::And;
  Domain domain = Domain::KnownBits;
  SuitePolicy policy;
  uint64_t seed = 0;
  std::vector<WidthGroup> groups;

  std::size_t size() const;
  unsigned arity() const { return op_arity(op); }
  TestCase test_case(std::size_t group, std::size_t row) const;
};

TestSuite gen_suite(OpId op, Domain domain, const SuitePolicy &policy, uint64_t seed);

/// Builds a single-group suite from explicit cases (best outputs computed
/// exhaustively, so the width must be at most OpTable::kMaxWidth).
WidthGroup make_group(OpId op, Domain domain, unsigned width, std::span<const std::vector<AbstractValue>> cases);

// ---------------------------------------------------------------------------
// Scoring. Outputs are stored per group in suite order.

using SuiteOutputs = std::vector<OutputColumns>;
/// Per-group row masks.
using CaseMask = std::vector<std::vector<uint8_t>>;

SuiteOutputs evaluate(const Transformer &t, const TestSuite &suite, BatchEvaluator &ev);
SuiteOutputs evaluate_meet(std::span<const Transformer> set, const TestSuite &suite, BatchEvaluator &ev);
using TransformerFn = std::function<AbstractValue(std::span<const AbstractValue>)>;
SuiteOutputs evaluate_fn(const TransformerFn &f, const TestSuite &suite);
SuiteOutputs top_outputs(const TestSuite &suite);
SuiteOutputs best_outputs(const TestSuite &suite);
SuiteOutputs meet_outputs(const SuiteOutputs &a, const SuiteOutputs &b, const TestSuite &suite);

bool sound_at(const TestSuite &suite, const SuiteOutputs &f, std::size_t group, std::size_t row);
double soundness_score(const SuiteOutputs &f, const TestSuite &suite);
/// Σ over f-sound cases of size(g) − size(f ⊓ g), divided by norm(g).
/// Both sums range over `subset` when given. Precondition: norm(g) > 0.
double improvement_score(const SuiteOutputs &f, const SuiteOutputs &g, const TestSuite &suite,
                         const CaseMask *subset = nullptr);
uint64_t norm(const SuiteOutputs &f, const TestSuite &suite, const CaseMask *subset = nullptr);
CaseMask imprecise_subset(const TestSuite &suite, const SuiteOutputs &g);
std::size_t mask_count(const CaseMask &m);
/// Rows where f equals the best output.
std::size_t exact_count(const SuiteOutputs &f, const TestSuite &suite);
/// True when a ⊑ b on every row.
bool pointwise_leq(const SuiteOutputs &a, const SuiteOutputs &b, const TestSuite &suite);
/// True when a and b describe the same elements on every row.
bool pointwise_equal(const SuiteOutputs &a, const SuiteOutputs &b, const TestSuite &suite);

// Suite cache: a line-oriented text file keyed by op, domain, policy and seed.
void save_suite(const TestSuite &suite, const std::string &path);
/// Returns false when the file is missing or keyed differently.
bool load_suite(const std::string &path, OpId op, Domain domain, const SuitePolicy &policy, uint64_t seed,
                TestSuite &out);
std::string suite_cache_name(OpId op, Domain domain, const SuitePolicy &policy, uint64_t seed);

} // namespace xsynth
