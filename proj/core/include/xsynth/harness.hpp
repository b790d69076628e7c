#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xsynth/oracle.hpp"
#include "xsynth/product.hpp"

namespace xsynth {

struct EvalColumn {
  std::string name;
  double value = 0;
};

/// One precision table row. `metric` is "exact_pct" (8-bit, percentage of
/// tests matching the best output) or "norm" (64-bit, summed output size
/// divided by the test count).
struct EvalRow {
  OpId op = OpId::And;
  Domain domain = Domain::KnownBits;
  unsigned width = 8;
  std::string metric;
  std::size_t tests = 0;
  uint64_t skipped = 0;
  std::vector<EvalColumn> columns;

  const EvalColumn *column(std::string_view name) const;
};

struct EvalOptions {
  unsigned exact_width = 8;
  unsigned exact_samples = 1000;
  unsigned norm_width = 64;
  unsigned norm_samples = 10000;
  unsigned norm_concrete = 10000;
  uint64_t seed = 0;
};

/// Outputs of every column on a shared test suite (one group per metric).
struct EvalData {
  TestSuite suite;
  std::vector<std::string> names;
  std::vector<SuiteOutputs> outputs;
};

/// Columns: top, synth, and when `external` is given, external and meet.
EvalData eval_data(OpId op, Domain domain, std::span<const Transformer> synth,
                   const std::optional<std::vector<Transformer>> &external, const EvalOptions &opts);
std::vector<EvalRow> eval_rows(const EvalData &data);

struct ProductOptions {
  unsigned exact_width = 8;
  unsigned exact_samples = 1000;
  unsigned norm_width = 64;
  unsigned norm_samples = 10000;
  /// Attempts to find an admissible concrete tuple before a 64-bit case is
  /// skipped as empty.
  unsigned norm_probe = 256;
  uint64_t seed = 0;
};

struct ProductCase {
  std::vector<ProductValue> inputs;
  AbstractValue best;    // known-bits best over the intersected concretizations
  AbstractValue kb_only; // known-bits set applied to the kb components
  AbstractValue reduced; // kb part of the reduced output pair
};

struct ProductData {
  std::vector<ProductCase> exact_cases;
  std::vector<ProductCase> norm_cases;
  uint64_t exact_skipped = 0;
  uint64_t norm_skipped = 0;
};

ProductData product_data(OpId op, Domain range_domain, std::span<const Transformer> kb_set,
                         std::span<const Transformer> range_set, const ProductOptions &opts);
/// Columns top, kb_only, reduced for the exact and norm metrics.
std::vector<EvalRow> product_rows(OpId op, Domain range_domain, const ProductData &data);

std::string format_rows(std::span<const EvalRow> rows);
std::string rows_json(std::span<const EvalRow> rows);

} // namespace xsynth
