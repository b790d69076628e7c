#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "xsynth/dsl.hpp"

namespace xsynth {

/// Abstract input tuples of one width stored column-wise: one column per
/// input slot plus the four constants broadcast to the column length.
struct ColumnBlock {
  unsigned width = 1;
  std::size_t size = 0;
  std::vector<std::vector<uint64_t>> slots;
  std::array<std::vector<uint64_t>, kConstantCount> constants;

  ColumnBlock() = default;
  ColumnBlock(unsigned width, unsigned num_slots);
  void push(std::span<const AbstractValue> inputs);
  /// Rebuilds the constant columns after pushes.
  void finalize();
  AbstractValue input(std::size_t row, unsigned arg, Domain d) const;
};

/// Output fields for every row of a block. Ill-formed field pairs encode
/// Bottom, as in the raw_* helpers.
struct OutputColumns {
  std::vector<uint64_t> f0;
  std::vector<uint64_t> f1;
};

/// Interprets programs over a whole block at once. Holds scratch storage,
/// so each thread needs its own instance.
class BatchEvaluator {
public:
  void run_transformer(const Program &p, const ColumnBlock &block, OutputColumns &out);
  /// Writes 1 for rows where the condition holds and 0 elsewhere.
  void run_condition(const Program &p, const ColumnBlock &block, std::vector<uint8_t> &out);
  void run(const Transformer &t, const ColumnBlock &block, OutputColumns &out);

private:
  void execute(const Program &p, const ColumnBlock &block);
  const uint64_t *column(OperandIndex o) const { return columns_[o]; }

  std::vector<uint64_t> scratch_;
  std::vector<const uint64_t *> columns_;
  std::vector<uint8_t> cond_;
};

/// Overwrites rows whose condition flag is 0 with top.
void blend_top(Domain d, unsigned width, std::span<const uint8_t> cond, OutputColumns &out);

} // namespace xsynth
