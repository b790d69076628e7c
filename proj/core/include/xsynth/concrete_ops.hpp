#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "xsynth/bitvec.hpp"
#include "xsynth/domains.hpp"

namespace xsynth {

enum class OpId : uint8_t {
  Abds, Abdu, Add, AddNsw, AddNswNuw, AddNuw, And, Ashr, AshrExact, AvgCeilS,
  AvgCeilU, AvgFloorS, AvgFloorU, Lshr, LshrExact, Mods, Modu, Mul, Or, Sdiv,
  SdivExact, Shl, ShlNsw, ShlNswNuw, ShlNuw, Smax, Smin, SshlSat, Sub, SubNsw,
  SubNswNuw, SubNuw, UaddSat, Udiv, UdivExact, Umax, Umin, UshlSat, UsubSat, Xor,
  Abs, CountRZero, CountLZero, PopCount,
};
inline constexpr std::size_t kOpCount = 44;

std::span<const OpId> all_ops();
std::string_view op_name(OpId op);
std::optional<OpId> parse_op(std::string_view name);
unsigned op_arity(OpId op);

/// Result of a concrete operation on raw patterns; `ok == false` is the
/// Excluded outcome of a constraint violation.
struct OpResult {
  bool ok;
  uint64_t value;
};

/// `b` is ignored for unary operations.
OpResult apply_bits(OpId op, uint64_t a, uint64_t b, unsigned width);

/// std::nullopt when the arguments violate the operation's constraint.
std::optional<BitVec> apply(OpId op, std::span<const BitVec> args);

/// Visits every admissible concrete tuple of `inputs`; f(c0, c1, result)
/// returns false to stop. Returns true when the iteration was not cut short.
template <class F> bool for_each_admissible(OpId op, std::span<const AbstractValue> inputs, F &&f) {
  const unsigned w = inputs[0].width();
  bool completed = true;
  if (op_arity(op) == 1) {
    for_each_concrete(inputs[0], [&](uint64_t c0) {
      const OpResult r = apply_bits(op, c0, 0, w);
      if (r.ok && !f(c0, uint64_t{0}, r.value)) {
        completed = false;
        return false;
      }
      return true;
    });
    return completed;
  }
  for_each_concrete(inputs[0], [&](uint64_t c0) {
    for_each_concrete(inputs[1], [&](uint64_t c1) {
      const OpResult r = apply_bits(op, c0, c1, w);
      if (r.ok && !f(c0, c1, r.value)) {
        completed = false;
        return false;
      }
      return true;
    });
    return completed;
  });
  return completed;
}

bool has_admissible(OpId op, std::span<const AbstractValue> inputs);
uint64_t count_admissible(OpId op, std::span<const AbstractValue> inputs);

} // namespace xsynth
