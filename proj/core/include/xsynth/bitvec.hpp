#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace xsynth {

inline constexpr unsigned kMaxWidth = 64;

constexpr uint64_t width_mask(unsigned width) {
  return width >= 64 ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
}

constexpr uint64_t sign_bit(unsigned width) { return uint64_t{1} << (width - 1); }

constexpr int64_t sign_extend(uint64_t bits, unsigned width) {
  if (width >= 64)
    return static_cast<int64_t>(bits);
  const uint64_t s = sign_bit(width);
  return static_cast<int64_t>((bits ^ s) - s);
}

/// Signed less-than on two canonical `width`-bit patterns.
constexpr bool slt(uint64_t a, uint64_t b, unsigned width) {
  return sign_extend(a, width) < sign_extend(b, width);
}

/// A fixed-width integer in canonical (masked) form.
class BitVec {
public:
  constexpr BitVec() = default;
  constexpr BitVec(unsigned width, uint64_t bits)
      : bits_(bits & width_mask(width)), width_(static_cast<uint8_t>(width)) {
    assert(width >= 1 && width <= kMaxWidth);
  }

  constexpr unsigned width() const { return width_; }
  constexpr uint64_t bits() const { return bits_; }
  constexpr int64_t signed_value() const { return sign_extend(bits_, width_); }

  friend constexpr bool operator==(BitVec, BitVec) = default;

private:
  uint64_t bits_ = 0;
  uint8_t width_ = 1;
};

enum class Opcode : uint8_t {
  And, Or, Xor, Neg,
  Add, Sub,
  Umax, Umin, Smax, Smin,
  Mul, Udiv, Sdiv, Urem, Srem,
  Shl, Ashr, Lshr,
  SetHighBits, SetLowBits, ClearLowBits, ClearHighBits, SetSignBit, ClearSignBit,
  CountLeftOne, CountLeftZero, CountRightOne, CountRightZero,
  IfThenElse,
};
inline constexpr std::size_t kOpcodeCount = 29;

enum class OpcodeGroup : uint8_t { Bitwise, Add, Max, Mul, Shift, BitSet, BitCount, Ite };

unsigned arity(Opcode op);
OpcodeGroup group_of(Opcode op);
std::string_view opcode_name(Opcode op);
std::optional<Opcode> parse_opcode(std::string_view name);
std::span<const Opcode> all_opcodes();

enum class ConstantKind : uint8_t { Zero, One, AllOnes, Width };
inline constexpr std::size_t kConstantCount = 4;

constexpr uint64_t constant_bits(ConstantKind kind, unsigned width) {
  switch (kind) {
  case ConstantKind::Zero: return 0;
  case ConstantKind::One: return 1;
  case ConstantKind::AllOnes: return width_mask(width);
  case ConstantKind::Width: return width & width_mask(width);
  }
  return 0;
}
BitVec constant(ConstantKind kind, unsigned width);
std::string_view constant_name(ConstantKind kind);

/// Scalar kernels for the DSL primitives on canonical `w`-bit patterns.
/// Every kernel is total and returns a canonical pattern.
namespace prim {

constexpr uint64_t low_bits(unsigned k) { return k >= 64 ? ~uint64_t{0} : (uint64_t{1} << k) - 1; }
constexpr unsigned clamp_count(uint64_t k, unsigned w) { return k >= w ? w : static_cast<unsigned>(k); }
constexpr uint64_t high_bits(unsigned k, unsigned w) {
  return width_mask(w) & ~low_bits(w - k);
}

constexpr uint64_t neg(uint64_t a, unsigned w) { return ~a & width_mask(w); }
constexpr uint64_t add(uint64_t a, uint64_t b, unsigned w) { return (a + b) & width_mask(w); }
constexpr uint64_t sub(uint64_t a, uint64_t b, unsigned w) { return (a - b) & width_mask(w); }
constexpr uint64_t mul(uint64_t a, uint64_t b, unsigned w) { return (a * b) & width_mask(w); }
constexpr uint64_t umax(uint64_t a, uint64_t b) { return a < b ? b : a; }
constexpr uint64_t umin(uint64_t a, uint64_t b) { return a < b ? a : b; }
constexpr uint64_t smax(uint64_t a, uint64_t b, unsigned w) { return slt(a, b, w) ? b : a; }
constexpr uint64_t smin(uint64_t a, uint64_t b, unsigned w) { return slt(a, b, w) ? a : b; }
constexpr uint64_t udiv(uint64_t a, uint64_t b) { return b == 0 ? 0 : a / b; }
constexpr uint64_t urem(uint64_t a, uint64_t b) { return b == 0 ? 0 : a % b; }
constexpr uint64_t sdiv(uint64_t a, uint64_t b, unsigned w) {
  if (b == 0)
    return 0;
  const int64_t sb = sign_extend(b, w);
  if (sb == -1)
    return (0 - a) & width_mask(w);
  return static_cast<uint64_t>(sign_extend(a, w) / sb) & width_mask(w);
}
constexpr uint64_t srem(uint64_t a, uint64_t b, unsigned w) {
  if (b == 0)
    return 0;
  const int64_t sb = sign_extend(b, w);
  if (sb == -1)
    return 0;
  return static_cast<uint64_t>(sign_extend(a, w) % sb) & width_mask(w);
}
constexpr uint64_t shl(uint64_t a, uint64_t b, unsigned w) {
  return b >= w ? 0 : (a << b) & width_mask(w);
}
constexpr uint64_t lshr(uint64_t a, uint64_t b, unsigned w) { return b >= w ? 0 : a >> b; }
constexpr uint64_t ashr(uint64_t a, uint64_t b, unsigned w) {
  const bool negative = (a & sign_bit(w)) != 0;
  if (b >= w)
    return negative ? width_mask(w) : 0;
  return static_cast<uint64_t>(sign_extend(a, w) >> b) & width_mask(w);
}
constexpr uint64_t set_high_bits(uint64_t a, uint64_t k, unsigned w) {
  return a | high_bits(clamp_count(k, w), w);
}
constexpr uint64_t set_low_bits(uint64_t a, uint64_t k, unsigned w) {
  return a | low_bits(clamp_count(k, w));
}
constexpr uint64_t clear_low_bits(uint64_t a, uint64_t k, unsigned w) {
  return a & ~low_bits(clamp_count(k, w));
}
constexpr uint64_t clear_high_bits(uint64_t a, uint64_t k, unsigned w) {
  return a & ~high_bits(clamp_count(k, w), w);
}
constexpr uint64_t set_sign_bit(uint64_t a, unsigned w) { return a | sign_bit(w); }
constexpr uint64_t clear_sign_bit(uint64_t a, unsigned w) { return a & ~sign_bit(w); }
constexpr uint64_t count_left_zero(uint64_t a, unsigned w) {
  return a == 0 ? w : static_cast<uint64_t>(std::countl_zero(a)) - (64 - w);
}
constexpr uint64_t count_left_one(uint64_t a, unsigned w) { return count_left_zero(neg(a, w), w); }
constexpr uint64_t count_right_zero(uint64_t a, unsigned w) {
  return a == 0 ? w : static_cast<uint64_t>(std::countr_zero(a));
}
constexpr uint64_t count_right_one(uint64_t a, unsigned w) { return count_right_zero(neg(a, w), w); }
constexpr uint64_t if_then_else(uint64_t c, uint64_t a, uint64_t b) { return c != 0 ? a : b; }

} // namespace prim

/// Raw-pattern evaluation; unused trailing operands are ignored.
uint64_t eval_primitive_bits(Opcode op, uint64_t a, uint64_t b, uint64_t c, unsigned width);

BitVec eval_primitive(Opcode op, std::span<const BitVec> args, unsigned width);

std::string to_binary(BitVec v);

} // namespace xsynth
