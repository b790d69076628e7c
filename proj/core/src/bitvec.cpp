#include "xsynth/bitvec.hpp"

namespace xsynth {

namespace {

struct OpcodeInfo {
  Opcode op;
  std::string_view name;
  unsigned arity;
  OpcodeGroup group;
};

constexpr std::array<OpcodeInfo, kOpcodeCount> kOpcodes = {{
    {Opcode::And, "and", 2, OpcodeGroup::Bitwise},
    {Opcode::Or, "or", 2, OpcodeGroup::Bitwise},
    {Opcode::Xor, "xor", 2, OpcodeGroup::Bitwise},
    {Opcode::Neg, "neg", 1, OpcodeGroup::Bitwise},
    {Opcode::Add, "add", 2, OpcodeGroup::Add},
    {Opcode::Sub, "sub", 2, OpcodeGroup::Add},
    {Opcode::Umax, "umax", 2, OpcodeGroup::Max},
    {Opcode::Umin, "umin", 2, OpcodeGroup::Max},
    {Opcode::Smax, "smax", 2, OpcodeGroup::Max},
    {Opcode::Smin, "smin", 2, OpcodeGroup::Max},
    {Opcode::Mul, "mul", 2, OpcodeGroup::Mul},
    {Opcode::Udiv, "udiv", 2, OpcodeGroup::Mul},
    {Opcode::Sdiv, "sdiv", 2, OpcodeGroup::Mul},
    {Opcode::Urem, "urem", 2, OpcodeGroup::Mul},
    {Opcode::Srem, "srem", 2, OpcodeGroup::Mul},
    {Opcode::Shl, "shl", 2, OpcodeGroup::Shift},
    {Opcode::Ashr, "ashr", 2, OpcodeGroup::Shift},
    {Opcode::Lshr, "lshr", 2, OpcodeGroup::Shift},
    {Opcode::SetHighBits, "set_high_bits", 2, OpcodeGroup::BitSet},
    {Opcode::SetLowBits, "set_low_bits", 2, OpcodeGroup::BitSet},
    {Opcode::ClearLowBits, "clear_low_bits", 2, OpcodeGroup::BitSet},
    {Opcode::ClearHighBits, "clear_high_bits", 2, OpcodeGroup::BitSet},
    {Opcode::SetSignBit, "set_sign_bit", 1, OpcodeGroup::BitSet},
    {Opcode::ClearSignBit, "clear_sign_bit", 1, OpcodeGroup::BitSet},
    {Opcode::CountLeftOne, "count_left_one", 1, OpcodeGroup::BitCount},
    {Opcode::CountLeftZero, "count_left_zero", 1, OpcodeGroup::BitCount},
    {Opcode::CountRightOne, "count_right_one", 1, OpcodeGroup::BitCount},
    {Opcode::CountRightZero, "count_right_zero", 1, OpcodeGroup::BitCount},
    {Opcode::IfThenElse, "if_then_else", 3, OpcodeGroup::Ite},
}};

constexpr std::array<Opcode, kOpcodeCount> make_opcode_list() {
  std::array<Opcode, kOpcodeCount> out{};
  for (std::size_t i = 0; i < kOpcodeCount; ++i)
    out[i] = kOpcodes[i].op;
  return out;
}
constexpr std::array<Opcode, kOpcodeCount> kOpcodeList = make_opcode_list();

const OpcodeInfo &info(Opcode op) { return kOpcodes[static_cast<std::size_t>(op)]; }

} // namespace

unsigned arity(Opcode op) { return info(op).arity; }
OpcodeGroup group_of(Opcode op) { return info(op).group; }
std::string_view opcode_name(Opcode op) { return info(op).name; }
std::span<const Opcode> all_opcodes() { return kOpcodeList; }

std::optional<Opcode> parse_opcode(std::string_view name) {
  for (const OpcodeInfo &i : kOpcodes)
    if (i.name == name)
      return i.op;
  return std::nullopt;
}

BitVec constant(ConstantKind kind, unsigned width) { return BitVec(width, constant_bits(kind, width)); }

std::string_view constant_name(ConstantKind kind) {
  switch (kind) {
  case ConstantKind::Zero: return "#zero";
  case ConstantKind::One: return "#one";
  case ConstantKind::AllOnes: return "#all_ones";
  case ConstantKind::Width: return "#width";
  }
  return "";
}

uint64_t eval_primitive_bits(Opcode op, uint64_t a, uint64_t b, uint64_t c, unsigned w) {
  using namespace prim;
  switch (op) {
  case Opcode::And: return a & b;
  case Opcode::Or: return a | b;
  case Opcode::Xor: return a ^ b;
  case Opcode::Neg: return neg(a, w);
  case Opcode::Add: return add(a, b, w);
  case Opcode::Sub: return sub(a, b, w);
  case Opcode::Umax: return umax(a, b);
  case Opcode::Umin: return umin(a, b);
  case Opcode::Smax: return smax(a, b, w);
  case Opcode::Smin: return smin(a, b, w);
  case Opcode::Mul: return mul(a, b, w);
  case Opcode::Udiv: return udiv(a, b);
  case Opcode::Sdiv: return sdiv(a, b, w);
  case Opcode::Urem: return urem(a, b);
  case Opcode::Srem: return srem(a, b, w);
  case Opcode::Shl: return shl(a, b, w);
  case Opcode::Ashr: return ashr(a, b, w);
  case Opcode::Lshr: return lshr(a, b, w);
  case Opcode::SetHighBits: return set_high_bits(a, b, w);
  case Opcode::SetLowBits: return set_low_bits(a, b, w);
  case Opcode::ClearLowBits: return clear_low_bits(a, b, w);
  case Opcode::ClearHighBits: return clear_high_bits(a, b, w);
  case Opcode::SetSignBit: return set_sign_bit(a, w);
  case Opcode::ClearSignBit: return clear_sign_bit(a, w);
  case Opcode::CountLeftOne: return count_left_one(a, w);
  case Opcode::CountLeftZero: return count_left_zero(a, w);
  case Opcode::CountRightOne: return count_right_one(a, w);
  case Opcode::CountRightZero: return count_right_zero(a, w);
  case Opcode::IfThenElse: return if_then_else(a, b, c);
  }
  return 0;
}

BitVec eval_primitive(Opcode op, std::span<const BitVec> args, unsigned width) {
  assert(args.size() == arity(op));
  uint64_t v[3] = {0, 0, 0};
  for (std::size_t i = 0; i < args.size(); ++i) {
    assert(args[i].width() == width);
    v[i] = args[i].bits();
  }
  return BitVec(width, eval_primitive_bits(op, v[0], v[1], v[2], width));
}

std::string to_binary(BitVec v) {
  std::string s(v.width(), '0');
  for (unsigned i = 0; i < v.width(); ++i)
    if ((v.bits() >> i) & 1)
      s[v.width() - 1 - i] = '1';
  return s;
}

} // namespace xsynth
