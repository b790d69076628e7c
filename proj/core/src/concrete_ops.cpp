#include "xsynth/concrete_ops.hpp"

#include <array>

namespace xsynth {

namespace {

using i128 = __int128;
using u128 = unsigned __int128;

constexpr std::array<std::string_view, kOpCount> kNames = {
    "Abds",      "Abdu",      "Add",       "AddNsw",    "AddNswNuw", "AddNuw",     "And",
    "Ashr",      "AshrExact", "AvgCeilS",  "AvgCeilU",  "AvgFloorS", "AvgFloorU",  "Lshr",
    "LshrExact", "Mods",      "Modu",      "Mul",       "Or",        "Sdiv",       "SdivExact",
    "Shl",       "ShlNsw",    "ShlNswNuw", "ShlNuw",    "Smax",      "Smin",       "SshlSat",
    "Sub",       "SubNsw",    "SubNswNuw", "SubNuw",    "UaddSat",   "Udiv",       "UdivExact",
    "Umax",      "Umin",      "UshlSat",   "UsubSat",   "Xor",       "Abs",        "CountRZero",
    "CountLZero", "PopCount",
};

constexpr std::array<OpId, kOpCount> make_ops() {
  std::array<OpId, kOpCount> out{};
  for (std::size_t i = 0; i < kOpCount; ++i)
    out[i] = static_cast<OpId>(i);
  return out;
}
constexpr std::array<OpId, kOpCount> kOps = make_ops();

constexpr OpResult excluded() { return {false, 0}; }
constexpr OpResult value(uint64_t v, unsigned w) { return {true, v & width_mask(w)}; }

constexpr i128 smin_of(unsigned w) { return -(i128{1} << (w - 1)); }
constexpr i128 smax_of(unsigned w) { return (i128{1} << (w - 1)) - 1; }
constexpr bool fits_signed(i128 v, unsigned w) { return v >= smin_of(w) && v <= smax_of(w); }
constexpr bool fits_unsigned(u128 v, unsigned w) { return v <= width_mask(w); }

} // namespace

std::span<const OpId> all_ops() { return kOps; }
std::string_view op_name(OpId op) { return kNames[static_cast<std::size_t>(op)]; }

std::optional<OpId> parse_op(std::string_view name) {
  for (std::size_t i = 0; i < kOpCount; ++i)
    if (kNames[i] == name)
      return static_cast<OpId>(i);
  return std::nullopt;
}

unsigned op_arity(OpId op) {
  switch (op) {
  case OpId::Abs:
  case OpId::CountRZero:
  case OpId::CountLZero:
  case OpId::PopCount:
    return 1;
  default:
    return 2;
  }
}

OpResult apply_bits(OpId op, uint64_t a, uint64_t b, unsigned w) {
  const i128 sa = sign_extend(a, w), sb = sign_extend(b, w);
  const u128 ua = a, ub = b;
  switch (op) {
  case OpId::Add: return value(a + b, w);
  case OpId::AddNuw: return fits_unsigned(ua + ub, w) ? value(a + b, w) : excluded();
  case OpId::AddNsw: return fits_signed(sa + sb, w) ? value(a + b, w) : excluded();
  case OpId::AddNswNuw:
    return fits_unsigned(ua + ub, w) && fits_signed(sa + sb, w) ? value(a + b, w) : excluded();
  case OpId::Sub: return value(a - b, w);
  case OpId::SubNuw: return a >= b ? value(a - b, w) : excluded();
  case OpId::SubNsw: return fits_signed(sa - sb, w) ? value(a - b, w) : excluded();
  case OpId::SubNswNuw: return a >= b && fits_signed(sa - sb, w) ? value(a - b, w) : excluded();
  case OpId::Mul: return value(a * b, w);
  case OpId::And: return value(a & b, w);
  case OpId::Or: return value(a | b, w);
  case OpId::Xor: return value(a ^ b, w);
  case OpId::Udiv: return b != 0 ? value(a / b, w) : excluded();
  case OpId::UdivExact: return b != 0 && a % b == 0 ? value(a / b, w) : excluded();
  case OpId::Sdiv: return b != 0 ? value(prim::sdiv(a, b, w), w) : excluded();
  case OpId::SdivExact:
    return b != 0 && prim::srem(a, b, w) == 0 ? value(prim::sdiv(a, b, w), w) : excluded();
  case OpId::Modu: return b != 0 ? value(a % b, w) : excluded();
  case OpId::Mods: return b != 0 ? value(prim::srem(a, b, w), w) : excluded();
  case OpId::Umax: return value(prim::umax(a, b), w);
  case OpId::Umin: return value(prim::umin(a, b), w);
  case OpId::Smax: return value(prim::smax(a, b, w), w);
  case OpId::Smin: return value(prim::smin(a, b, w), w);
  case OpId::Abds: return value(static_cast<uint64_t>(sa > sb ? sa - sb : sb - sa), w);
  case OpId::Abdu: return value(a > b ? a - b : b - a, w);
  case OpId::AvgFloorU: return value(static_cast<uint64_t>((ua + ub) >> 1), w);
  case OpId::AvgCeilU: return value(static_cast<uint64_t>((ua + ub + 1) >> 1), w);
  case OpId::AvgFloorS: return value(static_cast<uint64_t>((sa + sb) >> 1), w);
  case OpId::AvgCeilS: return value(static_cast<uint64_t>((sa + sb + 1) >> 1), w);
  case OpId::UaddSat: return value(fits_unsigned(ua + ub, w) ? a + b : width_mask(w), w);
  case OpId::UsubSat: return value(a >= b ? a - b : 0, w);
  default: break;
  }

  // Shifts: the amount must lie in [0, width].
  switch (op) {
  case OpId::Shl:
  case OpId::ShlNsw:
  case OpId::ShlNuw:
  case OpId::ShlNswNuw:
  case OpId::Lshr:
  case OpId::LshrExact:
  case OpId::Ashr:
  case OpId::AshrExact:
  case OpId::SshlSat:
  case OpId::UshlSat:
    if (b > w)
      return excluded();
    break;
  default: break;
  }
  const uint64_t lost = prim::low_bits(static_cast<unsigned>(b < 64 ? b : 64));
  switch (op) {
  case OpId::Shl: return value(prim::shl(a, b, w), w);
  case OpId::ShlNuw: return fits_unsigned(ua << b, w) ? value(prim::shl(a, b, w), w) : excluded();
  case OpId::ShlNsw: return fits_signed(sa * (i128{1} << b), w) ? value(prim::shl(a, b, w), w) : excluded();
  case OpId::ShlNswNuw:
    return fits_unsigned(ua << b, w) && fits_signed(sa * (i128{1} << b), w) ? value(prim::shl(a, b, w), w)
                                                                           : excluded();
  case OpId::Lshr: return value(prim::lshr(a, b, w), w);
  case OpId::LshrExact: return (a & lost) == 0 ? value(prim::lshr(a, b, w), w) : excluded();
  case OpId::Ashr: return value(prim::ashr(a, b, w), w);
  case OpId::AshrExact: return (a & lost) == 0 ? value(prim::ashr(a, b, w), w) : excluded();
  case OpId::SshlSat: {
    const i128 wide = sa * (i128{1} << b);
    if (fits_signed(wide, w))
      return value(static_cast<uint64_t>(wide), w);
    return value(static_cast<uint64_t>(sa < 0 ? smin_of(w) : smax_of(w)), w);
  }
  case OpId::UshlSat: {
    const u128 wide = ua << b;
    return value(fits_unsigned(wide, w) ? static_cast<uint64_t>(wide) : width_mask(w), w);
  }
  case OpId::Abs: return value(sa < 0 ? 0 - a : a, w);
  case OpId::CountRZero: return value(prim::count_right_zero(a, w), w);
  case OpId::CountLZero: return value(prim::count_left_zero(a, w), w);
  case OpId::PopCount: return value(static_cast<uint64_t>(std::popcount(a)), w);
  default: break;
  }
  return excluded();
}

std::optional<BitVec> apply(OpId op, std::span<const BitVec> args) {
  assert(args.size() == op_arity(op));
  const unsigned w = args[0].width();
  const uint64_t b = args.size() > 1 ? args[1].bits() : 0;
  const OpResult r = apply_bits(op, args[0].bits(), b, w);
  if (!r.ok)
    return std::nullopt;
  return BitVec(w, r.value);
}

bool has_admissible(OpId op, std::span<const AbstractValue> inputs) {
  bool found = false;
  for_each_admissible(op, inputs, [&](uint64_t, uint64_t, uint64_t) {
    found = true;
    return false;
  });
  return found;
}

uint64_t count_admissible(OpId op, std::span<const AbstractValue> inputs) {
  uint64_t n = 0;
  for_each_admissible(op, inputs, [&](uint64_t, uint64_t, uint64_t) {
    ++n;
    return true;
  });
  return n;
}

} // namespace xsynth
