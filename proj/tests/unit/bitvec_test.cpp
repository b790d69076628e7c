#include <gtest/gtest.h>

#include <iterator>
#include <random>

#include "reference.hpp"
#include "xsynth/bitvec.hpp"

using namespace xsynth;

TEST(Bitvec, ConstructorMasksToWidth) {
  EXPECT_EQ(BitVec(4, 0xff).bits(), 0xfu);
  EXPECT_EQ(BitVec(4, 0b1000).signed_value(), -8);
  EXPECT_EQ(BitVec(64, ~uint64_t{0}).signed_value(), -1);
}

TEST(Bitvec, PrimitiveExamples) {
  EXPECT_EQ(eval_primitive_bits(Opcode::And, 0b0110, 0b0101, 0, 4), 0b0100u);
  EXPECT_EQ(eval_primitive_bits(Opcode::Udiv, 0b0111, 0, 0, 4), 0u);
  EXPECT_EQ(eval_primitive_bits(Opcode::CountRightZero, 0b1000, 0, 0, 4), 3u);
  for (uint64_t k = 0; k <= 4; ++k)
    EXPECT_EQ(eval_primitive_bits(Opcode::SetLowBits, 0, k, 0, 4), (uint64_t{1} << k) - 1) << k;
}

TEST(Bitvec, Constants) {
  EXPECT_EQ(constant(ConstantKind::AllOnes, 4).bits(), 0b1111u);
  EXPECT_EQ(constant(ConstantKind::Width, 8).bits(), 8u);
  EXPECT_EQ(constant(ConstantKind::Zero, 1).bits(), 0u);
  EXPECT_EQ(constant(ConstantKind::One, 64).bits(), 1u);
  EXPECT_EQ(constant(ConstantKind::Width, 64).bits(), 64u);
  // Width 2 does not fit in two bits.
  EXPECT_EQ(constant(ConstantKind::Width, 2).bits(), 2u);
  EXPECT_EQ(constant(ConstantKind::Width, 1).bits(), 1u);
}

TEST(Bitvec, PrimitivesMatchReferenceExhaustively) {
  for (unsigned w = 1; w <= 5; ++w) {
    const uint64_t m = width_mask(w);
    for (Opcode op : all_opcodes()) {
      const uint64_t c_max = op == Opcode::IfThenElse ? m : 0;
      for (uint64_t a = 0; a <= m; ++a)
        for (uint64_t b = 0; b <= m; ++b)
          for (uint64_t c = 0; c <= c_max; ++c)
            ASSERT_EQ(eval_primitive_bits(op, a, b, c, w), ref::primitive(op, a, b, c, w))
                << opcode_name(op) << " w=" << w << " a=" << a << " b=" << b << " c=" << c;
    }
  }
}

TEST(Bitvec, PrimitivesMatchReferenceAtWideWidths) {
  std::mt19937_64 rng(11);
  const uint64_t specials[] = {0, 1, 2, 31, 32, 63, 64, 65, 0x7fffffffffffffffULL, 0x8000000000000000ULL, ~uint64_t{0}};
  for (unsigned w : {7u, 8u, 16u, 31u, 32u, 33u, 63u, 64u}) {
    const uint64_t m = width_mask(w);
    for (Opcode op : all_opcodes())
      for (int i = 0; i < 3000; ++i) {
        const uint64_t a = (i % 3 == 0 ? specials[rng() % std::size(specials)] : rng()) & m;
        const uint64_t b = (i % 2 == 0 ? specials[rng() % std::size(specials)] : rng()) & m;
        const uint64_t c = rng() & m & (rng() & 1 ? m : 0);
        ASSERT_EQ(eval_primitive_bits(op, a, b, c, w), ref::primitive(op, a, b, c, w))
            << opcode_name(op) << " w=" << w << " a=" << a << " b=" << b;
      }
  }
}

TEST(Bitvec, OpcodeNamesRoundTrip) {
  EXPECT_EQ(all_opcodes().size(), kOpcodeCount);
  for (Opcode op : all_opcodes()) {
    const auto parsed = parse_opcode(opcode_name(op));
    ASSERT_TRUE(parsed);
    EXPECT_EQ(*parsed, op);
  }
  EXPECT_FALSE(parse_opcode("frobnicate"));
}

TEST(Bitvec, Arity) {
  EXPECT_EQ(arity(Opcode::Neg), 1u);
  EXPECT_EQ(arity(Opcode::CountLeftOne), 1u);
  EXPECT_EQ(arity(Opcode::SetSignBit), 1u);
  EXPECT_EQ(arity(Opcode::Add), 2u);
  EXPECT_EQ(arity(Opcode::IfThenElse), 3u);
}
