#include <gtest/gtest.h>

#include "reference.hpp"
#include "xsynth/dsl.hpp"
#include "xsynth/verify.hpp"

using namespace xsynth;

namespace {

const char *kUremFile = XSYNTH_TEST_DATA "/urem_kb_examples.xs";

Transformer dividend_identity() {
  return {Program(Domain::KnownBits, 2, ProgramKind::Transformer, {}, {0, 1}), std::nullopt};
}

} // namespace

TEST(Verify, TopIsSoundEverywhere) {
  for (Domain d : {Domain::KnownBits, Domain::URange, Domain::SRange}) {
    const Transformer t{top_program(d, 2), std::nullopt};
    const Verdict v = verify(t, OpId::Sdiv, d, VerifyConfig{});
    EXPECT_EQ(v.kind, VerdictKind::Sound) << v.detail;
    EXPECT_FALSE(v.witness);
    ASSERT_GE(v.exhaustive_widths.size(), 4u);
    EXPECT_EQ(std::vector<unsigned>(v.exhaustive_widths.begin(), v.exhaustive_widths.begin() + 4),
              (std::vector<unsigned>{1, 2, 3, 4}));
    EXPECT_FALSE(v.sampled_widths.empty());
  }
}

TEST(Verify, DividendIdentityIsUnsoundForUrem) {
  const auto w = check_width_exhaustive(dividend_identity(), OpId::Modu, Domain::KnownBits, 2);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->width, 2u);
  ASSERT_EQ(w->concrete.size(), 2u);
  // The witness is a genuine counterexample.
  const OpResult r = apply_bits(OpId::Modu, w->concrete[0], w->concrete[1], 2);
  ASSERT_TRUE(r.ok);
  EXPECT_EQ(r.value, w->result);
  EXPECT_TRUE(contains(w->inputs[0], BitVec(2, w->concrete[0])));
  EXPECT_TRUE(contains(w->inputs[1], BitVec(2, w->concrete[1])));
  EXPECT_FALSE(contains(w->output, BitVec(2, w->result)));
  EXPECT_FALSE(ref::check_sound(dividend_identity(), OpId::Modu, 2).empty());

  const Verdict v = verify(dividend_identity(), OpId::Modu, Domain::KnownBits, VerifyConfig{});
  EXPECT_EQ(v.kind, VerdictKind::Unsound);
  ASSERT_TRUE(v.witness);
  EXPECT_FALSE(describe(*v.witness).empty());
}

TEST(Verify, SpecificCounterexample) {
  // beta(3) urem beta(2) = 1, which the identity maps to beta(3).
  const std::vector<AbstractValue> in = {beta(Domain::KnownBits, BitVec(2, 3)), beta(Domain::KnownBits, BitVec(2, 2))};
  const AbstractValue out = eval(dividend_identity(), in);
  EXPECT_FALSE(contains(out, BitVec(2, apply_bits(OpId::Modu, 3, 2, 2).value)));
}

TEST(Verify, UremExamplesAreSound) {
  for (const NamedTransformer &nt : read_transformer_file(kUremFile)) {
    for (unsigned w = 1; w <= 4; ++w) {
      EXPECT_EQ(ref::check_sound(nt.transformer, OpId::Modu, w), "") << nt.name;
      EXPECT_FALSE(check_width_exhaustive(nt.transformer, OpId::Modu, Domain::KnownBits, w)) << nt.name;
    }
    EXPECT_EQ(verify(nt.transformer, OpId::Modu, Domain::KnownBits, VerifyConfig{}).kind, VerdictKind::Sound);
  }
}

TEST(Verify, AgreesWithReferenceOnRandomPrograms) {
  const OpcodeSampler sampler(OpWeights{}, OpcodeSet::basic());
  Rng rng(6);
  int sound = 0;
  for (int i = 0; i < 400; ++i) {
    const Domain d = i % 2 ? Domain::URange : Domain::KnownBits;
    const OpId op = i % 3 == 0 ? OpId::Or : OpId::Add;
    const Transformer t{init_random(d, 2, ProgramKind::Transformer, sampler, rng, 4), std::nullopt};
    for (unsigned w = 1; w <= 3; ++w) {
      const bool want = ref::check_sound(t, op, w).empty();
      const bool got = !check_width_exhaustive(t, op, d, w);
      ASSERT_EQ(got, want) << print_transformer({"t", t}) << " w=" << w;
      sound += got;
    }
  }
  EXPECT_GT(sound, 0);
}

TEST(Verify, UnaryOperations) {
  const Transformer top_t{top_program(Domain::URange, 1), std::nullopt};
  EXPECT_EQ(verify(top_t, OpId::PopCount, Domain::URange, VerifyConfig{}).kind, VerdictKind::Sound);
  const Transformer ident{Program(Domain::URange, 1, ProgramKind::Transformer, {}, {0, 1}), std::nullopt};
  EXPECT_EQ(verify(ident, OpId::Abs, Domain::URange, VerifyConfig{}).kind, VerdictKind::Unsound);
  EXPECT_FALSE(ref::check_sound(ident, OpId::Abs, 3).empty());
}
