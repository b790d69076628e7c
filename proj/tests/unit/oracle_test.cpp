#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "reference.hpp"
#include "values.hpp"
#include "xsynth/dsl.hpp"
#include "xsynth/oracle.hpp"

using namespace xsynth;
using namespace testing_values;

namespace {

SuitePolicy exhaustive_only(unsigned max_width) {
  SuitePolicy p;
  p.exhaustive_max_width = max_width;
  p.mid_widths.clear();
  p.large_widths.clear();
  return p;
}

SuitePolicy small_policy() {
  SuitePolicy p;
  p.exhaustive_max_width = 3;
  p.mid_widths = {5};
  p.mid_samples = 50;
  p.large_widths = {32};
  p.large_samples = 30;
  p.large_concrete_samples = 50;
  return p;
}

// Known-bits closed forms for the bitwise operations.
AbstractValue closed_form(OpId op, const AbstractValue &l, const AbstractValue &r) {
  const unsigned w = l.width();
  switch (op) {
  case OpId::And: return AbstractValue::known_bits(w, l.zero() | r.zero(), l.one() & r.one());
  case OpId::Or: return AbstractValue::known_bits(w, l.zero() & r.zero(), l.one() | r.one());
  default:
    return AbstractValue::known_bits(w, (l.zero() & r.zero()) | (l.one() & r.one()),
                                     (l.zero() & r.one()) | (l.one() & r.zero()));
  }
}

} // namespace

TEST(Oracle, BitwiseBestMatchesClosedForms) {
  for (OpId op : {OpId::And, OpId::Or, OpId::Xor})
    for (unsigned w = 1; w <= 4; ++w) {
      const OpTable table(op, w);
      for (const AbstractValue &l : enumerate(Domain::KnownBits, w))
        for (const AbstractValue &r : enumerate(Domain::KnownBits, w)) {
          const std::vector<AbstractValue> in = {l, r};
          ASSERT_EQ(best_transformer(op, in), closed_form(op, l, r)) << op_name(op) << to_string(l) << to_string(r);
          ASSERT_EQ(best_transformer(table, op, in), closed_form(op, l, r));
        }
    }
}

TEST(Oracle, Examples) {
  std::vector<AbstractValue> in = {kb("?1"), kb("11")};
  EXPECT_EQ(to_string(best_transformer(OpId::And, in)), "?1");
  in = {ur(4, 0, 3), ur(4, 2, 2)};
  EXPECT_EQ(best_transformer(OpId::Umax, in), ur(4, 2, 3));
  in = {top(Domain::KnownBits, 4), beta(Domain::KnownBits, BitVec(4, 0))};
  EXPECT_TRUE(best_transformer(OpId::Udiv, in).is_bottom());
  in = {top(Domain::URange, 8), ur(8, 9, 12)};
  EXPECT_TRUE(best_transformer(OpId::Shl, in).is_bottom());
}

TEST(Oracle, MatchesReferenceOnAllOpsAndDomains) {
  Rng rng(12);
  for (OpId op : all_ops())
    for (Domain d : {Domain::KnownBits, Domain::URange, Domain::SRange})
      for (unsigned w : {1u, 3u, 4u})
        for (int i = 0; i < 60; ++i) {
          std::vector<AbstractValue> in = {sample(d, w, rng)};
          if (op_arity(op) == 2)
            in.push_back(sample(d, w, rng));
          std::vector<ref::Value> rin;
          for (const auto &a : in)
            rin.push_back(ref::from(a));
          const AbstractValue got = best_transformer(op, in);
          ASSERT_EQ(ref::gamma(ref::from(got)), ref::gamma(ref::best(op, d, w, rin))) << op_name(op);
          if (w <= OpTable::kMaxWidth) {
            ASSERT_EQ(best_transformer(OpTable(op, w), op, in), got);
          }
        }
}

TEST(Oracle, BudgetIsEnforced) {
  const std::vector<AbstractValue> in = {top(Domain::KnownBits, 32), top(Domain::KnownBits, 32)};
  EXPECT_THROW(best_transformer(OpId::Add, in, 1000), BudgetExceeded);
}

TEST(Oracle, ExhaustiveCaseCount) {
  const TestSuite s = gen_suite(OpId::And, Domain::KnownBits, exhaustive_only(4), 1);
  EXPECT_EQ(s.size(), 7380u);
  ASSERT_EQ(s.groups.size(), 4u);
  for (const WidthGroup &g : s.groups)
    EXPECT_EQ(g.tier, Tier::Exhaustive);
}

TEST(Oracle, TopNormAtWidthTwo) {
  const TestSuite s = gen_suite(OpId::And, Domain::KnownBits, exhaustive_only(2), 1);
  const SuiteOutputs t = top_outputs(s);
  CaseMask only_w2(s.groups.size());
  for (std::size_t gi = 0; gi < s.groups.size(); ++gi)
    only_w2[gi].assign(s.groups[gi].inputs.size, s.groups[gi].width == 2);
  EXPECT_EQ(norm(t, s, &only_w2), 162u);
  CaseMask none(s.groups.size());
  for (std::size_t gi = 0; gi < s.groups.size(); ++gi)
    none[gi].assign(s.groups[gi].inputs.size, 0);
  EXPECT_EQ(norm(t, s, &none), 0u);
}

TEST(Oracle, BestHasMinimalNorm) {
  const TestSuite s = gen_suite(OpId::Add, Domain::KnownBits, exhaustive_only(3), 1);
  const uint64_t best = norm(best_outputs(s), s);
  const OpcodeSampler sampler(OpWeights{}, OpcodeSet::full());
  Rng rng(7);
  BatchEvaluator ev;
  for (int i = 0; i < 1000; ++i) {
    const Transformer t{init_random(Domain::KnownBits, 2, ProgramKind::Transformer, sampler, rng), std::nullopt};
    const SuiteOutputs out = evaluate(t, s, ev);
    if (soundness_score(out, s) == 1.0) {
      EXPECT_GE(norm(out, s), best);
    }
  }
}

TEST(Oracle, SuiteTiersAndSkipping) {
  SuitePolicy p;
  p.exhaustive_max_width = 0;
  p.mid_widths = {};
  p.large_widths = {64};
  p.large_samples = 300;
  p.large_concrete_samples = 50;
  const TestSuite s = gen_suite(OpId::Shl, Domain::KnownBits, p, 4);
  ASSERT_EQ(s.groups.size(), 1u);
  const WidthGroup &g = s.groups[0];
  EXPECT_EQ(g.tier, Tier::SampledConcrete);
  // Most random shift-amount abstractions at width 64 admit no amount in [0, 64].
  EXPECT_GT(g.skipped, 0u);
  EXPECT_EQ(g.inputs.size + g.skipped, 300u);
  for (std::size_t r = 0; r < g.inputs.size; ++r) {
    EXPECT_FALSE(raw_is_bottom(s.domain, 64, g.best.f0[r], g.best.f1[r]));
    EXPECT_TRUE(s.test_case(0, r).inputs[1].is_bottom() == false);
  }
}

TEST(Oracle, SuiteIsDeterministic) {
  const TestSuite a = gen_suite(OpId::Mul, Domain::URange, small_policy(), 42);
  const TestSuite b = gen_suite(OpId::Mul, Domain::URange, small_policy(), 42);
  const TestSuite c = gen_suite(OpId::Mul, Domain::URange, small_policy(), 43);
  ASSERT_EQ(a.groups.size(), b.groups.size());
  EXPECT_TRUE(pointwise_equal(best_outputs(a), best_outputs(b), a));
  for (std::size_t gi = 0; gi < a.groups.size(); ++gi)
    EXPECT_EQ(a.groups[gi].inputs.slots, b.groups[gi].inputs.slots);
  EXPECT_NE(a.groups.back().inputs.slots, c.groups.back().inputs.slots);
}

TEST(Oracle, SoundnessScores) {
  const TestSuite s = gen_suite(OpId::Modu, Domain::KnownBits, small_policy(), 3);
  BatchEvaluator ev;
  const Transformer top_t{top_program(Domain::KnownBits, 2), std::nullopt};
  EXPECT_EQ(soundness_score(evaluate(top_t, s, ev), s), 1.0);

  const Program bottom_p(Domain::KnownBits, 2, ProgramKind::Transformer, {}, {6, 6});
  EXPECT_LT(soundness_score(evaluate({bottom_p, std::nullopt}, s, ev), s), 1.0);

  // Identity on the dividend, checked against a direct count.
  const Program ident(Domain::KnownBits, 2, ProgramKind::Transformer, {}, {0, 1});
  const SuiteOutputs out = evaluate({ident, std::nullopt}, s, ev);
  std::size_t sound = 0;
  for (std::size_t gi = 0; gi < s.groups.size(); ++gi)
    for (std::size_t r = 0; r < s.groups[gi].inputs.size; ++r) {
      const TestCase tc = s.test_case(gi, r);
      if (s.groups[gi].width > 8) {
        sound += leq(tc.best, tc.inputs[0]);
        continue;
      }
      const auto gl = ref::gamma(ref::from(tc.inputs[0]));
      const auto gb = ref::gamma(ref::from(tc.best));
      sound += std::includes(gl.begin(), gl.end(), gb.begin(), gb.end());
    }
  EXPECT_DOUBLE_EQ(soundness_score(out, s), static_cast<double>(sound) / static_cast<double>(s.size()));
}

TEST(Oracle, ImprovementScores) {
  const TestSuite s = gen_suite(OpId::And, Domain::KnownBits, small_policy(), 3);
  const SuiteOutputs t = top_outputs(s), best = best_outputs(s);
  EXPECT_EQ(improvement_score(t, t, s), 0.0);
  EXPECT_EQ(improvement_score(best, best, s), 0.0);
  const double expected = 1.0 - static_cast<double>(norm(meet_outputs(best, t, s), s)) / static_cast<double>(norm(t, s));
  EXPECT_DOUBLE_EQ(improvement_score(best, t, s), expected);
  EXPECT_GT(expected, 0.0);

  BatchEvaluator ev;
  const Program bottom_p(Domain::KnownBits, 2, ProgramKind::Transformer, {}, {6, 6});
  EXPECT_EQ(improvement_score(evaluate({bottom_p, std::nullopt}, s, ev), t, s), 0.0);
}

TEST(Oracle, ImpreciseSubset) {
  const TestSuite s = gen_suite(OpId::Xor, Domain::KnownBits, small_policy(), 5);
  EXPECT_EQ(mask_count(imprecise_subset(s, best_outputs(s))), 0u);
  const CaseMask m = imprecise_subset(s, top_outputs(s));
  std::size_t not_top = 0;
  for (std::size_t gi = 0; gi < s.groups.size(); ++gi)
    for (std::size_t r = 0; r < s.groups[gi].inputs.size; ++r)
      not_top += !s.test_case(gi, r).best.is_top();
  EXPECT_EQ(mask_count(m), not_top);
  EXPECT_EQ(exact_count(best_outputs(s), s), s.size());
  EXPECT_EQ(exact_count(top_outputs(s), s), s.size() - not_top);
}

TEST(Oracle, PointwiseOrdering) {
  const TestSuite s = gen_suite(OpId::Add, Domain::SRange, small_policy(), 2);
  EXPECT_TRUE(pointwise_leq(best_outputs(s), top_outputs(s), s));
  EXPECT_FALSE(pointwise_leq(top_outputs(s), best_outputs(s), s));
  EXPECT_TRUE(pointwise_equal(meet_outputs(best_outputs(s), top_outputs(s), s), best_outputs(s), s));
}

TEST(Oracle, SuiteCacheRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "xsynth_oracle_cache_test";
  std::filesystem::create_directories(dir);
  const TestSuite a = gen_suite(OpId::Abdu, Domain::URange, small_policy(), 9);
  const std::string path = (dir / suite_cache_name(a.op, a.domain, a.policy, a.seed)).string();
  save_suite(a, path);
  TestSuite b;
  ASSERT_TRUE(load_suite(path, a.op, a.domain, a.policy, a.seed, b));
  ASSERT_EQ(b.groups.size(), a.groups.size());
  for (std::size_t gi = 0; gi < a.groups.size(); ++gi) {
    EXPECT_EQ(b.groups[gi].inputs.slots, a.groups[gi].inputs.slots);
    EXPECT_EQ(b.groups[gi].best.f0, a.groups[gi].best.f0);
    EXPECT_EQ(b.groups[gi].best.f1, a.groups[gi].best.f1);
    EXPECT_EQ(b.groups[gi].skipped, a.groups[gi].skipped);
    EXPECT_EQ(b.groups[gi].tier, a.groups[gi].tier);
  }
  TestSuite c;
  EXPECT_FALSE(load_suite(path, a.op, a.domain, a.policy, a.seed + 1, c));
  EXPECT_FALSE(load_suite(path, OpId::Add, a.domain, a.policy, a.seed, c));
  std::filesystem::remove_all(dir);
}
