#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "reference.hpp"
#include "values.hpp"
#include "xsynth/domains.hpp"

using namespace xsynth;
using namespace testing_values;

namespace {

constexpr Domain kDomains[] = {Domain::KnownBits, Domain::URange, Domain::SRange};

std::set<uint64_t> gamma_of(const AbstractValue &a) {
  std::set<uint64_t> s;
  for (uint64_t c = 0; c <= width_mask(a.width()); ++c)
    if (contains(a, BitVec(a.width(), c)))
      s.insert(c);
  return s;
}

} // namespace

TEST(Domains, Top) {
  EXPECT_EQ(to_string(top(Domain::KnownBits, 4)), "????");
  EXPECT_EQ(to_string(top(Domain::URange, 4)), "[0,15]");
  EXPECT_EQ(to_string(top(Domain::SRange, 4)), "[-8,7]");
  for (Domain d : kDomains)
    EXPECT_TRUE(top(d, 7).is_top());
}

TEST(Domains, MeetExamples) {
  EXPECT_EQ(meet(ur(4, 0, 7), ur(4, 4, 12)), ur(4, 4, 7));
  EXPECT_TRUE(meet(AbstractValue::known_bits(4, 0b0001, 0b0100), AbstractValue::known_bits(4, 0b0100, 0)).is_bottom());
  for (Domain d : kDomains)
    for (const AbstractValue &x : enumerate(d, 3))
      EXPECT_EQ(meet(top(d, 3), x), x);
}

TEST(Domains, JoinExamples) {
  EXPECT_EQ(join(ur(4, 0, 3), ur(4, 10, 12)), ur(4, 0, 12));
  EXPECT_EQ(join(beta(Domain::URange, BitVec(4, 5)), beta(Domain::URange, BitVec(4, 9))), ur(4, 5, 9));
  for (Domain d : kDomains)
    for (const AbstractValue &x : enumerate(d, 3))
      EXPECT_EQ(join(AbstractValue::bottom(d, 3), x), x);
}

TEST(Domains, BetaAndContains) {
  EXPECT_EQ(beta(Domain::KnownBits, BitVec(4, 0b0101)), AbstractValue::known_bits(4, 0b1010, 0b0101));
  EXPECT_EQ(beta(Domain::URange, BitVec(4, 6)), ur(4, 6, 6));
  for (Domain d : kDomains)
    for (uint64_t c = 0; c < 16; ++c)
      EXPECT_EQ(gamma_of(beta(d, BitVec(4, c))), std::set<uint64_t>{c});
  EXPECT_TRUE(contains(AbstractValue::known_bits(4, 0b1000, 0b0001), BitVec(4, 0b0011)));
  EXPECT_FALSE(contains(ur(4, 4, 7), BitVec(4, 9)));
  for (uint64_t c = 0; c < 16; ++c)
    for (Domain d : kDomains)
      EXPECT_FALSE(contains(AbstractValue::bottom(d, 4), BitVec(4, c)));
}

TEST(Domains, ContainsMatchesReferenceGamma) {
  for (Domain d : kDomains)
    for (unsigned w = 1; w <= 4; ++w)
      for (const AbstractValue &a : enumerate(d, w))
        EXPECT_EQ(gamma_of(a), ref::gamma(ref::from(a))) << to_string(a);
}

TEST(Domains, Size) {
  EXPECT_EQ(size(kb("01?1?00?")), 3u);
  EXPECT_EQ(size(ur(8, 15, 45)), 4u);
  for (Domain d : kDomains)
    for (uint64_t c = 0; c < 16; ++c)
      EXPECT_EQ(size(beta(d, BitVec(4, c))), 0u);
  for (Domain d : kDomains)
    for (unsigned w = 1; w <= 4; ++w)
      for (const AbstractValue &a : enumerate(d, w))
        EXPECT_EQ(size(a), ref::size(ref::from(a))) << to_string(a);
  EXPECT_EQ(size(top(Domain::URange, 64)), 63u);
  EXPECT_EQ(size(top(Domain::KnownBits, 64)), 64u);
}

TEST(Domains, EnumerationCounts) {
  std::size_t kb_total = 0, ur_total = 0, sr_total = 0;
  for (unsigned w = 1; w <= 4; ++w) {
    kb_total += enumerate(Domain::KnownBits, w).size();
    ur_total += enumerate(Domain::URange, w).size();
    sr_total += enumerate(Domain::SRange, w).size();
  }
  EXPECT_EQ(kb_total, 120u);
  EXPECT_EQ(ur_total, 185u);
  EXPECT_EQ(sr_total, 185u);
  std::set<std::string> w1;
  for (const AbstractValue &a : enumerate(Domain::KnownBits, 1))
    w1.insert(to_string(a));
  EXPECT_EQ(w1, (std::set<std::string>{"0", "1", "?"}));
}

TEST(Domains, EnumerationMatchesReference) {
  for (Domain d : kDomains)
    for (unsigned w = 1; w <= 3; ++w) {
      std::set<std::set<uint64_t>> mine, theirs;
      for (const AbstractValue &a : enumerate(d, w))
        mine.insert(gamma_of(a));
      for (const ref::Value &v : ref::all_values(d, w))
        theirs.insert(ref::gamma(v));
      EXPECT_EQ(mine, theirs);
      EXPECT_EQ(mine.size(), enumerate(d, w).size()) << "duplicates in enumeration";
    }
}

TEST(Domains, MeetJoinLeqAgainstSets) {
  for (Domain d : kDomains) {
    const auto values = enumerate(d, 3);
    for (const AbstractValue &a : values)
      for (const AbstractValue &b : values) {
        const auto ga = gamma_of(a), gb = gamma_of(b);
        std::set<uint64_t> inter, uni;
        uni.insert(ga.begin(), ga.end());
        uni.insert(gb.begin(), gb.end());
        for (uint64_t c : ga)
          if (gb.count(c))
            inter.insert(c);
        // Meet and join on these domains are the best abstractions of the set operations.
        EXPECT_EQ(gamma_of(meet(a, b)), ref::gamma(ref::alpha(d, 3, inter))) << to_string(a) << " " << to_string(b);
        EXPECT_EQ(gamma_of(join(a, b)), ref::gamma(ref::alpha(d, 3, uni))) << to_string(a) << " " << to_string(b);
        const bool subset = std::includes(gb.begin(), gb.end(), ga.begin(), ga.end());
        EXPECT_EQ(leq(a, b), subset) << to_string(a) << " " << to_string(b);
      }
  }
}

TEST(Domains, SignedRangeOrdering) {
  const AbstractValue a = sr(4, -3, 2);
  EXPECT_TRUE(contains(a, BitVec(4, 0b1101)));
  EXPECT_FALSE(contains(a, BitVec(4, 0b0111)));
  EXPECT_EQ(size(a), 2u);
  EXPECT_EQ(to_string(a), "[-3,2]");
}

TEST(Domains, ParsePrintRoundTrip) {
  for (Domain d : kDomains)
    for (unsigned w = 1; w <= 4; ++w)
      for (const AbstractValue &a : enumerate(d, w)) {
        const auto back = parse_abstract_value(to_string(a), d, w);
        ASSERT_TRUE(back) << to_string(a);
        EXPECT_EQ(*back, a);
      }
  EXPECT_FALSE(parse_abstract_value("01x", Domain::KnownBits, 3));
  EXPECT_FALSE(parse_abstract_value("[3,1]", Domain::URange, 4));
  EXPECT_TRUE(parse_abstract_value("bottom", Domain::URange, 4)->is_bottom());
}

TEST(Domains, SamplingInvariantsAndFrequencies) {
  Rng rng(3);
  std::map<std::string, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    ++counts[to_string(sample(Domain::KnownBits, 1, rng))];
  // Chi-square with two degrees of freedom; 13.8 is the 0.999 quantile.
  double chi = 0;
  for (const char *k : {"0", "1", "?"}) {
    const double e = n / 3.0;
    chi += (counts[k] - e) * (counts[k] - e) / e;
  }
  EXPECT_LT(chi, 13.8);

  int singletons = 0;
  for (int i = 0; i < n; ++i) {
    const AbstractValue a = sample(Domain::URange, 4, rng);
    ASSERT_FALSE(a.is_bottom());
    ASSERT_LE(a.lo(), a.hi());
    singletons += a.lo() == a.hi();
  }
  const double p = static_cast<double>(singletons) / n;
  EXPECT_NEAR(p, 1.0 / 16, 4 * std::sqrt((1.0 / 16) * (15.0 / 16) / n));

  for (Domain d : kDomains)
    for (unsigned w : {1u, 5u, 33u, 64u})
      for (int i = 0; i < 2000; ++i) {
        const AbstractValue a = sample(d, w, rng);
        ASSERT_FALSE(a.is_bottom());
        ASSERT_EQ(a.field0() & ~width_mask(w), 0u);
        ASSERT_EQ(a.field1() & ~width_mask(w), 0u);
        const uint64_t c = sample_concrete(a, rng);
        ASSERT_TRUE(contains(a, BitVec(w, c)));
      }
}

TEST(Domains, ConcretizationSizeAndIteration) {
  for (Domain d : kDomains)
    for (const AbstractValue &a : enumerate(d, 4)) {
      std::set<uint64_t> seen;
      for_each_concrete(a, [&](uint64_t c) {
        seen.insert(c);
        return true;
      });
      EXPECT_EQ(seen, gamma_of(a));
      EXPECT_EQ(concretization_size(a), seen.size());
    }
}
