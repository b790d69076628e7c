#include "xsynth/oracle.hpp"

#include <limits>
#include <sstream>

namespace xsynth {

OpTable::OpTable(OpId op, unsigned width) : width_(width) {
  assert(width <= kMaxWidth);
  const uint64_t n = uint64_t{1} << width;
  table_.resize(n * n);
  for (uint64_t a = 0; a < n; ++a)
    for (uint64_t b = 0; b < n; ++b) {
      const OpResult r = apply_bits(op, a, b, width);
      table_[index(a, b)] = r.ok ? static_cast<uint16_t>(r.value) : kExcluded;
    }
}

namespace {

/// Running join of β(result) over concrete results.
class Hull {
public:
  Hull(Domain d, unsigned w) : d_(d), w_(w) {}

  void add(uint64_t v) {
    if (!any_) {
      any_ = true;
      lo_ = hi_ = v;
    }
    and_ &= v;
    or_ |= v;
    if (d_ == Domain::URange) {
      lo_ = prim::umin(lo_, v);
      hi_ = prim::umax(hi_, v);
    } else if (d_ == Domain::SRange) {
      lo_ = prim::smin(lo_, v, w_);
      hi_ = prim::smax(hi_, v, w_);
    }
  }

  AbstractValue result() const {
    if (!any_)
      return AbstractValue::bottom(d_, w_);
    if (d_ == Domain::KnownBits)
      return AbstractValue::known_bits(w_, ~or_, and_);
    return AbstractValue::from_fields(d_, w_, lo_, hi_);
  }

private:
  Domain d_;
  unsigned w_;
  bool any_ = false;
  uint64_t and_ = ~uint64_t{0}, or_ = 0, lo_ = 0, hi_ = 0;
};

uint64_t tuple_count(std::span<const AbstractValue> inputs) {
  long double total = 1;
  for (const AbstractValue &a : inputs)
    total *= static_cast<long double>(concretization_size(a));
  return total >= 1.8e19L ? std::numeric_limits<uint64_t>::max() : static_cast<uint64_t>(total);
}

} // namespace

AbstractValue best_transformer(OpId op, std::span<const AbstractValue> inputs, uint64_t budget) {
  assert(inputs.size() == op_arity(op));
  if (tuple_count(inputs) > budget)
    throw BudgetExceeded("concretization of " + to_string(inputs[0]) + " exceeds the enumeration budget");
  Hull hull(inputs[0].domain(), inputs[0].width());
  for_each_admissible(op, inputs, [&](uint64_t, uint64_t, uint64_t r) {
    hull.add(r);
    return true;
  });
  return hull.result();
}

AbstractValue best_transformer(const OpTable &table, [[maybe_unused]] OpId op, std::span<const AbstractValue> inputs) {
  assert(inputs.size() == op_arity(op) && inputs[0].width() == table.width());
  Hull hull(inputs[0].domain(), inputs[0].width());
  if (inputs.size() == 1) {
    for_each_concrete(inputs[0], [&](uint64_t a) {
      if (table.ok(a, 0))
        hull.add(table.value(a, 0));
      return true;
    });
  } else {
    for_each_concrete(inputs[0], [&](uint64_t a) {
      for_each_concrete(inputs[1], [&](uint64_t b) {
        if (table.ok(a, b))
          hull.add(table.value(a, b));
        return true;
      });
      return true;
    });
  }
  return hull.result();
}

std::string_view tier_name(Tier t) {
  switch (t) {
  case Tier::Exhaustive: return "exhaustive";
  case Tier::SampledAbstract: return "sampled_abstract";
  case Tier::SampledConcrete: return "sampled_concrete";
  }
  return "";
}

SuitePolicy SuitePolicy::synthesis_defaults() {
  SuitePolicy p;
  p.mid_samples = 100;
  p.large_samples = 200;
  p.large_concrete_samples = 200;
  return p;
}

std::string SuitePolicy::key() const {
  std::ostringstream out;
  out << "ex" << exhaustive_max_width << "-mid";
  for (unsigned w : mid_widths)
    out << w << ".";
  out << "x" << mid_samples << "-large";
  for (unsigned w : large_widths)
    out << w << ".";
  out << "x" << large_samples << "c" << large_concrete_samples << "-r" << resample_factor;
  return out.str();
}

std::size_t TestSuite::size() const {
  std::size_t n = 0;
  for (const WidthGroup &g : groups)
    n += g.inputs.size;
  return n;
}

TestCase TestSuite::test_case(std::size_t group, std::size_t row) const {
  const WidthGroup &g = groups[group];
  TestCase c;
  for (unsigned i = 0; i < arity(); ++i)
    c.inputs.push_back(g.inputs.input(row, i, domain));
  c.exhaustive_concrete = g.tier != Tier::SampledConcrete;
  c.best = AbstractValue::from_fields(domain, g.width, g.best.f0[row], g.best.f1[row]);
  return c;
}

namespace {

WidthGroup new_group(unsigned width, Tier tier, unsigned arity) {
  WidthGroup g;
  g.width = width;
  g.tier = tier;
  g.inputs = ColumnBlock(width, 2 * arity);
  return g;
}

void push_case(WidthGroup &g, std::span<const AbstractValue> inputs, const AbstractValue &best) {
  g.inputs.push(inputs);
  if (best.is_bottom()) {
    const auto [b0, b1] = raw_bottom(best.domain(), best.width());
    g.best.f0.push_back(b0);
    g.best.f1.push_back(b1);
    return;
  }
  g.best.f0.push_back(best.field0());
  g.best.f1.push_back(best.field1());
}

void add_exhaustive(TestSuite &s, unsigned w) {
  WidthGroup g = new_group(w, Tier::Exhaustive, s.arity());
  const OpTable table(s.op, w);
  const std::vector<AbstractValue> values = enumerate(s.domain, w);
  if (s.arity() == 1) {
    for (const AbstractValue &a : values) {
      const AbstractValue in[1] = {a};
      push_case(g, in, best_transformer(table, s.op, in));
    }
  } else {
    for (const AbstractValue &a : values)
      for (const AbstractValue &b : values) {
        const AbstractValue in[2] = {a, b};
        push_case(g, in, best_transformer(table, s.op, in));
      }
  }
  g.inputs.finalize();
  s.groups.push_back(std::move(g));
}

void add_mid(TestSuite &s, unsigned w, Rng &rng) {
  WidthGroup g = new_group(w, Tier::SampledAbstract, s.arity());
  const bool small = w <= OpTable::kMaxWidth;
  const std::optional<OpTable> table = small ? std::optional<OpTable>(OpTable(s.op, w)) : std::nullopt;
  const uint64_t max_draws = uint64_t{s.policy.mid_samples} * s.policy.resample_factor;
  std::vector<AbstractValue> in(s.arity());
  for (uint64_t draws = 0; g.inputs.size < s.policy.mid_samples && draws < max_draws; ++draws) {
    for (auto &a : in)
      a = sample(s.domain, w, rng);
    AbstractValue best;
    if (table) {
      best = best_transformer(*table, s.op, in);
    } else {
      try {
        best = best_transformer(s.op, in);
      } catch (const BudgetExceeded &) {
        ++g.skipped;
        continue;
      }
    }
    if (best.is_bottom()) {
      ++g.skipped;
      continue;
    }
    push_case(g, in, best);
  }
  g.inputs.finalize();
  s.groups.push_back(std::move(g));
}

void add_large(TestSuite &s, unsigned w, Rng &rng) {
  WidthGroup g = new_group(w, Tier::SampledConcrete, s.arity());
  g.concrete_samples = s.policy.large_concrete_samples;
  std::vector<AbstractValue> in(s.arity());
  for (unsigned draw = 0; draw < s.policy.large_samples; ++draw) {
    for (auto &a : in)
      a = sample(s.domain, w, rng);
    Hull hull(s.domain, w);
    for (unsigned k = 0; k < s.policy.large_concrete_samples; ++k) {
      const uint64_t c0 = sample_concrete(in[0], rng);
      const uint64_t c1 = in.size() > 1 ? sample_concrete(in[1], rng) : 0;
      const OpResult r = apply_bits(s.op, c0, c1, w);
      if (r.ok)
        hull.add(r.value);
    }
    const AbstractValue best = hull.result();
    if (best.is_bottom()) {
      ++g.skipped;
      continue;
    }
    push_case(g, in, best);
  }
  g.inputs.finalize();
  s.groups.push_back(std::move(g));
}

} // namespace

TestSuite gen_suite(OpId op, Domain domain, const SuitePolicy &policy, uint64_t seed) {
  TestSuite s;
  s.op = op;
  s.domain = domain;
  s.policy = policy;
  s.seed = seed;
  Rng rng(seed);
  for (unsigned w = 1; w <= policy.exhaustive_max_width; ++w)
    add_exhaustive(s, w);
  for (unsigned w : policy.mid_widths)
    add_mid(s, w, rng);
  for (unsigned w : policy.large_widths)
    add_large(s, w, rng);
  return s;
}

WidthGroup make_group(OpId op, [[maybe_unused]] Domain domain, unsigned width, std::span<const std::vector<AbstractValue>> cases) {
  WidthGroup g = new_group(width, Tier::SampledAbstract, op_arity(op));
  const OpTable table(op, width);
  for (const auto &in : cases) {
    assert(in.size() == op_arity(op) && in[0].domain() == domain);
    push_case(g, in, best_transformer(table, op, in));
  }
  g.inputs.finalize();
  return g;
}

// ---------------------------------------------------------------------------

SuiteOutputs evaluate(const Transformer &t, const TestSuite &suite, BatchEvaluator &ev) {
  SuiteOutputs out(suite.groups.size());
  for (std::size_t i = 0; i < suite.groups.size(); ++i)
    ev.run(t, suite.groups[i].inputs, out[i]);
  return out;
}

SuiteOutputs evaluate_meet(std::span<const Transformer> set, const TestSuite &suite, BatchEvaluator &ev) {
  SuiteOutputs acc = top_outputs(suite);
  for (const Transformer &t : set)
    acc = meet_outputs(acc, evaluate(t, suite, ev), suite);
  return acc;
}

SuiteOutputs evaluate_fn(const TransformerFn &f, const TestSuite &suite) {
  SuiteOutputs out(suite.groups.size());
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const WidthGroup &g = suite.groups[gi];
    std::vector<AbstractValue> in(suite.arity());
    for (std::size_t r = 0; r < g.inputs.size; ++r) {
      for (unsigned a = 0; a < suite.arity(); ++a)
        in[a] = g.inputs.input(r, a, suite.domain);
      const AbstractValue v = f(in);
      if (v.is_bottom()) {
        const auto [b0, b1] = raw_bottom(suite.domain, g.width);
        out[gi].f0.push_back(b0);
        out[gi].f1.push_back(b1);
      } else {
        out[gi].f0.push_back(v.field0());
        out[gi].f1.push_back(v.field1());
      }
    }
  }
  return out;
}

SuiteOutputs top_outputs(const TestSuite &suite) {
  SuiteOutputs out(suite.groups.size());
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const WidthGroup &g = suite.groups[gi];
    const AbstractValue t = top(suite.domain, g.width);
    out[gi].f0.assign(g.inputs.size, t.field0());
    out[gi].f1.assign(g.inputs.size, t.field1());
  }
  return out;
}

SuiteOutputs best_outputs(const TestSuite &suite) {
  SuiteOutputs out;
  for (const WidthGroup &g : suite.groups)
    out.push_back(g.best);
  return out;
}

SuiteOutputs meet_outputs(const SuiteOutputs &a, const SuiteOutputs &b, const TestSuite &suite) {
  SuiteOutputs out(suite.groups.size());
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const unsigned w = suite.groups[gi].width;
    const std::size_t n = suite.groups[gi].inputs.size;
    out[gi].f0.resize(n);
    out[gi].f1.resize(n);
    for (std::size_t r = 0; r < n; ++r)
      raw_meet(suite.domain, w, a[gi].f0[r], a[gi].f1[r], b[gi].f0[r], b[gi].f1[r], out[gi].f0[r], out[gi].f1[r]);
  }
  return out;
}

bool sound_at(const TestSuite &suite, const SuiteOutputs &f, std::size_t gi, std::size_t r) {
  const WidthGroup &g = suite.groups[gi];
  return raw_leq(suite.domain, g.width, g.best.f0[r], g.best.f1[r], f[gi].f0[r], f[gi].f1[r]);
}

double soundness_score(const SuiteOutputs &f, const TestSuite &suite) {
  const std::size_t total = suite.size();
  if (total == 0)
    return 1.0;
  std::size_t sound = 0;
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi)
    for (std::size_t r = 0; r < suite.groups[gi].inputs.size; ++r)
      sound += sound_at(suite, f, gi, r);
  return static_cast<double>(sound) / static_cast<double>(total);
}

double improvement_score(const SuiteOutputs &f, const SuiteOutputs &g, const TestSuite &suite,
                         const CaseMask *subset) {
  const Domain d = suite.domain;
  uint64_t gain = 0, base = 0;
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const unsigned w = suite.groups[gi].width;
    for (std::size_t r = 0; r < suite.groups[gi].inputs.size; ++r) {
      if (subset && !(*subset)[gi][r])
        continue;
      const unsigned gs = raw_size(d, w, g[gi].f0[r], g[gi].f1[r]);
      base += gs;
      if (!sound_at(suite, f, gi, r))
        continue;
      uint64_t m0 = 0, m1 = 0;
      raw_meet(d, w, f[gi].f0[r], f[gi].f1[r], g[gi].f0[r], g[gi].f1[r], m0, m1);
      gain += gs - raw_size(d, w, m0, m1);
    }
  }
  return base == 0 ? 0.0 : static_cast<double>(gain) / static_cast<double>(base);
}

uint64_t norm(const SuiteOutputs &f, const TestSuite &suite, const CaseMask *subset) {
  uint64_t total = 0;
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const unsigned w = suite.groups[gi].width;
    for (std::size_t r = 0; r < suite.groups[gi].inputs.size; ++r)
      if (!subset || (*subset)[gi][r])
        total += raw_size(suite.domain, w, f[gi].f0[r], f[gi].f1[r]);
  }
  return total;
}

namespace {

bool same_element(Domain d, unsigned w, uint64_t a0, uint64_t a1, uint64_t b0, uint64_t b1) {
  const bool ab = raw_is_bottom(d, w, a0, a1), bb = raw_is_bottom(d, w, b0, b1);
  if (ab || bb)
    return ab == bb;
  return a0 == b0 && a1 == b1;
}

} // namespace

CaseMask imprecise_subset(const TestSuite &suite, const SuiteOutputs &g) {
  CaseMask m(suite.groups.size());
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const WidthGroup &grp = suite.groups[gi];
    m[gi].resize(grp.inputs.size);
    for (std::size_t r = 0; r < grp.inputs.size; ++r)
      m[gi][r] = !same_element(suite.domain, grp.width, g[gi].f0[r], g[gi].f1[r], grp.best.f0[r], grp.best.f1[r]);
  }
  return m;
}

std::size_t mask_count(const CaseMask &m) {
  std::size_t n = 0;
  for (const auto &g : m)
    for (uint8_t b : g)
      n += b;
  return n;
}

std::size_t exact_count(const SuiteOutputs &f, const TestSuite &suite) {
  std::size_t n = 0;
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const WidthGroup &grp = suite.groups[gi];
    for (std::size_t r = 0; r < grp.inputs.size; ++r)
      n += same_element(suite.domain, grp.width, f[gi].f0[r], f[gi].f1[r], grp.best.f0[r], grp.best.f1[r]);
  }
  return n;
}

bool pointwise_leq(const SuiteOutputs &a, const SuiteOutputs &b, const TestSuite &suite) {
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const unsigned w = suite.groups[gi].width;
    for (std::size_t r = 0; r < suite.groups[gi].inputs.size; ++r)
      if (!raw_leq(suite.domain, w, a[gi].f0[r], a[gi].f1[r], b[gi].f0[r], b[gi].f1[r]))
        return false;
  }
  return true;
}

bool pointwise_equal(const SuiteOutputs &a, const SuiteOutputs &b, const TestSuite &suite) {
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const unsigned w = suite.groups[gi].width;
    for (std::size_t r = 0; r < suite.groups[gi].inputs.size; ++r)
      if (!same_element(suite.domain, w, a[gi].f0[r], a[gi].f1[r], b[gi].f0[r], b[gi].f1[r]))
        return false;
  }
  return true;
}

} // namespace xsynth
