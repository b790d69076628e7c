#include "xsynth/harness.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace xsynth {

const EvalColumn *EvalRow::column(std::string_view name) const {
  for (const EvalColumn &c : columns)
    if (c.name == name)
      return &c;
  return nullptr;
}

EvalData eval_data(OpId op, Domain domain, std::span<const Transformer> synth,
                   const std::optional<std::vector<Transformer>> &external, const EvalOptions &opts) {
  SuitePolicy policy;
  policy.exhaustive_max_width = 0;
  policy.mid_widths = {opts.exact_width};
  policy.mid_samples = opts.exact_samples;
  policy.large_widths = {opts.norm_width};
  policy.large_samples = opts.norm_samples;
  policy.large_concrete_samples = opts.norm_concrete;
  EvalData d;
  d.suite = gen_suite(op, domain, policy, opts.seed);
  BatchEvaluator ev;
  d.names.push_back("top");
  d.outputs.push_back(top_outputs(d.suite));
  d.names.push_back("synth");
  d.outputs.push_back(evaluate_meet(synth, d.suite, ev));
  if (external) {
    d.names.push_back("external");
    d.outputs.push_back(evaluate_meet(*external, d.suite, ev));
    d.names.push_back("meet");
    d.outputs.push_back(meet_outputs(d.outputs[1], d.outputs[2], d.suite));
  }
  return d;
}

namespace {

bool same_value(Domain d, unsigned w, uint64_t a0, uint64_t a1, uint64_t b0, uint64_t b1) {
  return raw_leq(d, w, a0, a1, b0, b1) && raw_leq(d, w, b0, b1, a0, a1);
}

double percent(std::size_t k, std::size_t n) { return n == 0 ? 0.0 : 100.0 * static_cast<double>(k) / static_cast<double>(n); }

} // namespace

std::vector<EvalRow> eval_rows(const EvalData &data) {
  std::vector<EvalRow> rows;
  const TestSuite &s = data.suite;
  for (std::size_t gi = 0; gi < s.groups.size(); ++gi) {
    const WidthGroup &g = s.groups[gi];
    EvalRow row;
    row.op = s.op;
    row.domain = s.domain;
    row.width = g.width;
    row.metric = g.tier == Tier::SampledConcrete ? "norm" : "exact_pct";
    row.tests = g.inputs.size;
    row.skipped = g.skipped;
    for (std::size_t c = 0; c < data.names.size(); ++c) {
      const OutputColumns &o = data.outputs[c][gi];
      double value = 0;
      if (row.metric == "norm") {
        uint64_t total = 0;
        for (std::size_t r = 0; r < g.inputs.size; ++r)
          total += raw_is_bottom(s.domain, g.width, o.f0[r], o.f1[r]) ? 0 : raw_size(s.domain, g.width, o.f0[r], o.f1[r]);
        value = row.tests == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(row.tests);
      } else {
        std::size_t exact = 0;
        for (std::size_t r = 0; r < g.inputs.size; ++r)
          exact += same_value(s.domain, g.width, o.f0[r], o.f1[r], g.best.f0[r], g.best.f1[r]);
        value = percent(exact, row.tests);
      }
      row.columns.push_back({data.names[c], value});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::vector<uint64_t> members(const ProductValue &p) {
  std::vector<uint64_t> out;
  for_each_concrete(p.kb, [&](uint64_t c) {
    if (raw_contains(p.rng.domain(), p.rng.width(), p.rng.field0(), p.rng.field1(), c))
      out.push_back(c);
    return true;
  });
  return out;
}

std::optional<ProductValue> sample_product(Domain range_domain, unsigned w, Rng &rng) {
  return reduce({sample(Domain::KnownBits, w, rng), sample(range_domain, w, rng)});
}

void apply_sets(ProductCase &pc, std::span<const Transformer> kb_set, std::span<const Transformer> range_set) {
  std::vector<AbstractValue> kbs, rngs;
  for (const ProductValue &p : pc.inputs) {
    kbs.push_back(p.kb);
    rngs.push_back(p.rng);
  }
  pc.kb_only = eval_meet(kb_set, kbs);
  const AbstractValue rng_out = eval_meet(range_set, rngs);
  const std::optional<ProductValue> red = reduce({pc.kb_only, rng_out});
  pc.reduced = red ? red->kb : AbstractValue::bottom(Domain::KnownBits, pc.kb_only.width());
}

} // namespace

ProductData product_data(OpId op, Domain range_domain, std::span<const Transformer> kb_set,
                         std::span<const Transformer> range_set, const ProductOptions &opts) {
  const unsigned arity = op_arity(op);
  ProductData d;
  Rng rng(opts.seed);
  const unsigned limit = 100;

  const OpTable table(op, opts.exact_width);
  for (unsigned draws = 0; d.exact_cases.size() < opts.exact_samples && draws < opts.exact_samples * limit; ++draws) {
    ProductCase pc;
    std::vector<std::vector<uint64_t>> sets;
    bool ok = true;
    for (unsigned a = 0; a < arity && ok; ++a) {
      const std::optional<ProductValue> p = sample_product(range_domain, opts.exact_width, rng);
      ok = p.has_value();
      if (ok) {
        pc.inputs.push_back(*p);
        sets.push_back(members(*p));
      }
    }
    if (!ok) {
      ++d.exact_skipped;
      continue;
    }
    AbstractValue best = AbstractValue::bottom(Domain::KnownBits, opts.exact_width);
    for (uint64_t c0 : sets[0]) {
      if (arity == 1) {
        if (table.ok(c0, 0))
          best = join(best, beta(Domain::KnownBits, BitVec(opts.exact_width, table.value(c0, 0))));
        continue;
      }
      for (uint64_t c1 : sets[1])
        if (table.ok(c0, c1))
          best = join(best, beta(Domain::KnownBits, BitVec(opts.exact_width, table.value(c0, c1))));
    }
    if (best.is_bottom()) {
      ++d.exact_skipped;
      continue;
    }
    pc.best = best;
    apply_sets(pc, kb_set, range_set);
    d.exact_cases.push_back(std::move(pc));
  }

  for (unsigned i = 0; i < opts.norm_samples; ++i) {
    ProductCase pc;
    bool ok = true;
    for (unsigned a = 0; a < arity && ok; ++a) {
      const std::optional<ProductValue> p = sample_product(range_domain, opts.norm_width, rng);
      ok = p.has_value();
      if (ok)
        pc.inputs.push_back(*p);
    }
    // Look for one admissible tuple drawn from the intersected concretizations.
    bool admissible = false;
    for (unsigned k = 0; ok && !admissible && k < opts.norm_probe; ++k) {
      uint64_t c[2] = {0, 0};
      bool inside = true;
      for (unsigned a = 0; a < arity && inside; ++a) {
        const ProductValue &p = pc.inputs[a];
        c[a] = (k & 1) ? sample_concrete(p.rng, rng) : sample_concrete(p.kb, rng);
        inside = contains(p.kb, BitVec(opts.norm_width, c[a])) && contains(p.rng, BitVec(opts.norm_width, c[a]));
      }
      admissible = inside && apply_bits(op, c[0], c[1], opts.norm_width).ok;
    }
    if (!admissible) {
      ++d.norm_skipped;
      continue;
    }
    apply_sets(pc, kb_set, range_set);
    d.norm_cases.push_back(std::move(pc));
  }
  return d;
}

std::vector<EvalRow> product_rows(OpId op, Domain range_domain, const ProductData &data) {
  std::vector<EvalRow> rows;
  auto base = [&](unsigned width, const char *metric, std::size_t tests, uint64_t skipped) {
    EvalRow r;
    r.op = op;
    r.domain = range_domain;
    r.width = width;
    r.metric = metric;
    r.tests = tests;
    r.skipped = skipped;
    return r;
  };
  if (!data.exact_cases.empty()) {
    const unsigned w = data.exact_cases.front().best.width();
    EvalRow r = base(w, "exact_pct", data.exact_cases.size(), data.exact_skipped);
    std::size_t top_n = 0, kb_n = 0, red_n = 0;
    for (const ProductCase &c : data.exact_cases) {
      top_n += c.best.is_top();
      kb_n += leq(c.kb_only, c.best) && leq(c.best, c.kb_only);
      red_n += leq(c.reduced, c.best) && leq(c.best, c.reduced);
    }
    r.columns = {{"top", percent(top_n, r.tests)}, {"kb_only", percent(kb_n, r.tests)},
                 {"reduced", percent(red_n, r.tests)}};
    rows.push_back(std::move(r));
  }
  if (!data.norm_cases.empty()) {
    const unsigned w = data.norm_cases.front().kb_only.width();
    EvalRow r = base(w, "norm", data.norm_cases.size(), data.norm_skipped);
    uint64_t kb_sum = 0, red_sum = 0;
    for (const ProductCase &c : data.norm_cases) {
      kb_sum += size_or_zero(c.kb_only);
      red_sum += size_or_zero(c.reduced);
    }
    const double n = static_cast<double>(r.tests);
    r.columns = {{"top", static_cast<double>(w)}, {"kb_only", static_cast<double>(kb_sum) / n},
                 {"reduced", static_cast<double>(red_sum) / n}};
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_rows(std::span<const EvalRow> rows) {
  std::ostringstream out;
  for (const EvalRow &r : rows) {
    char head[160];
    std::snprintf(head, sizeof head, "%-10s %-3s w=%-2u %-9s tests=%-6zu skipped=%-6llu", std::string(op_name(r.op)).c_str(),
                  std::string(domain_tag(r.domain)).c_str(), r.width, r.metric.c_str(), r.tests,
                  static_cast<unsigned long long>(r.skipped));
    out << head;
    for (const EvalColumn &c : r.columns) {
      char cell[64];
      std::snprintf(cell, sizeof cell, "  %s=%.2f", c.name.c_str(), c.value);
      out << cell;
    }
    out << "\n";
  }
  return out.str();
}

std::string rows_json(std::span<const EvalRow> rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const EvalRow &r : rows) {
    nlohmann::ordered_json j;
    j["op"] = std::string(op_name(r.op));
    j["domain"] = std::string(domain_tag(r.domain));
    j["width"] = r.width;
    j["metric"] = r.metric;
    j["tests"] = r.tests;
    j["skipped"] = r.skipped;
    nlohmann::ordered_json cols;
    for (const EvalColumn &c : r.columns)
      cols[c.name] = c.value;
    j["columns"] = cols;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

} // namespace xsynth
