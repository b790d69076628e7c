#include "xsynth/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace xsynth {

bool SearchConfig::valid() const {
  return n_step >= 1 && temperature > 0 && lambda_function >= 0 && kappa_function >= 0 && lambda_condition >= 0 &&
         kappa_condition >= 0 && abduction_fraction >= 0 && abduction_fraction <= 1 && chains >= 1 &&
         function_length >= 1 && condition_length >= 1;
}

double cost(double soundness, double improvement, double lambda, double kappa) {
  return lambda * (1.0 - soundness) + kappa * (1.0 - improvement);
}

bool metropolis_accept(double current_cost, double proposed_cost, double temperature, Rng &rng) {
  const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return current_cost - proposed_cost > temperature * std::log(p);
}

ScoringContext make_context(const TestSuite &suite, const SuiteOutputs &g_meet, const CaseMask &imprecise) {
  ScoringContext ctx;
  ctx.suite = &suite;
  ctx.g_meet = &g_meet;
  ctx.imprecise = &imprecise;
  ctx.g_norm = norm(g_meet, suite, &imprecise);
  return ctx;
}

namespace {

/// Accumulates both scores in one pass. `pick` yields the candidate's
/// fields for a row.
template <class Pick> Scores fused_scores(const ScoringContext &ctx, Pick pick) {
  const TestSuite &suite = *ctx.suite;
  const SuiteOutputs &g = *ctx.g_meet;
  const Domain d = suite.domain;
  uint64_t sound = 0, gain = 0, total = 0;
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi) {
    const WidthGroup &grp = suite.groups[gi];
    const unsigned w = grp.width;
    const uint8_t *mask = (*ctx.imprecise)[gi].data();
    total += grp.inputs.size;
    for (std::size_t r = 0; r < grp.inputs.size; ++r) {
      uint64_t f0, f1;
      pick(gi, r, f0, f1);
      if (!raw_leq(d, w, grp.best.f0[r], grp.best.f1[r], f0, f1))
        continue;
      ++sound;
      if (!mask[r])
        continue;
      uint64_t m0 = 0, m1 = 0;
      raw_meet(d, w, f0, f1, g[gi].f0[r], g[gi].f1[r], m0, m1);
      gain += raw_size(d, w, g[gi].f0[r], g[gi].f1[r]) - raw_size(d, w, m0, m1);
    }
  }
  Scores s;
  s.soundness = total == 0 ? 1.0 : static_cast<double>(sound) / static_cast<double>(total);
  s.improvement = ctx.g_norm == 0 ? 0.0 : static_cast<double>(gain) / static_cast<double>(ctx.g_norm);
  return s;
}

} // namespace

Scores Scorer::score_outputs(const SuiteOutputs &f) const {
  return fused_scores(ctx_, [&](std::size_t gi, std::size_t r, uint64_t &f0, uint64_t &f1) {
    f0 = f[gi].f0[r];
    f1 = f[gi].f1[r];
  });
}

Scores Scorer::score(const Transformer &t) {
  const TestSuite &suite = *ctx_.suite;
  out_.resize(suite.groups.size());
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi)
    ev_.run(t, suite.groups[gi].inputs, out_[gi]);
  return score_outputs(out_);
}

Scores Scorer::score_guarded(const Program &condition, const SuiteOutputs &body) {
  const TestSuite &suite = *ctx_.suite;
  std::vector<std::vector<uint8_t>> conds(suite.groups.size());
  for (std::size_t gi = 0; gi < suite.groups.size(); ++gi)
    ev_.run_condition(condition, suite.groups[gi].inputs, conds[gi]);
  std::vector<AbstractValue> tops;
  for (const WidthGroup &g : suite.groups)
    tops.push_back(top(suite.domain, g.width));
  return fused_scores(ctx_, [&](std::size_t gi, std::size_t r, uint64_t &f0, uint64_t &f1) {
    if (conds[gi][r]) {
      f0 = body[gi].f0[r];
      f1 = body[gi].f1[r];
    } else {
      f0 = tops[gi].field0();
      f1 = tops[gi].field1();
    }
  });
}

Candidate init_for_kind(CandidateKind &kind, std::span<const Program> pool, Domain domain, unsigned arity,
                        const OpcodeSampler &sampler, const SearchConfig &cfg, Rng &rng) {
  if (kind == CandidateKind::Abduction && pool.empty())
    kind = CandidateKind::Plain;
  Candidate c;
  if (kind == CandidateKind::Plain) {
    c.transformer.body = init_random(domain, arity, ProgramKind::Transformer, sampler, rng, cfg.function_length);
    return c;
  }
  const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
  c.transformer.body = pool[pick];
  c.transformer.condition = init_random(domain, arity, ProgramKind::Condition, sampler, rng, cfg.condition_length);
  return c;
}

namespace {

class Tracker {
public:
  explicit Tracker(unsigned k) : k_(k) {}

  void offer(const Candidate &c, ChainResult &res) {
    if (c.soundness >= 1.0 && (!res.found_sound || c.cost < res.best_sound.cost)) {
      res.best_sound = c;
      res.found_sound = true;
    }
    if (k_ == 0)
      return;
    if (res.top.size() == k_ && c.cost >= res.top.back().cost)
      return;
    const Transformer compact = compacted(c.transformer);
    for (const Candidate &o : res.top)
      if (o.transformer == compact)
        return;
    Candidate kept = c;
    kept.transformer = compact;
    const auto at = std::upper_bound(res.top.begin(), res.top.end(), kept.cost,
                                     [](double v, const Candidate &o) { return v < o.cost; });
    res.top.insert(at, std::move(kept));
    if (res.top.size() > k_)
      res.top.pop_back();
  }

  static Transformer compacted(const Transformer &t) {
    Transformer out{t.body.compacted(), std::nullopt};
    if (t.condition)
      out.condition = t.condition->compacted();
    return out;
  }

private:
  unsigned k_;
};

} // namespace

ChainResult mcmc_run(CandidateKind kind, Candidate init, const ScoringContext &ctx, const SearchConfig &cfg,
                     const OpcodeSampler &sampler, Rng &rng) {
  ChainResult res;
  res.kind = kind;
  Scorer scorer(ctx);
  const bool abduct = kind == CandidateKind::Abduction;
  assert(!abduct || init.transformer.condition);
  const double lambda = abduct ? cfg.lambda_condition : cfg.lambda_function;
  const double kappa = abduct ? cfg.kappa_condition : cfg.kappa_function;

  SuiteOutputs body_out;
  if (abduct) {
    BatchEvaluator ev;
    body_out = evaluate(Transformer{init.transformer.body, std::nullopt}, *ctx.suite, ev);
  }
  auto score = [&](const Transformer &t) {
    return abduct ? scorer.score_guarded(*t.condition, body_out) : scorer.score(t);
  };
  auto fill = [&](Candidate &c) {
    const Scores s = score(c.transformer);
    c.soundness = s.soundness;
    c.improvement = s.improvement;
    c.cost = cost(s.soundness, s.improvement, lambda, kappa);
  };

  Tracker tracker(cfg.top_k);
  const Program initial_body = init.transformer.body;
  Candidate cur = std::move(init);
  fill(cur);
  tracker.offer(cur, res);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (unsigned step = 0; step < cfg.n_step; ++step) {
    Candidate prop;
    if (abduct) {
      prop.transformer.body = cur.transformer.body;
      prop.transformer.condition = mutate(*cur.transformer.condition, sampler, rng);
    } else {
      prop.transformer.body = mutate(cur.transformer.body, sampler, rng);
    }
    fill(prop);
    ++res.proposals;
    if (abduct && !(prop.transformer.body == initial_body))
      res.body_fixed = false;
    tracker.offer(prop, res);
    if (metropolis_accept(cur.cost, prop.cost, cfg.temperature, rng)) {
      cur = std::move(prop);
      ++res.accepted;
    }
    if (cfg.recheck_fraction > 0 && unit(rng) < cfg.recheck_fraction) {
      Scorer fresh(ctx);
      const Scores s = abduct ? fresh.score_guarded(*cur.transformer.condition, body_out)
                              : fresh.score(cur.transformer);
      ++res.rechecks;
      if (s.soundness != cur.soundness || s.improvement != cur.improvement)
        ++res.recheck_mismatches;
    }
  }

  if (!res.found_sound) {
    res.best_sound.transformer = Transformer{top_program(ctx.suite->domain, ctx.suite->arity()), std::nullopt};
    const Scores s = scorer.score(res.best_sound.transformer);
    res.best_sound.soundness = s.soundness;
    res.best_sound.improvement = s.improvement;
    res.best_sound.cost = cost(s.soundness, s.improvement, lambda, kappa);
  } else {
    res.best_sound.transformer = Tracker::compacted(res.best_sound.transformer);
  }
  return res;
}

std::vector<ChainResult> run_chains(std::span<const ChainTask> tasks, std::span<const Program> pool, Domain domain,
                                    unsigned arity, const ScoringContext &ctx, const SearchConfig &cfg,
                                    const OpcodeSampler &sampler, Deadline deadline) {
  std::vector<ChainResult> results(tasks.size());
  auto work = [&](std::size_t i) {
    if (std::chrono::steady_clock::now() >= deadline) {
      results[i].kind = tasks[i].kind;
      results[i].skipped = true;
      results[i].best_sound.transformer = Transformer{top_program(domain, arity), std::nullopt};
      return;
    }
    Rng rng(tasks[i].seed);
    CandidateKind kind = tasks[i].kind;
    Candidate init = init_for_kind(kind, pool, domain, arity, sampler, cfg, rng);
    results[i] = mcmc_run(kind, std::move(init), ctx, cfg, sampler, rng);
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      work(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool_threads;
  for (unsigned t = 0; t < threads; ++t)
    pool_threads.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++)
        work(i);
    });
  for (auto &th : pool_threads)
    th.join();
  return results;
}

OpWeights update_weights(std::span<const Transformer> fs) {
  OpWeights w;
  auto count = [&](const Program &p) {
    for (const Instruction &ins : p.body())
      w[ins.op] += 1.0;
  };
  for (const Transformer &t : fs) {
    count(t.body);
    if (t.condition)
      count(*t.condition);
  }
  return w;
}

uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b) {
  auto mix = [](uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0x632be59bd9b4e019ull));
}

} // namespace xsynth
