#include "xsynth/synthesizer.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>

namespace xsynth {

std::vector<Transformer> SynthesisResult::transformers() const {
  std::vector<Transformer> out;
  for (const Member &m : members)
    out.push_back(m.named.transformer);
  return out;
}

std::vector<NamedTransformer> SynthesisResult::named() const {
  std::vector<NamedTransformer> out;
  for (const Member &m : members)
    out.push_back(m.named);
  return out;
}

TestSuite load_or_gen_suite(OpId op, Domain domain, const SuitePolicy &policy, uint64_t seed,
                            const std::string &cache_dir) {
  TestSuite suite;
  if (!cache_dir.empty()) {
    const std::string path = (std::filesystem::path(cache_dir) / suite_cache_name(op, domain, policy, seed)).string();
    if (load_suite(path, op, domain, policy, seed, suite))
      return suite;
    suite = gen_suite(op, domain, policy, seed);
    std::filesystem::create_directories(cache_dir);
    save_suite(suite, path);
    return suite;
  }
  return gen_suite(op, domain, policy, seed);
}

namespace {

uint64_t set_norm(std::span<const Transformer> set, const TestSuite &suite, BatchEvaluator &ev) {
  return norm(evaluate_meet(set, suite, ev), suite);
}

} // namespace

unsigned remove_redundant(std::vector<Member> &members, const TestSuite &suite) {
  BatchEvaluator ev;
  unsigned removed = 0;
  std::vector<Transformer> all;
  for (const Member &m : members)
    all.push_back(m.named.transformer);
  uint64_t full = set_norm(all, suite, ev);
  for (std::size_t i = 0; i < members.size() && members.size() > 1;) {
    std::vector<Transformer> rest;
    for (std::size_t j = 0; j < members.size(); ++j)
      if (j != i)
        rest.push_back(members[j].named.transformer);
    if (set_norm(rest, suite, ev) == full) {
      members.erase(members.begin() + static_cast<std::ptrdiff_t>(i));
      ++removed;
    } else {
      ++i;
    }
  }
  return removed;
}

bool is_non_redundant(std::span<const Transformer> set, const TestSuite &suite) {
  if (set.size() <= 1)
    return true;
  BatchEvaluator ev;
  const uint64_t full = set_norm(set, suite, ev);
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::vector<Transformer> rest;
    for (std::size_t j = 0; j < set.size(); ++j)
      if (j != i)
        rest.push_back(set[j]);
    if (set_norm(rest, suite, ev) == full)
      return false;
  }
  return true;
}

namespace {

struct PoolEntry {
  Program body;
  double improvement = 0;
};

void offer_pool(std::vector<PoolEntry> &pool, const Candidate &c, unsigned cap) {
  if (c.transformer.condition || c.soundness >= 1.0 || c.improvement <= 0)
    return;
  for (const PoolEntry &p : pool)
    if (p.body == c.transformer.body)
      return;
  if (pool.size() < cap) {
    pool.push_back({c.transformer.body, c.improvement});
    return;
  }
  auto worst = std::min_element(pool.begin(), pool.end(),
                                [](const PoolEntry &a, const PoolEntry &b) { return a.improvement < b.improvement; });
  if (worst != pool.end() && c.improvement > worst->improvement)
    *worst = {c.transformer.body, c.improvement};
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char &ch : out)
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

} // namespace

SynthesisResult synthesize(OpId op, Domain domain, const SynthesisConfig &cfg) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const Deadline deadline =
      cfg.time_budget > 0
          ? start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_budget))
          : Deadline::max();
  const unsigned arity = op_arity(op);
  const uint64_t seed = cfg.search.seed;

  SynthesisResult result;
  SynthesisReport &rep = result.report;
  rep.op = op;
  rep.domain = domain;
  rep.config = cfg;

  const TestSuite suite = load_or_gen_suite(op, domain, cfg.suite, derive_seed(seed, 0x5517e, 0), cfg.cache_dir);
  BatchEvaluator ev;
  rep.suite_cases = suite.size();
  rep.top_norm = norm(top_outputs(suite), suite);
  rep.best_norm = norm(best_outputs(suite), suite);

  std::vector<Member> members;
  std::vector<PoolEntry> pool;
  auto member_set = [&] {
    std::vector<Transformer> s;
    for (const Member &m : members)
      s.push_back(m.named.transformer);
    return s;
  };

  SuiteOutputs g = evaluate_meet(member_set(), suite, ev);
  unsigned stall = 0;
  rep.stop_reason = "max_outer";
  for (unsigned it = 0; it < cfg.max_outer; ++it) {
    if (Clock::now() >= deadline) {
      rep.stop_reason = "time_budget";
      break;
    }
    const auto it_start = Clock::now();
    CaseMask imprecise = imprecise_subset(suite, g);
    if (mask_count(imprecise) == 0) {
      rep.stop_reason = "converged";
      break;
    }
    IterationLog log;
    log.iteration = it;
    log.seed = derive_seed(seed, it, 0xc4a1);
    log.imprecise_cases = static_cast<unsigned>(mask_count(imprecise));
    log.norm_before = norm(g, suite);

    const std::vector<Transformer> current = member_set();
    const OpWeights weights = update_weights(current);
    for (Opcode o : all_opcodes())
      if (cfg.dsl.contains(o))
        log.weights[std::string(opcode_name(o))] = weights[o];
    const OpcodeSampler sampler(weights, cfg.dsl);
    const ScoringContext ctx = make_context(suite, g, imprecise);

    const unsigned n = cfg.search.chains;
    const unsigned n_abd =
        cfg.abduction ? static_cast<unsigned>(std::lround(cfg.search.abduction_fraction * n)) : 0;
    std::vector<ChainTask> tasks;
    for (unsigned i = 0; i < n; ++i)
      tasks.push_back({i < n - n_abd ? CandidateKind::Plain : CandidateKind::Abduction, derive_seed(seed, it, i)});
    std::vector<Program> bodies;
    for (const PoolEntry &p : pool)
      bodies.push_back(p.body);
    const std::vector<ChainResult> results =
        run_chains(tasks, bodies, domain, arity, ctx, cfg.search, sampler, deadline);

    std::vector<Candidate> sound;
    auto offer_sound = [&](const Candidate &c) {
      if (c.soundness < 1.0 || c.improvement <= 0)
        return;
      for (const Candidate &o : sound)
        if (o.transformer == c.transformer)
          return;
      sound.push_back(c);
    };
    for (const ChainResult &r : results) {
      if (r.skipped) {
        ++log.skipped_chains;
        continue;
      }
      (r.kind == CandidateKind::Abduction ? log.abduction_chains : log.plain_chains) += 1;
      log.proposals += r.proposals;
      log.accepted += r.accepted;
      log.rechecks += r.rechecks;
      log.recheck_mismatches += r.recheck_mismatches;
      if (r.found_sound)
        offer_sound(r.best_sound);
      for (const Candidate &c : r.top) {
        offer_sound(c);
        offer_pool(pool, c, cfg.pool_cap);
      }
    }
    std::stable_sort(sound.begin(), sound.end(), [](const Candidate &a, const Candidate &b) { return a.cost < b.cost; });

    uint64_t current_norm = log.norm_before;
    for (std::size_t k = 0; k < sound.size(); ++k) {
      ++log.candidates;
      const std::string name = "i" + std::to_string(it) + "c" + std::to_string(k);
      const Verdict v = verify(sound[k].transformer, op, domain, cfg.verify, name);
      if (v.kind != VerdictKind::Sound) {
        ++log.rejected;
        continue;
      }
      ++log.verified;
      const SuiteOutputs next = meet_outputs(g, evaluate(sound[k].transformer, suite, ev), suite);
      const uint64_t next_norm = norm(next, suite);
      if (next_norm >= current_norm) {
        ++log.subsumed;
        continue;
      }
      ++log.admitted;
      g = next;
      current_norm = next_norm;
      Member m;
      m.named.transformer = sound[k].transformer;
      m.iteration = it;
      m.exhaustive_widths = v.exhaustive_widths;
      m.sampled_widths = v.sampled_widths;
      members.push_back(std::move(m));
    }

    // Pool scores refer to the previous meet; rescore against the new one.
    imprecise = imprecise_subset(suite, g);
    if (mask_count(imprecise) == 0) {
      pool.clear();
    } else {
      const ScoringContext next_ctx = make_context(suite, g, imprecise);
      Scorer scorer(next_ctx);
      std::vector<PoolEntry> kept;
      for (PoolEntry &p : pool) {
        p.improvement = scorer.score(Transformer{p.body, std::nullopt}).improvement;
        if (p.improvement > 0)
          kept.push_back(std::move(p));
      }
      pool = std::move(kept);
    }
    log.pool_size = static_cast<unsigned>(pool.size());
    log.norm_after = current_norm;
    log.seconds = std::chrono::duration<double>(Clock::now() - it_start).count();
    rep.iterations.push_back(log);

    stall = log.norm_after < log.norm_before ? 0 : stall + 1;
    if (cfg.stall_limit > 0 && stall >= cfg.stall_limit) {
      rep.stop_reason = "stalled";
      break;
    }
    if (mask_count(imprecise) == 0) {
      rep.stop_reason = "converged";
      break;
    }
  }

  rep.removed_redundant = remove_redundant(members, suite);
  if (members.empty()) {
    Member top_member;
    top_member.named.transformer = Transformer{top_program(domain, arity), std::nullopt};
    const Verdict v = verify(top_member.named.transformer, op, domain, cfg.verify, "top");
    top_member.exhaustive_widths = v.exhaustive_widths;
    top_member.sampled_widths = v.sampled_widths;
    members.push_back(std::move(top_member));
  }
  const std::string prefix = lower(op_name(op)) + "_" + std::string(domain_tag(domain)) + "_";
  for (std::size_t i = 0; i < members.size(); ++i)
    members[i].named.name = prefix + std::to_string(i);
  result.members = members;
  rep.members = members;
  const SuiteOutputs final_out = evaluate_meet(result.transformers(), suite, ev);
  rep.final_norm = norm(final_out, suite);
  rep.exact_cases = exact_count(final_out, suite);
  rep.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

} // namespace xsynth
