#include <json.hpp>

#include "xsynth/synthesizer.hpp"

namespace xsynth {

namespace {

using nlohmann::ordered_json;

ordered_json config_json(const SynthesisConfig &c) {
  ordered_json j;
  j["seed"] = c.search.seed;
  j["chains"] = c.search.chains;
  j["inner_steps"] = c.search.n_step;
  j["outer_iters"] = c.max_outer;
  j["time_budget"] = c.time_budget;
  j["stall_limit"] = c.stall_limit;
  j["abduction"] = c.abduction;
  j["abduction_fraction"] = c.search.abduction_fraction;
  j["temperature"] = c.search.temperature;
  j["lambda_function"] = c.search.lambda_function;
  j["kappa_function"] = c.search.kappa_function;
  j["lambda_condition"] = c.search.lambda_condition;
  j["kappa_condition"] = c.search.kappa_condition;
  j["function_length"] = c.search.function_length;
  j["condition_length"] = c.search.condition_length;
  j["top_k"] = c.search.top_k;
  j["pool_cap"] = c.pool_cap;
  ordered_json ops = ordered_json::array();
  for (Opcode o : all_opcodes())
    if (c.dsl.contains(o))
      ops.push_back(std::string(opcode_name(o)));
  j["opcodes"] = ops;
  j["suite_policy"] = c.suite.key();
  ordered_json v;
  v["exhaustive_max_width"] = c.verify.exhaustive_max_width;
  v["max_width"] = c.verify.max_width;
  v["sampled_tuples"] = c.verify.sampled_tuples;
  v["random_widths"] = c.verify.random_widths;
  v["smt"] = c.verify.smt.emit;
  j["verify"] = v;
  return j;
}

ordered_json iteration_json(const IterationLog &l) {
  ordered_json j;
  j["iteration"] = l.iteration;
  j["seed"] = l.seed;
  j["plain_chains"] = l.plain_chains;
  j["abduction_chains"] = l.abduction_chains;
  j["skipped_chains"] = l.skipped_chains;
  j["proposals"] = l.proposals;
  j["accepted"] = l.accepted;
  j["rechecks"] = l.rechecks;
  j["recheck_mismatches"] = l.recheck_mismatches;
  j["candidates"] = l.candidates;
  j["verified"] = l.verified;
  j["rejected"] = l.rejected;
  j["subsumed"] = l.subsumed;
  j["admitted"] = l.admitted;
  j["pool_size"] = l.pool_size;
  j["imprecise_cases"] = l.imprecise_cases;
  j["norm_before"] = l.norm_before;
  j["norm_after"] = l.norm_after;
  ordered_json w;
  for (const auto &[name, value] : l.weights)
    w[name] = value;
  j["weights"] = w;
  return j;
}

} // namespace

std::string report_json(const SynthesisReport &r) {
  ordered_json j;
  j["format"] = "xsynth-report-1";
  j["op"] = std::string(op_name(r.op));
  j["domain"] = std::string(domain_tag(r.domain));
  j["config"] = config_json(r.config);
  j["suite"] = {{"cases", r.suite_cases}, {"top_norm", r.top_norm}, {"best_norm", r.best_norm}};
  ordered_json its = ordered_json::array();
  for (const IterationLog &l : r.iterations)
    its.push_back(iteration_json(l));
  j["iterations"] = its;
  ordered_json res;
  res["stop_reason"] = r.stop_reason;
  res["final_norm"] = r.final_norm;
  res["exact_cases"] = r.exact_cases;
  res["removed_redundant"] = r.removed_redundant;
  ordered_json members = ordered_json::array();
  for (const Member &m : r.members) {
    ordered_json mj;
    mj["name"] = m.named.name;
    mj["iteration"] = m.iteration;
    mj["guarded"] = m.named.transformer.guarded();
    mj["exhaustive_widths"] = m.exhaustive_widths;
    mj["sampled_widths"] = m.sampled_widths;
    mj["program"] = print_transformer(m.named);
    members.push_back(mj);
  }
  res["members"] = members;
  res["certification"] = r.config.verify.smt.emit
                             ? "exhaustive at small widths, sampled above; solver answers required for wide widths"
                             : "exhaustive at small widths, sampled above; no solver proof for wide widths";
  j["result"] = res;
  ordered_json timing;
  timing["total_seconds"] = r.total_seconds;
  ordered_json secs = ordered_json::array();
  for (const IterationLog &l : r.iterations)
    secs.push_back(l.seconds);
  timing["iteration_seconds"] = secs;
  j["timing"] = timing;
  return j.dump(2) + "\n";
}

} // namespace xsynth
