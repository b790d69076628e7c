#include "xsynth/verify.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "xsynth/batch_eval.hpp"
#include "xsynth/oracle.hpp"

namespace xsynth {

std::string describe(const Witness &w) {
  std::ostringstream out;
  out << "width " << w.width << ": inputs (";
  for (std::size_t i = 0; i < w.inputs.size(); ++i)
    out << (i ? ", " : "") << to_string(w.inputs[i]);
  out << ") concrete (";
  for (std::size_t i = 0; i < w.concrete.size(); ++i)
    out << (i ? ", " : "") << w.concrete[i];
  out << ") result " << w.result << " not in " << to_string(w.output);
  return out.str();
}

std::string_view verdict_name(VerdictKind k) {
  switch (k) {
  case VerdictKind::Sound: return "sound";
  case VerdictKind::Unsound: return "unsound";
  case VerdictKind::Unknown: return "unknown";
  }
  return "";
}

namespace {

/// Σ over abstract values of |γ(a)|, i.e. concrete checks per argument.
long double concrete_mass(Domain d, unsigned w) {
  const long double n = std::ldexp(1.0L, static_cast<int>(w));
  if (d == Domain::KnownBits)
    return std::pow(4.0L, static_cast<long double>(w));
  return n * (n + 1) * (n + 2) / 6;
}

ColumnBlock all_tuples(Domain d, unsigned w, unsigned arity) {
  ColumnBlock block(w, 2 * arity);
  const std::vector<AbstractValue> values = enumerate(d, w);
  if (arity == 1) {
    for (const AbstractValue &a : values) {
      const AbstractValue in[1] = {a};
      block.push(in);
    }
  } else {
    for (const AbstractValue &a : values)
      for (const AbstractValue &b : values) {
        const AbstractValue in[2] = {a, b};
        block.push(in);
      }
  }
  block.finalize();
  return block;
}

ColumnBlock sampled_tuples(Domain d, unsigned w, unsigned arity, unsigned count, Rng &rng) {
  ColumnBlock block(w, 2 * arity);
  std::vector<AbstractValue> in(arity);
  for (unsigned i = 0; i < count; ++i) {
    for (auto &a : in)
      a = sample(d, w, rng);
    block.push(in);
  }
  block.finalize();
  return block;
}

Witness make_witness(const ColumnBlock &block, std::size_t row, unsigned arity, Domain d, uint64_t c0, uint64_t c1,
                     uint64_t result, const OutputColumns &out) {
  Witness w;
  w.width = block.width;
  for (unsigned a = 0; a < arity; ++a)
    w.inputs.push_back(block.input(row, a, d));
  w.concrete.push_back(c0);
  if (arity > 1)
    w.concrete.push_back(c1);
  w.result = result;
  w.output = AbstractValue::from_fields(d, block.width, out.f0[row], out.f1[row]);
  return w;
}

/// Checks every admissible concrete tuple of every row.
std::optional<Witness> check_block_exhaustive(const Transformer &t, OpId op, Domain d, const ColumnBlock &block) {
  const unsigned arity = op_arity(op);
  const unsigned w = block.width;
  BatchEvaluator ev;
  OutputColumns out;
  ev.run(t, block, out);
  const std::optional<OpTable> table = w <= OpTable::kMaxWidth ? std::optional<OpTable>(OpTable(op, w)) : std::nullopt;
  std::vector<AbstractValue> in(arity);
  for (std::size_t r = 0; r < block.size; ++r) {
    for (unsigned a = 0; a < arity; ++a)
      in[a] = block.input(r, a, d);
    std::optional<Witness> found;
    auto check = [&](uint64_t c0, uint64_t c1, uint64_t res) {
      if (raw_contains(d, w, out.f0[r], out.f1[r], res))
        return true;
      found = make_witness(block, r, arity, d, c0, c1, res, out);
      return false;
    };
    if (table) {
      if (arity == 1) {
        for_each_concrete(in[0], [&](uint64_t c0) { return !table->ok(c0, 0) || check(c0, 0, table->value(c0, 0)); });
      } else {
        for_each_concrete(in[0], [&](uint64_t c0) {
          for_each_concrete(in[1],
                            [&](uint64_t c1) { return !table->ok(c0, c1) || check(c0, c1, table->value(c0, c1)); });
          return !found;
        });
      }
    } else {
      for_each_admissible(op, in, check);
    }
    if (found)
      return found;
  }
  return std::nullopt;
}

std::optional<Witness> check_block_sampled(const Transformer &t, OpId op, Domain d, const ColumnBlock &block,
                                           unsigned per_row, Rng &rng) {
  const unsigned arity = op_arity(op);
  const unsigned w = block.width;
  BatchEvaluator ev;
  OutputColumns out;
  ev.run(t, block, out);
  std::vector<AbstractValue> in(arity);
  for (std::size_t r = 0; r < block.size; ++r) {
    for (unsigned a = 0; a < arity; ++a)
      in[a] = block.input(r, a, d);
    for (unsigned k = 0; k < per_row; ++k) {
      const uint64_t c0 = sample_concrete(in[0], rng);
      const uint64_t c1 = arity > 1 ? sample_concrete(in[1], rng) : 0;
      const OpResult res = apply_bits(op, c0, c1, w);
      if (res.ok && !raw_contains(d, w, out.f0[r], out.f1[r], res.value))
        return make_witness(block, r, arity, d, c0, c1, res.value, out);
    }
  }
  return std::nullopt;
}

} // namespace

std::optional<Witness> check_width_exhaustive(const Transformer &t, OpId op, Domain domain, unsigned width) {
  return check_block_exhaustive(t, op, domain, all_tuples(domain, width, op_arity(op)));
}

Verdict verify(const Transformer &t, OpId op, Domain domain, const VerifyConfig &cfg,
               const std::string &candidate_name) {
  Verdict v;
  const unsigned arity = op_arity(op);
  Rng rng(cfg.seed);
  auto unsound = [&](Witness w) {
    v.kind = VerdictKind::Unsound;
    v.detail = describe(w);
    v.witness = std::move(w);
    return v;
  };
  for (unsigned w = 1; w <= cfg.max_width; ++w) {
    const long double checks = std::pow(concrete_mass(domain, w), static_cast<long double>(arity));
    const bool exhaustive =
        w <= cfg.exhaustive_max_width || (w <= 6 && checks <= static_cast<long double>(cfg.exhaustive_budget));
    if (exhaustive) {
      if (auto wit = check_width_exhaustive(t, op, domain, w))
        return unsound(std::move(*wit));
      v.exhaustive_widths.push_back(w);
    } else {
      const ColumnBlock block = sampled_tuples(domain, w, arity, cfg.sampled_tuples, rng);
      if (auto wit = check_block_exhaustive(t, op, domain, block))
        return unsound(std::move(*wit));
      v.sampled_widths.push_back(w);
    }
  }
  for (unsigned w : cfg.random_widths) {
    const ColumnBlock block = sampled_tuples(domain, w, arity, cfg.random_tuples, rng);
    if (auto wit = check_block_sampled(t, op, domain, block, cfg.random_concrete, rng))
      return unsound(std::move(*wit));
    v.sampled_widths.push_back(w);
  }
  v.kind = VerdictKind::Sound;
  if (!cfg.smt.emit)
    return v;

  // Exported queries decide the verdict: any sat or missing answer blocks admission.
  std::vector<unsigned> widths = cfg.smt.widths;
  if (widths.empty())
    for (unsigned w = 1; w <= kMaxWidth; ++w)
      widths.push_back(w);
  std::filesystem::create_directories(cfg.smt.directory);
  bool all_unsat = true;
  for (unsigned w : widths) {
    const std::string query = export_smt(t, op, domain, w);
    const std::string path = (std::filesystem::path(cfg.smt.directory) / smt_file_name(op, domain, candidate_name, w)).string();
    std::ofstream(path) << query;
    SolverAnswer answer = SolverAnswer::Unknown;
    if (!cfg.smt.solver_command.empty()) {
      answer = run_solver(cfg.smt.solver_command, query, cfg.smt.timeout_seconds).answer;
    } else if (auto a = read_result_file(path + ".result")) {
      answer = *a;
    }
    if (answer == SolverAnswer::Sat) {
      v.kind = VerdictKind::Unsound;
      v.detail = "solver reports a counterexample at width " + std::to_string(w);
      return v;
    }
    if (answer != SolverAnswer::Unsat)
      all_unsat = false;
  }
  if (!all_unsat) {
    v.kind = VerdictKind::Unknown;
    v.detail = "awaiting solver results for exported queries";
  }
  return v;
}

} // namespace xsynth
