#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "xsynth/harness.hpp"
#include "xsynth/smt.hpp"
#include "xsynth/synthesizer.hpp"

namespace fs = std::filesystem;
using namespace xsynth;

namespace {

std::string default_out() {
  const char *env = std::getenv("XSYNTH_OUT");
  return env && *env ? env : "xsynth-out";
}

OpId require_op(const std::string &name) {
  if (auto op = parse_op(name))
    return *op;
  throw CLI::ValidationError("--op", "unknown operation '" + name + "'");
}

Domain require_domain(const std::string &tag) {
  if (auto d = parse_domain(tag))
    return *d;
  throw CLI::ValidationError("--domain", "unknown domain '" + tag + "' (expected kb, cru or crs)");
}

std::vector<Transformer> load_set(const std::vector<std::string> &paths, OpId op, Domain domain) {
  std::vector<Transformer> out;
  for (const std::string &p : paths) {
    for (const NamedTransformer &t : read_transformer_file(p)) {
      if (t.transformer.domain() != domain)
        throw std::runtime_error(p + ": transformer '" + t.name + "' is over " +
                                 std::string(domain_tag(t.transformer.domain())) + ", expected " +
                                 std::string(domain_tag(domain)));
      if (t.transformer.arity() != op_arity(op))
        throw std::runtime_error(p + ": transformer '" + t.name + "' has the wrong arity for " +
                                 std::string(op_name(op)));
      out.push_back(t.transformer);
    }
  }
  return out;
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct SynthArgs {
  std::string op, domain = "kb", dsl = "full", out, cache, solver;
  uint64_t seed = 0;
  unsigned chains = 100, inner_steps = 1000, outer_iters = 5, verify_width = 8, threads = 0;
  double time_budget = 0, temperature = 0.5;
  bool no_abduction = false, emit_smt = false, quiet = false;
};

int run_synth(const SynthArgs &a) {
  const OpId op = require_op(a.op);
  const Domain domain = require_domain(a.domain);
  SynthesisConfig cfg;
  const std::optional<OpcodeSet> dsl = OpcodeSet::parse(a.dsl);
  if (!dsl)
    throw CLI::ValidationError("--dsl", "expected full, basic or bitext");
  cfg.dsl = *dsl;
  cfg.search.seed = a.seed;
  cfg.search.chains = a.chains;
  cfg.search.n_step = a.inner_steps;
  cfg.search.threads = a.threads;
  cfg.search.temperature = a.temperature;
  cfg.max_outer = a.outer_iters;
  cfg.time_budget = a.time_budget;
  cfg.abduction = !a.no_abduction;
  cfg.verify.max_width = a.verify_width;
  cfg.cache_dir = a.cache;
  const fs::path out = a.out.empty() ? fs::path(default_out()) : fs::path(a.out);
  fs::create_directories(out);
  if (a.emit_smt) {
    cfg.verify.smt.emit = true;
    cfg.verify.smt.directory = (out / "smt").string();
    cfg.verify.smt.solver_command = a.solver;
  }
  if (!cfg.search.valid())
    throw CLI::ValidationError("search", "invalid search configuration");

  const SynthesisResult res = synthesize(op, domain, cfg);
  const std::string stem = res.members.front().named.name.substr(0, res.members.front().named.name.rfind('_'));
  const std::vector<NamedTransformer> named = res.named();
  write_text(out / (stem + ".xs"), print_transformers(named));
  for (const NamedTransformer &t : named)
    write_text(out / (t.name + ".xs"), print_transformer(t));
  write_text(out / (stem + "_report.json"), report_json(res.report));
  if (!a.quiet) {
    const SynthesisReport &r = res.report;
    std::cout << op_name(op) << " " << domain_tag(domain) << ": " << res.members.size() << " member(s), norm "
              << r.final_norm << " (top " << r.top_norm << ", best " << r.best_norm << "), exact " << r.exact_cases
              << "/" << r.suite_cases << ", stop: " << r.stop_reason << "\n";
    std::cout << "wrote " << (out / (stem + ".xs")).string() << "\n";
  }
  return 0;
}

struct EvalArgs {
  std::string op, domain = "kb", json;
  std::vector<std::string> synth, external;
  uint64_t seed = 0;
  unsigned exact_samples = 1000, norm_samples = 10000, norm_concrete = 10000;
};

int run_eval(const EvalArgs &a) {
  const OpId op = require_op(a.op);
  const Domain domain = require_domain(a.domain);
  const std::vector<Transformer> synth = load_set(a.synth, op, domain);
  std::optional<std::vector<Transformer>> external;
  if (!a.external.empty())
    external = load_set(a.external, op, domain);
  EvalOptions opts;
  opts.seed = a.seed;
  opts.exact_samples = a.exact_samples;
  opts.norm_samples = a.norm_samples;
  opts.norm_concrete = a.norm_concrete;
  const std::vector<EvalRow> rows = eval_rows(eval_data(op, domain, synth, external, opts));
  std::cout << format_rows(rows);
  if (!a.json.empty())
    write_text(a.json, rows_json(rows));
  return 0;
}

struct ProductArgs {
  std::string op, range = "cru", json;
  std::vector<std::string> kb, rng;
  uint64_t seed = 0;
  unsigned exact_samples = 1000, norm_samples = 10000;
};

int run_product(const ProductArgs &a) {
  const OpId op = require_op(a.op);
  const Domain range = require_domain(a.range);
  if (range == Domain::KnownBits)
    throw CLI::ValidationError("--range-domain", "expected cru or crs");
  for (const auto &p : a.kb)
    if (!fs::exists(p))
      throw std::runtime_error("missing transformer file " + p);
  for (const auto &p : a.rng)
    if (!fs::exists(p))
      throw std::runtime_error("missing transformer file " + p);
  const std::vector<Transformer> kb = load_set(a.kb, op, Domain::KnownBits);
  const std::vector<Transformer> rng = load_set(a.rng, op, range);
  ProductOptions opts;
  opts.seed = a.seed;
  opts.exact_samples = a.exact_samples;
  opts.norm_samples = a.norm_samples;
  const std::vector<EvalRow> rows = product_rows(op, range, product_data(op, range, kb, rng, opts));
  std::cout << format_rows(rows);
  if (!a.json.empty())
    write_text(a.json, rows_json(rows));
  return 0;
}

struct ExportArgs {
  std::string op, domain = "kb", in, out, solver;
  std::vector<unsigned> widths;
};

int run_export(const ExportArgs &a) {
  const OpId op = require_op(a.op);
  const Domain domain = require_domain(a.domain);
  const fs::path out = a.out.empty() ? fs::path(default_out()) / "smt" : fs::path(a.out);
  fs::create_directories(out);
  std::vector<unsigned> widths = a.widths;
  if (widths.empty())
    for (unsigned w = 1; w <= kMaxWidth; ++w)
      widths.push_back(w);
  int status = 0;
  for (const NamedTransformer &t : read_transformer_file(a.in)) {
    if (t.transformer.domain() != domain || t.transformer.arity() != op_arity(op))
      throw std::runtime_error(a.in + ": transformer '" + t.name + "' does not match the op and domain");
    for (unsigned w : widths) {
      const std::string query = export_smt(t.transformer, op, domain, w);
      const fs::path path = out / smt_file_name(op, domain, t.name, w);
      write_text(path, query);
      if (a.solver.empty()) {
        std::cout << path.string() << "\n";
        continue;
      }
      const SolverResult r = run_solver(a.solver, query);
      std::cout << path.string() << ": " << answer_name(r.answer) << "\n";
      if (r.answer == SolverAnswer::Sat) {
        status = 2;
        for (const auto &[name, value] : r.model)
          std::cout << "  " << name << " = " << value << "\n";
      }
    }
  }
  return status;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Synthesizer and evaluator of sound abstract transformers"};
  app.require_subcommand(1);

  SynthArgs sa;
  CLI::App *synth = app.add_subcommand("synth", "Synthesize a transformer set for one operation");
  synth->add_option("--op", sa.op, "Concrete operation, e.g. And, Modu, AddNuw")->required();
  synth->add_option("--domain", sa.domain, "kb, cru or crs")->capture_default_str();
  synth->add_option("--seed", sa.seed)->capture_default_str();
  synth->add_option("--chains", sa.chains, "MCMC chains per outer iteration")->capture_default_str();
  synth->add_option("--inner-steps", sa.inner_steps, "Proposals per chain")->capture_default_str();
  synth->add_option("--outer-iters", sa.outer_iters)->capture_default_str();
  synth->add_option("--time-budget", sa.time_budget, "Seconds; 0 for none")->capture_default_str();
  synth->add_option("--temperature", sa.temperature, "Metropolis temperature")->capture_default_str();
  synth->add_option("--dsl", sa.dsl, "full, basic or bitext")->capture_default_str();
  synth->add_flag("--no-abduction", sa.no_abduction, "Disable condition abduction");
  synth->add_option("--verify-width", sa.verify_width, "Largest width checked by enumeration")->capture_default_str();
  synth->add_flag("--emit-smt", sa.emit_smt, "Write SMT-LIB2 soundness queries for widths 1..64");
  synth->add_option("--solver", sa.solver, "SMT solver command used with --emit-smt");
  synth->add_option("--threads", sa.threads, "Worker threads; 0 for all cores")->capture_default_str();
  synth->add_option("--cache", sa.cache, "Directory for cached test suites");
  synth->add_option("--out", sa.out, "Output directory (default $XSYNTH_OUT or ./xsynth-out)");
  synth->add_flag("--quiet", sa.quiet);

  EvalArgs ea;
  CLI::App *eval = app.add_subcommand("eval", "Precision table against the best transformer");
  eval->add_option("--op", ea.op)->required();
  eval->add_option("--domain", ea.domain)->capture_default_str();
  eval->add_option("--synth", ea.synth, "Transformer files whose members are met")->required()->check(CLI::ExistingFile);
  eval->add_option("--external", ea.external, "Reference transformer files")->check(CLI::ExistingFile);
  eval->add_option("--seed", ea.seed)->capture_default_str();
  eval->add_option("--exact-samples", ea.exact_samples)->capture_default_str();
  eval->add_option("--norm-samples", ea.norm_samples)->capture_default_str();
  eval->add_option("--norm-concrete", ea.norm_concrete)->capture_default_str();
  eval->add_option("--json", ea.json, "Also write the rows as JSON");

  ProductArgs pa;
  CLI::App *product = app.add_subcommand("product-eval", "Known bits reduced with a range domain");
  product->add_option("--op", pa.op)->required();
  product->add_option("--range-domain", pa.range, "cru or crs")->capture_default_str();
  product->add_option("--kb", pa.kb, "Known-bits transformer files")->required();
  product->add_option("--range", pa.rng, "Range transformer files")->required();
  product->add_option("--seed", pa.seed)->capture_default_str();
  product->add_option("--exact-samples", pa.exact_samples)->capture_default_str();
  product->add_option("--norm-samples", pa.norm_samples)->capture_default_str();
  product->add_option("--json", pa.json);

  ExportArgs xa;
  CLI::App *exp = app.add_subcommand("export-smt", "Write SMT-LIB2 soundness queries for a transformer file");
  exp->add_option("--op", xa.op)->required();
  exp->add_option("--domain", xa.domain)->capture_default_str();
  exp->add_option("--in", xa.in)->required()->check(CLI::ExistingFile);
  exp->add_option("--width", xa.widths, "Widths to export (default 1..64)")->check(CLI::Range(1u, kMaxWidth));
  exp->add_option("--out", xa.out);
  exp->add_option("--solver", xa.solver, "Run this solver on every query");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*synth)
      return run_synth(sa);
    if (*eval)
      return run_eval(ea);
    if (*product)
      return run_product(pa);
    return run_export(xa);
  } catch (const CLI::Error &e) {
    return app.exit(e);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
