#include <gtest/gtest.h>

#include <sstream>

#include "reference.hpp"
#include "xsynth/dsl.hpp"
#include "xsynth/smt.hpp"
#include "xsynth/verify.hpp"

using namespace xsynth;

namespace {

const char *kUremFile = XSYNTH_TEST_DATA "/urem_kb_examples.xs";

std::string solver_or_skip() { return find_solver(); }

std::string bv_literal(uint64_t v, unsigned w) {
  std::string s = "#b";
  for (int i = static_cast<int>(w) - 1; i >= 0; --i)
    s += ((v >> i) & 1) ? '1' : '0';
  return s;
}

uint64_t parse_literal(const std::string &tok) {
  if (tok.rfind("#b", 0) == 0)
    return std::stoull(tok.substr(2), nullptr, 2);
  if (tok.rfind("#x", 0) == 0)
    return std::stoull(tok.substr(2), nullptr, 16);
  throw std::invalid_argument(tok);
}

Transformer dividend_identity() {
  return {Program(Domain::KnownBits, 2, ProgramKind::Transformer, {}, {0, 1}), std::nullopt};
}

} // namespace

TEST(Smt, QueryShape) {
  const Transformer t{top_program(Domain::URange, 2), std::nullopt};
  const std::string q = export_smt(t, OpId::Add, Domain::URange, 4);
  EXPECT_NE(q.find("(declare-const L_lo (_ BitVec 4))"), std::string::npos) << q;
  EXPECT_NE(q.find("(check-sat)"), std::string::npos);
  EXPECT_EQ(smt_file_name(OpId::Add, Domain::URange, "cand", 4).find('/'), std::string::npos);
  EXPECT_EQ(answer_name(SolverAnswer::Unsat), "unsat");
}

TEST(Smt, PrimitivesMatchKernels) {
  const std::string solver = solver_or_skip();
  if (solver.empty())
    GTEST_SKIP() << "no SMT solver on PATH";
  const unsigned w = 4;
  std::ostringstream script;
  std::vector<uint64_t> expected;
  Rng rng(1);
  for (Opcode op : all_opcodes())
    for (uint64_t a = 0; a < 16; ++a)
      for (uint64_t b = 0; b < 16; ++b) {
        const uint64_t c = rng() & 15;
        script << "(simplify " << smt_primitive(op, bv_literal(a, w), bv_literal(b, w), bv_literal(c, w), w) << ")\n";
        expected.push_back(ref::primitive(op, a, b, c, w));
      }
  const SolverResult r = run_solver(solver, script.str(), 120);
  std::istringstream out(r.output);
  std::string tok;
  std::size_t i = 0;
  while (out >> tok) {
    ASSERT_LT(i, expected.size()) << r.output.substr(0, 500);
    const std::size_t per_op = 256;
    ASSERT_EQ(parse_literal(tok), expected[i]) << opcode_name(all_opcodes()[i / per_op]) << " case " << i % per_op;
    ++i;
  }
  EXPECT_EQ(i, expected.size());
}

TEST(Smt, TopIsUnsatForEveryOperation) {
  const std::string solver = solver_or_skip();
  if (solver.empty())
    GTEST_SKIP() << "no SMT solver on PATH";
  for (OpId op : all_ops()) {
    const Transformer t{top_program(Domain::KnownBits, op_arity(op)), std::nullopt};
    const SolverResult r = run_solver(solver, export_smt(t, op, Domain::KnownBits, 4));
    EXPECT_EQ(r.answer, SolverAnswer::Unsat) << op_name(op) << "\n" << r.output;
  }
}

// The identity transformer is sound exactly when no admissible result
// leaves the first argument's concretization; the solver must agree with
// brute force for every operation.
TEST(Smt, OperationEncodingsAgreeWithBruteForce) {
  const std::string solver = solver_or_skip();
  if (solver.empty())
    GTEST_SKIP() << "no SMT solver on PATH";
  for (Domain d : {Domain::KnownBits, Domain::SRange})
    for (OpId op : all_ops()) {
      const Transformer ident{Program(d, op_arity(op), ProgramKind::Transformer, {}, {0, 1}), std::nullopt};
      const unsigned w = 3;
      const bool sound = ref::check_sound(ident, op, w).empty();
      const SolverResult r = run_solver(solver, export_smt(ident, op, d, w));
      EXPECT_EQ(r.answer, sound ? SolverAnswer::Unsat : SolverAnswer::Sat) << op_name(op) << " " << domain_tag(d);
    }
}

TEST(Smt, UnsoundModelIsAGenuineCounterexample) {
  const std::string solver = solver_or_skip();
  if (solver.empty())
    GTEST_SKIP() << "no SMT solver on PATH";
  const unsigned w = 4;
  const Transformer t = dividend_identity();
  const std::string query = export_smt(t, OpId::Modu, Domain::KnownBits, w);
  const SolverResult r = run_solver(solver, query);
  ASSERT_EQ(r.answer, SolverAnswer::Sat) << r.output;
  for (const char *k : {"L_zero", "L_one", "R_zero", "R_one", "c0", "c1"})
    ASSERT_TRUE(r.model.count(k)) << k << "\n" << r.output;
  const std::vector<AbstractValue> in = {AbstractValue::known_bits(w, r.model.at("L_zero"), r.model.at("L_one")),
                                         AbstractValue::known_bits(w, r.model.at("R_zero"), r.model.at("R_one"))};
  const uint64_t c0 = r.model.at("c0"), c1 = r.model.at("c1");
  ASSERT_TRUE(contains(in[0], BitVec(w, c0)));
  ASSERT_TRUE(contains(in[1], BitVec(w, c1)));
  const OpResult res = apply_bits(OpId::Modu, c0, c1, w);
  ASSERT_TRUE(res.ok);
  EXPECT_FALSE(contains(eval(t, in), BitVec(w, res.value)));

  // Pinning the brute-force witness keeps the query satisfiable.
  const auto witness = check_width_exhaustive(t, OpId::Modu, Domain::KnownBits, w);
  ASSERT_TRUE(witness);
  std::string pinned = query.substr(0, query.rfind("(check-sat)"));
  auto pin = [&](const char *name, uint64_t v) { pinned += "(assert (= " + std::string(name) + " " + bv_literal(v, w) + "))\n"; };
  pin("L_zero", witness->inputs[0].zero());
  pin("L_one", witness->inputs[0].one());
  pin("R_zero", witness->inputs[1].zero());
  pin("R_one", witness->inputs[1].one());
  pin("c0", witness->concrete[0]);
  pin("c1", witness->concrete[1]);
  pinned += "(check-sat)\n";
  const SolverResult again = run_solver(solver, pinned);
  ASSERT_EQ(again.answer, SolverAnswer::Sat) << again.output;
  EXPECT_EQ(again.model.at("c0"), witness->concrete[0]);
  EXPECT_EQ(again.model.at("c1"), witness->concrete[1]);
}

TEST(Smt, GuardedUremExampleIsUnsat) {
  const std::string solver = solver_or_skip();
  if (solver.empty())
    GTEST_SKIP() << "no SMT solver on PATH";
  for (const NamedTransformer &nt : read_transformer_file(kUremFile))
    for (unsigned w : {4u, 8u}) {
      const SolverResult r = run_solver(solver, export_smt(nt.transformer, OpId::Modu, Domain::KnownBits, w));
      EXPECT_EQ(r.answer, SolverAnswer::Unsat) << nt.name << " w=" << w << "\n" << r.output;
    }
}

TEST(Smt, QueryHasNoSolverErrors) {
  const std::string solver = solver_or_skip();
  if (solver.empty())
    GTEST_SKIP() << "no SMT solver on PATH";
  const OpcodeSampler sampler(OpWeights{}, OpcodeSet::full());
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    Transformer t{init_random(Domain::SRange, 2, ProgramKind::Transformer, sampler, rng), std::nullopt};
    t.condition = init_random(Domain::SRange, 2, ProgramKind::Condition, sampler, rng);
    const std::string q = "(set-option :smtlib2_compliant true)\n(set-option :print-success false)\n" +
                          export_smt(t, OpId::Sdiv, Domain::SRange, 8);
    const SolverResult r = run_solver(solver, q);
    // Errors after the answer come from the appended model request on unsat.
    EXPECT_NE(r.answer, SolverAnswer::Unknown) << r.output;
    const std::size_t answer_at = r.output.find(answer_name(r.answer));
    EXPECT_EQ(r.output.substr(0, answer_at).find("error"), std::string::npos) << r.output;
  }
}
