#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "xsynth/concrete_ops.hpp"
#include "xsynth/dsl.hpp"

namespace xsynth {

/// SMT-LIB2 query (QF_BV) that is unsat exactly when `t` is sound for `op`
/// at `width`. Declared constants are L_<field>, R_<field> for the abstract
/// inputs and c0, c1 for the concrete arguments.
std::string export_smt(const Transformer &t, OpId op, Domain domain, unsigned width);

/// SMT-LIB2 term for a DSL primitive over already-rendered operand terms.
std::string smt_primitive(Opcode op, const std::string &a, const std::string &b, const std::string &c,
                          unsigned width);

enum class SolverAnswer : uint8_t { Sat, Unsat, Unknown };
std::string_view answer_name(SolverAnswer a);

struct SolverResult {
  SolverAnswer answer = SolverAnswer::Unknown;
  /// Values of the declared constants when the answer is sat.
  std::map<std::string, uint64_t> model;
  std::string output;
};

/// Runs `command <file>` on the query (with a get-value request appended)
/// and parses the answer. An empty command yields Unknown.
SolverResult run_solver(const std::string &command, const std::string &query, unsigned timeout_seconds = 60);

/// Reads a solver answer ("sat", "unsat", ...) from the first line of a file.
std::optional<SolverAnswer> read_result_file(const std::string &path);

/// First of z3, cvc5, yices-smt2 found on PATH, or empty.
std::string find_solver();

/// `<op>_<domain>_<candidate>_<width>.smt2`
std::string smt_file_name(OpId op, Domain domain, const std::string &candidate, unsigned width);

} // namespace xsynth
