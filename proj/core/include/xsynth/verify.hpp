#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xsynth/concrete_ops.hpp"
#include "xsynth/dsl.hpp"
#include "xsynth/smt.hpp"

namespace xsynth {

struct Witness {
  unsigned width = 0;
  std::vector<AbstractValue> inputs;
  std::vector<uint64_t> concrete;
  uint64_t result = 0;
  AbstractValue output;
};

std::string describe(const Witness &w);

enum class VerdictKind : uint8_t { Sound, Unsound, Unknown };
std::string_view verdict_name(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::optional<Witness> witness;
  /// Widths checked over every abstract and concrete tuple.
  std::vector<unsigned> exhaustive_widths;
  /// Widths checked on sampled abstract tuples.
  std::vector<unsigned> sampled_widths;
  std::string detail;
};

struct SmtOptions {
  bool emit = false;
  std::string directory = ".";
  std::vector<unsigned> widths; // empty means 1..64
  /// External solver command; when empty the verdict stays Unknown unless
  /// a `<query>.result` file is present next to the query.
  std::string solver_command;
  unsigned timeout_seconds = 60;
};

struct VerifyConfig {
  unsigned exhaustive_max_width = 4;
  /// Largest width checked with exhaustive concretization.
  unsigned max_width = 8;
  /// Concrete checks allowed per width before falling back to sampling.
  uint64_t exhaustive_budget = uint64_t{1} << 22;
  unsigned sampled_tuples = 1000;
  /// Wide widths checked with sampled abstract and concrete tuples.
  std::vector<unsigned> random_widths = {16, 32, 64};
  unsigned random_tuples = 500;
  unsigned random_concrete = 32;
  uint64_t seed = 0x5eed;
  SmtOptions smt;
};

/// Checks f̂#(a) ⊑ f(a) via concrete membership at the configured widths.
Verdict verify(const Transformer &t, OpId op, Domain domain, const VerifyConfig &cfg,
               const std::string &candidate_name = "candidate");

/// Exhaustive check at a single width; returns the first violation.
std::optional<Witness> check_width_exhaustive(const Transformer &t, OpId op, Domain domain, unsigned width);

} // namespace xsynth
