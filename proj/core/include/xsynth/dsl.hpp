#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xsynth/bitvec.hpp"
#include "xsynth/domains.hpp"

namespace xsynth {

enum class ProgramKind : uint8_t { Transformer, Condition };

inline constexpr unsigned kTransformerLength = 30;
inline constexpr unsigned kConditionLength = 6;

/// Operand indices share one space: the input slots come first, then the
/// four constants, then one value per body instruction.
using OperandIndex = uint16_t;

struct Instruction {
  Opcode op = Opcode::And;
  std::array<OperandIndex, 3> args{};

  friend bool operator==(const Instruction &, const Instruction &) = default;
};

/// An SSA program over the integer fields of its abstract arguments.
///
/// Each abstract argument contributes two slots (zero/one or lo/hi). A
/// transformer returns two operands that rebuild an abstract value; a
/// condition returns one operand read as a boolean.
class Program {
public:
  Program() = default;
  Program(Domain domain, unsigned arity, ProgramKind kind, std::vector<Instruction> body,
          std::vector<OperandIndex> outputs);

  Domain domain() const { return domain_; }
  unsigned arity() const { return arity_; }
  ProgramKind kind() const { return kind_; }
  const std::vector<Instruction> &body() const { return body_; }
  const std::vector<OperandIndex> &outputs() const { return outputs_; }

  unsigned num_slots() const { return 2 * arity_; }
  OperandIndex first_constant() const { return static_cast<OperandIndex>(num_slots()); }
  OperandIndex first_instruction() const { return static_cast<OperandIndex>(num_slots() + kConstantCount); }
  OperandIndex constant_operand(ConstantKind k) const {
    return static_cast<OperandIndex>(first_constant() + static_cast<unsigned>(k));
  }
  /// Operand index holding the result of body line `i`.
  OperandIndex line_operand(std::size_t i) const { return static_cast<OperandIndex>(first_instruction() + i); }
  std::size_t num_values() const { return first_instruction() + body_.size(); }

  /// Checks arity and SSA dominance; fills `why` on failure.
  bool validate(std::string *why = nullptr) const;
  /// live[i] is true when body line i contributes to an output.
  std::vector<bool> live_lines() const;
  /// Drops dead lines and renumbers the rest.
  Program compacted() const;

  friend bool operator==(const Program &, const Program &) = default;

private:
  Domain domain_ = Domain::KnownBits;
  uint8_t arity_ = 2;
  ProgramKind kind_ = ProgramKind::Transformer;
  std::vector<Instruction> body_;
  std::vector<OperandIndex> outputs_;
};

/// A transformer, optionally guarded by a condition program. When the
/// condition evaluates to false the result is top.
struct Transformer {
  Program body;
  std::optional<Program> condition;

  bool guarded() const { return condition.has_value(); }
  Domain domain() const { return body.domain(); }
  unsigned arity() const { return body.arity(); }

  friend bool operator==(const Transformer &, const Transformer &) = default;
};

/// The program returning top for every input.
Program top_program(Domain domain, unsigned arity);
/// The condition program returning a constant.
Program constant_condition(Domain domain, unsigned arity, bool value);

class OpcodeSet {
public:
  static OpcodeSet full();
  /// Bitwise and Add groups.
  static OpcodeSet basic();
  /// Everything except the Mul group.
  static OpcodeSet bitext();
  static std::optional<OpcodeSet> parse(std::string_view name);

  bool contains(Opcode op) const { return bits_.test(static_cast<std::size_t>(op)); }
  void insert(Opcode op) { bits_.set(static_cast<std::size_t>(op)); }
  std::size_t count() const { return bits_.count(); }

  friend bool operator==(const OpcodeSet &, const OpcodeSet &) = default;

private:
  std::bitset<kOpcodeCount> bits_;
};

struct OpWeights {
  std::array<double, kOpcodeCount> weight;
  OpWeights() { weight.fill(1.0); }
  double operator[](Opcode op) const { return weight[static_cast<std::size_t>(op)]; }
  double &operator[](Opcode op) { return weight[static_cast<std::size_t>(op)]; }
};

/// Weighted opcode draw restricted to an opcode set.
class OpcodeSampler {
public:
  OpcodeSampler(const OpWeights &weights, const OpcodeSet &allowed);
  Opcode sample(Rng &rng) const;

private:
  std::vector<Opcode> ops_;
  std::vector<double> cumulative_;
};

Program init_random(Domain domain, unsigned arity, ProgramKind kind, const OpcodeSampler &sampler, Rng &rng,
                    unsigned length = 0);
Program mutate(const Program &p, const OpcodeSampler &sampler, Rng &rng);

AbstractValue eval_transformer(const Program &p, std::span<const AbstractValue> inputs);
bool eval_condition(const Program &p, std::span<const AbstractValue> inputs);
AbstractValue eval(const Transformer &t, std::span<const AbstractValue> inputs);
/// Pointwise meet of the members; top for an empty set.
AbstractValue eval_meet(std::span<const Transformer> set, std::span<const AbstractValue> inputs);

// ---------------------------------------------------------------------------
// Text format.

struct ParseError : std::runtime_error {
  ParseError(unsigned line, unsigned column, const std::string &message);
  unsigned line;
  unsigned column;
};

std::string slot_name(Domain domain, unsigned slot);
std::string print_program(const Program &p, std::string_view name);

struct NamedTransformer {
  std::string name;
  Transformer transformer;
};

std::string print_transformer(const NamedTransformer &t);
std::string print_transformers(std::span<const NamedTransformer> items);
/// Parses every transformer in `text`; throws ParseError.
std::vector<NamedTransformer> parse_transformers(std::string_view text);
/// Parses a single fn block.
Program parse_program(std::string_view text);

std::vector<NamedTransformer> read_transformer_file(const std::string &path);
void write_transformer_file(const std::string &path, std::span<const NamedTransformer> items);

} // namespace xsynth
