#include "xsynth/dsl.hpp"

#include <algorithm>

namespace xsynth {

Program::Program(Domain domain, unsigned arity, ProgramKind kind, std::vector<Instruction> body,
                 std::vector<OperandIndex> outputs)
    : domain_(domain), arity_(static_cast<uint8_t>(arity)), kind_(kind), body_(std::move(body)),
      outputs_(std::move(outputs)) {
  assert(arity == 1 || arity == 2);
}

bool Program::validate(std::string *why) const {
  auto fail = [&](std::string msg) {
    if (why)
      *why = std::move(msg);
    return false;
  };
  const std::size_t want_outputs = kind_ == ProgramKind::Transformer ? 2 : 1;
  if (outputs_.size() != want_outputs)
    return fail("wrong number of outputs");
  for (std::size_t i = 0; i < body_.size(); ++i) {
    const unsigned n = xsynth::arity(body_[i].op);
    for (unsigned j = 0; j < n; ++j)
      if (body_[i].args[j] >= line_operand(i))
        return fail("line " + std::to_string(i) + " uses an operand that is not yet defined");
  }
  for (OperandIndex o : outputs_)
    if (o >= num_values())
      return fail("output refers to an undefined operand");
  return true;
}

std::vector<bool> Program::live_lines() const {
  std::vector<bool> live(body_.size(), false);
  const OperandIndex base = first_instruction();
  for (OperandIndex o : outputs_)
    if (o >= base)
      live[o - base] = true;
  for (std::size_t i = body_.size(); i-- > 0;) {
    if (!live[i])
      continue;
    const unsigned n = xsynth::arity(body_[i].op);
    for (unsigned j = 0; j < n; ++j)
      if (body_[i].args[j] >= base)
        live[body_[i].args[j] - base] = true;
  }
  return live;
}

Program Program::compacted() const {
  const std::vector<bool> live = live_lines();
  const OperandIndex base = first_instruction();
  std::vector<OperandIndex> remap(num_values());
  for (OperandIndex i = 0; i < base; ++i)
    remap[i] = i;
  std::vector<Instruction> body;
  for (std::size_t i = 0; i < body_.size(); ++i) {
    if (!live[i])
      continue;
    Instruction ins = body_[i];
    const unsigned n = xsynth::arity(ins.op);
    for (unsigned j = 0; j < 3; ++j)
      ins.args[j] = j < n ? remap[ins.args[j]] : 0;
    remap[base + i] = static_cast<OperandIndex>(base + body.size());
    body.push_back(ins);
  }
  std::vector<OperandIndex> outputs;
  for (OperandIndex o : outputs_)
    outputs.push_back(remap[o]);
  return Program(domain_, arity_, kind_, std::move(body), std::move(outputs));
}

Program top_program(Domain domain, unsigned arity) {
  Program shape(domain, arity, ProgramKind::Transformer, {}, {0, 0});
  const OperandIndex zero = shape.constant_operand(ConstantKind::Zero);
  const OperandIndex ones = shape.constant_operand(ConstantKind::AllOnes);
  switch (domain) {
  case Domain::KnownBits: return Program(domain, arity, ProgramKind::Transformer, {}, {zero, zero});
  case Domain::URange: return Program(domain, arity, ProgramKind::Transformer, {}, {zero, ones});
  case Domain::SRange: {
    std::vector<Instruction> body = {{Opcode::SetSignBit, {zero, 0, 0}}, {Opcode::ClearSignBit, {ones, 0, 0}}};
    return Program(domain, arity, ProgramKind::Transformer, std::move(body),
                   {shape.line_operand(0), shape.line_operand(1)});
  }
  }
  return shape;
}

Program constant_condition(Domain domain, unsigned arity, bool value) {
  Program shape(domain, arity, ProgramKind::Condition, {}, {0});
  const OperandIndex c = shape.constant_operand(value ? ConstantKind::One : ConstantKind::Zero);
  return Program(domain, arity, ProgramKind::Condition, {}, {c});
}

// ---------------------------------------------------------------------------

OpcodeSet OpcodeSet::full() {
  OpcodeSet s;
  s.bits_.set();
  return s;
}

OpcodeSet OpcodeSet::basic() {
  OpcodeSet s;
  for (Opcode op : all_opcodes())
    if (group_of(op) == OpcodeGroup::Bitwise || group_of(op) == OpcodeGroup::Add)
      s.insert(op);
  return s;
}

OpcodeSet OpcodeSet::bitext() {
  OpcodeSet s;
  for (Opcode op : all_opcodes())
    if (group_of(op) != OpcodeGroup::Mul)
      s.insert(op);
  return s;
}

std::optional<OpcodeSet> OpcodeSet::parse(std::string_view name) {
  if (name == "full")
    return full();
  if (name == "basic")
    return basic();
  if (name == "bitext")
    return bitext();
  return std::nullopt;
}

OpcodeSampler::OpcodeSampler(const OpWeights &weights, const OpcodeSet &allowed) {
  double total = 0;
  for (Opcode op : all_opcodes()) {
    if (!allowed.contains(op))
      continue;
    total += weights[op];
    ops_.push_back(op);
    cumulative_.push_back(total);
  }
  assert(!ops_.empty());
}

Opcode OpcodeSampler::sample(Rng &rng) const {
  const double x = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
  const std::size_t i = std::min<std::size_t>(it - cumulative_.begin(), ops_.size() - 1);
  return ops_[i];
}

namespace {

OperandIndex uniform_operand(std::size_t bound, Rng &rng) {
  return static_cast<OperandIndex>(std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng));
}

Instruction random_instruction(const Program &shape, std::size_t line, const OpcodeSampler &sampler, Rng &rng) {
  Instruction ins;
  ins.op = sampler.sample(rng);
  const std::size_t bound = shape.first_instruction() + line;
  for (unsigned j = 0; j < xsynth::arity(ins.op); ++j)
    ins.args[j] = uniform_operand(bound, rng);
  return ins;
}

} // namespace

Program init_random(Domain domain, unsigned arity, ProgramKind kind, const OpcodeSampler &sampler, Rng &rng,
                    unsigned length) {
  if (length == 0)
    length = kind == ProgramKind::Transformer ? kTransformerLength : kConditionLength;
  const std::size_t n_out = kind == ProgramKind::Transformer ? 2 : 1;
  const Program shape(domain, arity, kind, {}, std::vector<OperandIndex>(n_out, 0));
  std::vector<Instruction> body;
  body.reserve(length);
  for (unsigned i = 0; i < length; ++i)
    body.push_back(random_instruction(shape, i, sampler, rng));
  // The last lines feed the outputs.
  std::vector<OperandIndex> outputs;
  for (std::size_t k = 0; k < n_out; ++k) {
    const std::size_t line = length >= n_out ? length - n_out + k : 0;
    outputs.push_back(length == 0 ? shape.constant_operand(ConstantKind::Zero) : shape.line_operand(line));
  }
  return Program(domain, arity, kind, std::move(body), std::move(outputs));
}

Program mutate(const Program &p, const OpcodeSampler &sampler, Rng &rng) {
  std::vector<Instruction> body = p.body();
  std::vector<OperandIndex> outputs = p.outputs();
  // Line body.size() is the return line; only its operands change.
  const std::size_t line = std::uniform_int_distribution<std::size_t>(0, body.size())(rng);
  if (line == body.size()) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, outputs.size() - 1)(rng);
    outputs[j] = uniform_operand(p.num_values(), rng);
  } else if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
    Instruction &ins = body[line];
    const unsigned j = std::uniform_int_distribution<unsigned>(0, xsynth::arity(ins.op) - 1)(rng);
    ins.args[j] = uniform_operand(p.first_instruction() + line, rng);
  } else {
    body[line] = random_instruction(p, line, sampler, rng);
  }
  return Program(p.domain(), p.arity(), p.kind(), std::move(body), std::move(outputs));
}

// ---------------------------------------------------------------------------

namespace {

void run_scalar(const Program &p, std::span<const AbstractValue> inputs, std::vector<uint64_t> &vals) {
  assert(inputs.size() == p.arity());
  const unsigned w = inputs[0].width();
  vals.assign(p.num_values(), 0);
  for (unsigned i = 0; i < p.arity(); ++i) {
    assert(!inputs[i].is_bottom() && inputs[i].domain() == p.domain() && inputs[i].width() == w);
    vals[2 * i] = inputs[i].field0();
    vals[2 * i + 1] = inputs[i].field1();
  }
  for (unsigned k = 0; k < kConstantCount; ++k)
    vals[p.first_constant() + k] = constant_bits(static_cast<ConstantKind>(k), w);
  const std::vector<bool> live = p.live_lines();
  for (std::size_t i = 0; i < p.body().size(); ++i) {
    if (!live[i])
      continue;
    const Instruction &ins = p.body()[i];
    vals[p.line_operand(i)] = eval_primitive_bits(ins.op, vals[ins.args[0]], vals[ins.args[1]], vals[ins.args[2]], w);
  }
}

} // namespace

AbstractValue eval_transformer(const Program &p, std::span<const AbstractValue> inputs) {
  assert(p.kind() == ProgramKind::Transformer);
  std::vector<uint64_t> vals;
  run_scalar(p, inputs, vals);
  return AbstractValue::from_fields(p.domain(), inputs[0].width(), vals[p.outputs()[0]], vals[p.outputs()[1]]);
}

bool eval_condition(const Program &p, std::span<const AbstractValue> inputs) {
  assert(p.kind() == ProgramKind::Condition);
  std::vector<uint64_t> vals;
  run_scalar(p, inputs, vals);
  return vals[p.outputs()[0]] != 0;
}

AbstractValue eval(const Transformer &t, std::span<const AbstractValue> inputs) {
  if (t.condition && !eval_condition(*t.condition, inputs))
    return top(t.domain(), inputs[0].width());
  return eval_transformer(t.body, inputs);
}

AbstractValue eval_meet(std::span<const Transformer> set, std::span<const AbstractValue> inputs) {
  AbstractValue acc = top(inputs[0].domain(), inputs[0].width());
  for (const Transformer &t : set)
    acc = meet(acc, eval(t, inputs));
  return acc;
}

} // namespace xsynth
