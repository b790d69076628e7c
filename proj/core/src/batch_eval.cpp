#include "xsynth/batch_eval.hpp"

namespace xsynth {

ColumnBlock::ColumnBlock(unsigned width, unsigned num_slots) : width(width), slots(num_slots) {}

void ColumnBlock::push(std::span<const AbstractValue> inputs) {
  assert(inputs.size() * 2 == slots.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    slots[2 * i].push_back(inputs[i].field0());
    slots[2 * i + 1].push_back(inputs[i].field1());
  }
  ++size;
}

void ColumnBlock::finalize() {
  for (unsigned k = 0; k < kConstantCount; ++k)
    constants[k].assign(size, constant_bits(static_cast<ConstantKind>(k), width));
}

AbstractValue ColumnBlock::input(std::size_t row, unsigned arg, Domain d) const {
  return AbstractValue::from_fields(d, width, slots[2 * arg][row], slots[2 * arg + 1][row]);
}

namespace {

template <class F> void map1(const uint64_t *a, uint64_t *o, std::size_t n, F f) {
  for (std::size_t i = 0; i < n; ++i)
    o[i] = f(a[i]);
}
template <class F> void map2(const uint64_t *a, const uint64_t *b, uint64_t *o, std::size_t n, F f) {
  for (std::size_t i = 0; i < n; ++i)
    o[i] = f(a[i], b[i]);
}

void kernel(Opcode op, const uint64_t *a, const uint64_t *b, const uint64_t *c, uint64_t *o, std::size_t n,
            unsigned w) {
  using namespace prim;
  const uint64_t m = width_mask(w);
  switch (op) {
  case Opcode::And: return map2(a, b, o, n, [](uint64_t x, uint64_t y) { return x & y; });
  case Opcode::Or: return map2(a, b, o, n, [](uint64_t x, uint64_t y) { return x | y; });
  case Opcode::Xor: return map2(a, b, o, n, [](uint64_t x, uint64_t y) { return x ^ y; });
  case Opcode::Neg: return map1(a, o, n, [m](uint64_t x) { return ~x & m; });
  case Opcode::Add: return map2(a, b, o, n, [m](uint64_t x, uint64_t y) { return (x + y) & m; });
  case Opcode::Sub: return map2(a, b, o, n, [m](uint64_t x, uint64_t y) { return (x - y) & m; });
  case Opcode::Umax: return map2(a, b, o, n, [](uint64_t x, uint64_t y) { return umax(x, y); });
  case Opcode::Umin: return map2(a, b, o, n, [](uint64_t x, uint64_t y) { return umin(x, y); });
  case Opcode::Smax: return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return smax(x, y, w); });
  case Opcode::Smin: return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return smin(x, y, w); });
  case Opcode::Mul: return map2(a, b, o, n, [m](uint64_t x, uint64_t y) { return (x * y) & m; });
  case Opcode::Udiv: return map2(a, b, o, n, [](uint64_t x, uint64_t y) { return udiv(x, y); });
  case Opcode::Sdiv: return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return sdiv(x, y, w); });
  case Opcode::Urem: return map2(a, b, o, n, [](uint64_t x, uint64_t y) { return urem(x, y); });
  case Opcode::Srem: return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return srem(x, y, w); });
  case Opcode::Shl: return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return shl(x, y, w); });
  case Opcode::Ashr: return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return ashr(x, y, w); });
  case Opcode::Lshr: return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return lshr(x, y, w); });
  case Opcode::SetHighBits: return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return set_high_bits(x, y, w); });
  case Opcode::SetLowBits: return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return set_low_bits(x, y, w); });
  case Opcode::ClearLowBits:
    return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return clear_low_bits(x, y, w); });
  case Opcode::ClearHighBits:
    return map2(a, b, o, n, [w](uint64_t x, uint64_t y) { return clear_high_bits(x, y, w); });
  case Opcode::SetSignBit: return map1(a, o, n, [w](uint64_t x) { return set_sign_bit(x, w); });
  case Opcode::ClearSignBit: return map1(a, o, n, [w](uint64_t x) { return clear_sign_bit(x, w); });
  case Opcode::CountLeftOne: return map1(a, o, n, [w](uint64_t x) { return count_left_one(x, w); });
  case Opcode::CountLeftZero: return map1(a, o, n, [w](uint64_t x) { return count_left_zero(x, w); });
  case Opcode::CountRightOne: return map1(a, o, n, [w](uint64_t x) { return count_right_one(x, w); });
  case Opcode::CountRightZero: return map1(a, o, n, [w](uint64_t x) { return count_right_zero(x, w); });
  case Opcode::IfThenElse:
    for (std::size_t i = 0; i < n; ++i)
      o[i] = a[i] != 0 ? b[i] : c[i];
    return;
  }
}

} // namespace

void BatchEvaluator::execute(const Program &p, const ColumnBlock &block) {
  const std::size_t n = block.size;
  const std::vector<bool> live = p.live_lines();
  scratch_.resize(p.body().size() * n);
  columns_.assign(p.num_values(), nullptr);
  for (unsigned s = 0; s < p.num_slots(); ++s)
    columns_[s] = block.slots[s].data();
  for (unsigned k = 0; k < kConstantCount; ++k)
    columns_[p.first_constant() + k] = block.constants[k].data();
  for (std::size_t i = 0; i < p.body().size(); ++i) {
    uint64_t *out = scratch_.data() + i * n;
    columns_[p.line_operand(i)] = out;
    if (!live[i])
      continue;
    const Instruction &ins = p.body()[i];
    const unsigned k = arity(ins.op);
    kernel(ins.op, columns_[ins.args[0]], k > 1 ? columns_[ins.args[1]] : nullptr,
           k > 2 ? columns_[ins.args[2]] : nullptr, out, n, block.width);
  }
}

void BatchEvaluator::run_transformer(const Program &p, const ColumnBlock &block, OutputColumns &out) {
  assert(p.kind() == ProgramKind::Transformer);
  execute(p, block);
  const uint64_t *a = column(p.outputs()[0]);
  const uint64_t *b = column(p.outputs()[1]);
  out.f0.assign(a, a + block.size);
  out.f1.assign(b, b + block.size);
}

void BatchEvaluator::run_condition(const Program &p, const ColumnBlock &block, std::vector<uint8_t> &out) {
  assert(p.kind() == ProgramKind::Condition);
  execute(p, block);
  const uint64_t *c = column(p.outputs()[0]);
  out.resize(block.size);
  for (std::size_t i = 0; i < block.size; ++i)
    out[i] = c[i] != 0;
}

void blend_top(Domain d, unsigned width, std::span<const uint8_t> cond, OutputColumns &out) {
  const AbstractValue t = top(d, width);
  for (std::size_t i = 0; i < cond.size(); ++i) {
    if (!cond[i]) {
      out.f0[i] = t.field0();
      out.f1[i] = t.field1();
    }
  }
}

void BatchEvaluator::run(const Transformer &t, const ColumnBlock &block, OutputColumns &out) {
  run_transformer(t.body, block, out);
  if (t.condition) {
    run_condition(*t.condition, block, cond_);
    blend_top(t.domain(), block.width, cond_, out);
  }
}

} // namespace xsynth
