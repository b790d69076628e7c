#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "xsynth/dsl.hpp"

namespace xsynth {

ParseError::ParseError(unsigned line, unsigned column, const std::string &message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line(line),
      column(column) {}

std::string slot_name(Domain domain, unsigned slot) {
  static constexpr const char *kArgs[] = {"L", "R"};
  const char *field = nullptr;
  if (domain == Domain::KnownBits)
    field = slot % 2 == 0 ? "zero" : "one";
  else
    field = slot % 2 == 0 ? "lo" : "hi";
  return std::string(kArgs[slot / 2]) + "." + field;
}

namespace {

std::string operand_text(const Program &p, OperandIndex o) {
  if (o < p.first_constant())
    return slot_name(p.domain(), o);
  if (o < p.first_instruction())
    return std::string(constant_name(static_cast<ConstantKind>(o - p.first_constant())));
  return "%v" + std::to_string(o - p.first_instruction());
}

} // namespace

std::string print_program(const Program &p, std::string_view name) {
  std::ostringstream out;
  out << "fn " << name << "(";
  for (unsigned s = 0; s < p.num_slots(); ++s)
    out << (s ? ", " : "") << slot_name(p.domain(), s);
  out << ") -> " << domain_tag(p.domain()) << " {\n";
  for (std::size_t i = 0; i < p.body().size(); ++i) {
    const Instruction &ins = p.body()[i];
    out << "  %v" << i << " = " << opcode_name(ins.op);
    for (unsigned j = 0; j < arity(ins.op); ++j)
      out << (j ? ", " : " ") << operand_text(p, ins.args[j]);
    out << "\n";
  }
  out << "  return";
  for (std::size_t j = 0; j < p.outputs().size(); ++j)
    out << (j ? ", " : " ") << operand_text(p, p.outputs()[j]);
  out << "\n}\n";
  return out.str();
}

std::string print_transformer(const NamedTransformer &t) {
  if (!t.transformer.guarded())
    return print_program(t.transformer.body, t.name);
  return print_program(*t.transformer.condition, t.name + "_cond") + print_program(t.transformer.body, t.name + "_body") +
         "guard " + t.name + "\n";
}

std::string print_transformers(std::span<const NamedTransformer> items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i)
      out += "\n";
    out += print_transformer(items[i]);
  }
  return out;
}

namespace {

struct Line {
  unsigned number;
  std::string_view text;
  unsigned indent;
};

class Parser {
public:
  explicit Parser(std::string_view text) {
    unsigned n = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos)
        end = text.size();
      std::string_view raw = text.substr(start, end - start);
      ++n;
      if (const std::size_t c = raw.find("//"); c != std::string_view::npos)
        raw = raw.substr(0, c);
      unsigned indent = 0;
      while (indent < raw.size() && std::isspace(static_cast<unsigned char>(raw[indent])))
        ++indent;
      std::string_view body = raw.substr(indent);
      while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back())))
        body.remove_suffix(1);
      if (!body.empty())
        lines_.push_back({n, body, indent});
      start = end + 1;
    }
  }

  struct Block {
    std::string name;
    Program program;
    unsigned line;
  };
  struct Guard {
    std::string name;
    unsigned line;
  };
  // Items in order of appearance: blocks and guard directives.
  std::vector<Block> blocks;
  std::vector<Guard> guards;
  std::vector<std::pair<bool, std::size_t>> order; // (is_guard, index)

  void parse_all() {
    while (pos_ < lines_.size()) {
      const Line &l = lines_[pos_];
      if (l.text.starts_with("guard")) {
        std::string_view rest = trim(l.text.substr(5));
        if (rest.empty() || !is_identifier(rest))
          throw ParseError(l.number, l.indent + 1, "expected a transformer name after 'guard'");
        order.push_back({true, guards.size()});
        guards.push_back({std::string(rest), l.number});
        ++pos_;
        continue;
      }
      order.push_back({false, blocks.size()});
      blocks.push_back(parse_block());
    }
  }

private:
  std::vector<Line> lines_;
  std::size_t pos_ = 0;

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.remove_suffix(1);
    return s;
  }

  static bool is_identifier(std::string_view s) {
    if (s.empty())
      return false;
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
        return false;
    return true;
  }

  static std::vector<std::pair<std::string_view, unsigned>> split_commas(std::string_view s, unsigned col) {
    std::vector<std::pair<std::string_view, unsigned>> out;
    std::size_t start = 0;
    while (true) {
      const std::size_t c = s.find(',', start);
      std::string_view part = s.substr(start, c == std::string_view::npos ? std::string_view::npos : c - start);
      std::size_t lead = 0;
      while (lead < part.size() && std::isspace(static_cast<unsigned char>(part[lead])))
        ++lead;
      out.push_back({trim(part), col + static_cast<unsigned>(start + lead)});
      if (c == std::string_view::npos)
        break;
      start = c + 1;
    }
    return out;
  }

  Block parse_block() {
    const Line header = lines_[pos_++];
    const unsigned col0 = header.indent + 1;
    std::string_view h = header.text;
    if (!h.starts_with("fn "))
      throw ParseError(header.number, col0, "expected 'fn' or 'guard'");
    const std::size_t open = h.find('(');
    const std::size_t close = h.find(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      throw ParseError(header.number, col0, "malformed fn header");
    const std::string_view name = trim(h.substr(3, open - 3));
    if (!is_identifier(name))
      throw ParseError(header.number, col0 + 3, "invalid fn name");
    std::string_view after = trim(h.substr(close + 1));
    if (!after.starts_with("->") || !after.ends_with("{"))
      throw ParseError(header.number, col0 + static_cast<unsigned>(close) + 1, "expected '-> <domain> {'");
    const std::string_view tag = trim(after.substr(2, after.size() - 3));
    const std::optional<Domain> domain = parse_domain(tag);
    if (!domain)
      throw ParseError(header.number, col0 + static_cast<unsigned>(close) + 1,
                       "unknown domain '" + std::string(tag) + "'");
    std::vector<std::pair<std::string_view, unsigned>> slots;
    if (!trim(h.substr(open + 1, close - open - 1)).empty())
      slots = split_commas(h.substr(open + 1, close - open - 1), col0 + static_cast<unsigned>(open) + 1);
    if (slots.size() != 2 && slots.size() != 4)
      throw ParseError(header.number, col0 + static_cast<unsigned>(open) + 1, "expected 2 or 4 input slots");
    for (unsigned s = 0; s < slots.size(); ++s)
      if (slots[s].first != slot_name(*domain, s))
        throw ParseError(header.number, slots[s].second,
                         "expected slot '" + slot_name(*domain, s) + "', got '" + std::string(slots[s].first) + "'");
    const unsigned arity_ = static_cast<unsigned>(slots.size() / 2);
    const Program shape(*domain, arity_, ProgramKind::Transformer, {}, {0, 0});

    std::map<std::string, OperandIndex, std::less<>> names;
    for (unsigned s = 0; s < shape.num_slots(); ++s)
      names[slot_name(*domain, s)] = static_cast<OperandIndex>(s);
    for (unsigned k = 0; k < kConstantCount; ++k)
      names[std::string(constant_name(static_cast<ConstantKind>(k)))] = shape.constant_operand(static_cast<ConstantKind>(k));

    auto resolve = [&](std::string_view tok, unsigned line, unsigned col) -> OperandIndex {
      if (tok.empty())
        throw ParseError(line, col, "missing operand");
      const auto it = names.find(tok);
      if (it == names.end()) {
        if (tok.front() == '%')
          throw ParseError(line, col, "undefined variable " + std::string(tok));
        throw ParseError(line, col, "unknown operand '" + std::string(tok) + "'");
      }
      return it->second;
    };

    std::vector<Instruction> body;
    std::vector<OperandIndex> outputs;
    bool returned = false;
    while (true) {
      if (pos_ >= lines_.size())
        throw ParseError(header.number, col0, "unterminated fn block");
      const Line l = lines_[pos_++];
      const unsigned c0 = l.indent + 1;
      if (l.text == "}") {
        if (!returned)
          throw ParseError(l.number, c0, "fn block has no return");
        break;
      }
      if (returned)
        throw ParseError(l.number, c0, "instruction after return");
      if (l.text.starts_with("return")) {
        for (const auto &[tok, col] : split_commas(l.text.substr(6), c0 + 6))
          outputs.push_back(resolve(tok, l.number, col));
        if (outputs.size() != 1 && outputs.size() != 2)
          throw ParseError(l.number, c0, "return takes one or two operands");
        returned = true;
        continue;
      }
      const std::size_t eq = l.text.find('=');
      if (eq == std::string_view::npos)
        throw ParseError(l.number, c0, "expected '%name = opcode operands'");
      const std::string_view lhs = trim(l.text.substr(0, eq));
      if (lhs.size() < 2 || lhs.front() != '%' || !is_identifier(lhs.substr(1)))
        throw ParseError(l.number, c0, "invalid variable name '" + std::string(lhs) + "'");
      if (names.count(lhs))
        throw ParseError(l.number, c0, "redefinition of " + std::string(lhs));
      std::string_view rhs = l.text.substr(eq + 1);
      std::size_t lead = 0;
      while (lead < rhs.size() && std::isspace(static_cast<unsigned char>(rhs[lead])))
        ++lead;
      const unsigned rhs_col = c0 + static_cast<unsigned>(eq + 1 + lead);
      rhs = rhs.substr(lead);
      const std::size_t sp = rhs.find(' ');
      const std::string_view opname = rhs.substr(0, sp);
      const std::optional<Opcode> op = parse_opcode(opname);
      if (!op)
        throw ParseError(l.number, rhs_col, "unknown opcode '" + std::string(opname) + "'");
      Instruction ins;
      ins.op = *op;
      std::vector<std::pair<std::string_view, unsigned>> ops;
      if (sp != std::string_view::npos && !trim(rhs.substr(sp)).empty())
        ops = split_commas(rhs.substr(sp + 1), rhs_col + static_cast<unsigned>(sp) + 1);
      if (ops.size() != arity(*op))
        throw ParseError(l.number, rhs_col,
                         std::string(opname) + " takes " + std::to_string(arity(*op)) + " operand(s), got " +
                             std::to_string(ops.size()));
      for (std::size_t j = 0; j < ops.size(); ++j)
        ins.args[j] = resolve(ops[j].first, l.number, ops[j].second);
      names[std::string(lhs)] = shape.line_operand(body.size());
      body.push_back(ins);
    }
    const ProgramKind kind = outputs.size() == 2 ? ProgramKind::Transformer : ProgramKind::Condition;
    return {std::string(name), Program(*domain, arity_, kind, std::move(body), std::move(outputs)), header.number};
  }
};

} // namespace

Program parse_program(std::string_view text) {
  Parser p(text);
  p.parse_all();
  if (p.blocks.size() != 1 || !p.guards.empty())
    throw ParseError(1, 1, "expected exactly one fn block");
  return p.blocks.front().program;
}

std::vector<NamedTransformer> parse_transformers(std::string_view text) {
  Parser p(text);
  p.parse_all();
  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    if (by_name.count(p.blocks[i].name))
      throw ParseError(p.blocks[i].line, 1, "duplicate fn name '" + p.blocks[i].name + "'");
    by_name[p.blocks[i].name] = i;
  }
  std::vector<bool> used(p.blocks.size(), false);
  for (const auto &g : p.guards) {
    for (const char *suffix : {"_cond", "_body"}) {
      const auto it = by_name.find(g.name + suffix);
      if (it == by_name.end())
        throw ParseError(g.line, 1, "guard " + g.name + " needs fn " + g.name + suffix);
      used[it->second] = true;
    }
  }
  std::vector<NamedTransformer> out;
  for (const auto &[is_guard, idx] : p.order) {
    if (is_guard) {
      const auto &g = p.guards[idx];
      const auto &cond = p.blocks[by_name[g.name + "_cond"]];
      const auto &body = p.blocks[by_name[g.name + "_body"]];
      if (cond.program.kind() != ProgramKind::Condition)
        throw ParseError(cond.line, 1, cond.name + " must return a single operand");
      if (body.program.kind() != ProgramKind::Transformer)
        throw ParseError(body.line, 1, body.name + " must return two operands");
      if (cond.program.domain() != body.program.domain() || cond.program.arity() != body.program.arity())
        throw ParseError(g.line, 1, "guard " + g.name + " mixes domains or arities");
      out.push_back({g.name, Transformer{body.program, cond.program}});
      continue;
    }
    if (used[idx])
      continue;
    const auto &b = p.blocks[idx];
    if (b.program.kind() != ProgramKind::Transformer)
      throw ParseError(b.line, 1, b.name + " returns a condition but has no guard directive");
    out.push_back({b.name, Transformer{b.program, std::nullopt}});
  }
  return out;
}

std::vector<NamedTransformer> read_transformer_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_transformers(ss.str());
  } catch (const ParseError &e) {
    throw std::runtime_error(path + ":" + e.what());
  }
}

void write_transformer_file(const std::string &path, std::span<const NamedTransformer> items) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << print_transformers(items);
}

} // namespace xsynth
