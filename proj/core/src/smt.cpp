#include "xsynth/smt.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace xsynth {

namespace {

std::string bv(uint64_t v, unsigned w) {
  return "(_ bv" + std::to_string(v & width_mask(w)) + " " + std::to_string(w) + ")";
}
std::string app(const std::string &f, const std::string &a) { return "(" + f + " " + a + ")"; }
std::string app(const std::string &f, const std::string &a, const std::string &b) {
  return "(" + f + " " + a + " " + b + ")";
}
std::string ite(const std::string &c, const std::string &a, const std::string &b) {
  return "(ite " + c + " " + a + " " + b + ")";
}
std::string eq(const std::string &a, const std::string &b) { return app("=", a, b); }
std::string bit(const std::string &x, unsigned i) {
  return "((_ extract " + std::to_string(i) + " " + std::to_string(i) + ") " + x + ")";
}
std::string zext(const std::string &x, unsigned by) { return "((_ zero_extend " + std::to_string(by) + ") " + x + ")"; }
std::string sext(const std::string &x, unsigned by) { return "((_ sign_extend " + std::to_string(by) + ") " + x + ")"; }
std::string extract(const std::string &x, unsigned hi, unsigned lo) {
  return "((_ extract " + std::to_string(hi) + " " + std::to_string(lo) + ") " + x + ")";
}

/// Index of the first set bit scanning from the top (leading) or bottom.
std::string count_zeros(const std::string &x, unsigned w, bool leading) {
  std::string acc = bv(w, w);
  // Build from the far end so that the nearest set bit wins.
  for (unsigned k = w; k-- > 0;) {
    const unsigned pos = leading ? w - 1 - k : k;
    acc = ite(eq(bit(x, pos), "#b1"), bv(k, w), acc);
  }
  return acc;
}

std::string clamp_count(const std::string &k, unsigned w) {
  return ite(app("bvugt", k, bv(w, w)), bv(w, w), k);
}

std::string div_guard(const std::string &f, const std::string &a, const std::string &b, unsigned w) {
  return ite(eq(b, bv(0, w)), bv(0, w), app(f, a, b));
}

} // namespace

std::string smt_primitive(Opcode op, const std::string &a, const std::string &b, const std::string &c, unsigned w) {
  const std::string ones = bv(width_mask(w), w);
  const std::string sign = bv(sign_bit(w), w);
  switch (op) {
  case Opcode::And: return app("bvand", a, b);
  case Opcode::Or: return app("bvor", a, b);
  case Opcode::Xor: return app("bvxor", a, b);
  case Opcode::Neg: return app("bvnot", a);
  case Opcode::Add: return app("bvadd", a, b);
  case Opcode::Sub: return app("bvsub", a, b);
  case Opcode::Umax: return ite(app("bvuge", a, b), a, b);
  case Opcode::Umin: return ite(app("bvule", a, b), a, b);
  case Opcode::Smax: return ite(app("bvsge", a, b), a, b);
  case Opcode::Smin: return ite(app("bvsle", a, b), a, b);
  case Opcode::Mul: return app("bvmul", a, b);
  case Opcode::Udiv: return div_guard("bvudiv", a, b, w);
  case Opcode::Sdiv: return div_guard("bvsdiv", a, b, w);
  case Opcode::Urem: return div_guard("bvurem", a, b, w);
  case Opcode::Srem: return div_guard("bvsrem", a, b, w);
  case Opcode::Shl: return app("bvshl", a, b);
  case Opcode::Ashr: return app("bvashr", a, b);
  case Opcode::Lshr: return app("bvlshr", a, b);
  case Opcode::SetHighBits: return app("bvor", a, app("bvnot", app("bvlshr", ones, clamp_count(b, w))));
  case Opcode::SetLowBits: return app("bvor", a, app("bvnot", app("bvshl", ones, clamp_count(b, w))));
  case Opcode::ClearLowBits: return app("bvand", a, app("bvshl", ones, clamp_count(b, w)));
  case Opcode::ClearHighBits: return app("bvand", a, app("bvlshr", ones, clamp_count(b, w)));
  case Opcode::SetSignBit: return app("bvor", a, sign);
  case Opcode::ClearSignBit: return app("bvand", a, app("bvnot", sign));
  case Opcode::CountLeftOne: return count_zeros(app("bvnot", a), w, true);
  case Opcode::CountLeftZero: return count_zeros(a, w, true);
  case Opcode::CountRightOne: return count_zeros(app("bvnot", a), w, false);
  case Opcode::CountRightZero: return count_zeros(a, w, false);
  case Opcode::IfThenElse: return ite(app("distinct", a, bv(0, w)), b, c);
  }
  return a;
}

namespace {

struct OpTerm {
  std::string value;
  std::string constraint = "true";
};

OpTerm concrete_term(OpId op, const std::string &a, const std::string &b, unsigned w) {
  const std::string zero = bv(0, w);
  const std::string ones = bv(width_mask(w), w);
  const std::string smin = bv(sign_bit(w), w);
  const std::string smax = bv(width_mask(w) >> 1, w);
  // Overflow checks in width+1 arithmetic.
  const std::string wide_uadd = app("bvadd", zext(a, 1), zext(b, 1));
  const std::string no_uadd_ovf = eq(extract(wide_uadd, w, w), "#b0");
  const std::string no_sadd_ovf = eq(app("bvadd", sext(a, 1), sext(b, 1)), sext(app("bvadd", a, b), 1));
  const std::string no_usub_ovf = app("bvuge", a, b);
  const std::string no_ssub_ovf = eq(app("bvsub", sext(a, 1), sext(b, 1)), sext(app("bvsub", a, b), 1));
  const std::string nonzero = app("distinct", b, zero);
  const std::string shift_ok = app("bvule", b, bv(w, w));
  auto both = [](const std::string &x, const std::string &y) { return "(and " + x + " " + y + ")"; };
  // Shifts of a 2w-bit extension never lose bits because the amount is at most w.
  const std::string wide_b = zext(b, w);
  const std::string wide_shl_s = app("bvshl", sext(a, w), wide_b);
  const std::string wide_shl_u = app("bvshl", zext(a, w), wide_b);
  const std::string fits_s = eq(sext(extract(wide_shl_s, w - 1, 0), w), wide_shl_s);
  const std::string fits_u = eq(extract(wide_shl_u, 2 * w - 1, w), bv(0, w));
  const std::string is_neg = app("bvslt", a, zero);

  switch (op) {
  case OpId::Add: return {app("bvadd", a, b)};
  case OpId::AddNuw: return {app("bvadd", a, b), no_uadd_ovf};
  case OpId::AddNsw: return {app("bvadd", a, b), no_sadd_ovf};
  case OpId::AddNswNuw: return {app("bvadd", a, b), both(no_uadd_ovf, no_sadd_ovf)};
  case OpId::Sub: return {app("bvsub", a, b)};
  case OpId::SubNuw: return {app("bvsub", a, b), no_usub_ovf};
  case OpId::SubNsw: return {app("bvsub", a, b), no_ssub_ovf};
  case OpId::SubNswNuw: return {app("bvsub", a, b), both(no_usub_ovf, no_ssub_ovf)};
  case OpId::Mul: return {app("bvmul", a, b)};
  case OpId::And: return {app("bvand", a, b)};
  case OpId::Or: return {app("bvor", a, b)};
  case OpId::Xor: return {app("bvxor", a, b)};
  case OpId::Udiv: return {app("bvudiv", a, b), nonzero};
  case OpId::UdivExact: return {app("bvudiv", a, b), both(nonzero, eq(app("bvurem", a, b), zero))};
  case OpId::Sdiv: return {app("bvsdiv", a, b), nonzero};
  case OpId::SdivExact: return {app("bvsdiv", a, b), both(nonzero, eq(app("bvsrem", a, b), zero))};
  case OpId::Modu: return {app("bvurem", a, b), nonzero};
  case OpId::Mods: return {app("bvsrem", a, b), nonzero};
  case OpId::Umax: return {ite(app("bvuge", a, b), a, b)};
  case OpId::Umin: return {ite(app("bvule", a, b), a, b)};
  case OpId::Smax: return {ite(app("bvsge", a, b), a, b)};
  case OpId::Smin: return {ite(app("bvsle", a, b), a, b)};
  case OpId::Abds: return {ite(app("bvsge", a, b), app("bvsub", a, b), app("bvsub", b, a))};
  case OpId::Abdu: return {ite(app("bvuge", a, b), app("bvsub", a, b), app("bvsub", b, a))};
  case OpId::AvgFloorU: return {extract(app("bvlshr", wide_uadd, bv(1, w + 1)), w - 1, 0)};
  case OpId::AvgCeilU:
    return {extract(app("bvlshr", app("bvadd", wide_uadd, bv(1, w + 1)), bv(1, w + 1)), w - 1, 0)};
  case OpId::AvgFloorS:
    return {extract(app("bvashr", app("bvadd", sext(a, 1), sext(b, 1)), bv(1, w + 1)), w - 1, 0)};
  case OpId::AvgCeilS:
    return {extract(app("bvashr", app("bvadd", app("bvadd", sext(a, 1), sext(b, 1)), bv(1, w + 1)), bv(1, w + 1)),
                    w - 1, 0)};
  case OpId::UaddSat: return {ite(no_uadd_ovf, app("bvadd", a, b), ones)};
  case OpId::UsubSat: return {ite(no_usub_ovf, app("bvsub", a, b), zero)};
  case OpId::Shl: return {app("bvshl", a, b), shift_ok};
  case OpId::ShlNuw: return {app("bvshl", a, b), both(shift_ok, fits_u)};
  case OpId::ShlNsw: return {app("bvshl", a, b), both(shift_ok, fits_s)};
  case OpId::ShlNswNuw: return {app("bvshl", a, b), "(and " + shift_ok + " " + fits_u + " " + fits_s + ")"};
  case OpId::Lshr: return {app("bvlshr", a, b), shift_ok};
  case OpId::LshrExact: return {app("bvlshr", a, b), both(shift_ok, eq(app("bvshl", app("bvlshr", a, b), b), a))};
  case OpId::Ashr: return {app("bvashr", a, b), shift_ok};
  case OpId::AshrExact: return {app("bvashr", a, b), both(shift_ok, eq(app("bvshl", app("bvashr", a, b), b), a))};
  case OpId::SshlSat:
    return {ite(fits_s, extract(wide_shl_s, w - 1, 0), ite(is_neg, smin, smax)), shift_ok};
  case OpId::UshlSat: return {ite(fits_u, extract(wide_shl_u, w - 1, 0), ones), shift_ok};
  case OpId::Abs: return {ite(is_neg, app("bvneg", a), a)};
  case OpId::CountRZero: return {count_zeros(a, w, false)};
  case OpId::CountLZero: return {count_zeros(a, w, true)};
  case OpId::PopCount: {
    std::string acc = bv(0, w);
    for (unsigned i = 0; i < w; ++i)
      acc = app("bvadd", acc, w == 1 ? bit(a, 0) : zext(bit(a, i), w - 1));
    return {acc};
  }
  }
  return {a};
}

std::string contains_term(Domain d, const std::string &f0, const std::string &f1, const std::string &c, unsigned w) {
  switch (d) {
  case Domain::KnownBits:
    return "(and " + eq(app("bvand", c, f0), bv(0, w)) + " " + eq(app("bvand", app("bvnot", c), f1), bv(0, w)) + ")";
  case Domain::URange: return "(and " + app("bvule", f0, c) + " " + app("bvule", c, f1) + ")";
  case Domain::SRange: return "(and " + app("bvsle", f0, c) + " " + app("bvsle", c, f1) + ")";
  }
  return "false";
}

std::string well_formed(Domain d, const std::string &f0, const std::string &f1, unsigned w) {
  switch (d) {
  case Domain::KnownBits: return eq(app("bvand", f0, f1), bv(0, w));
  case Domain::URange: return app("bvule", f0, f1);
  case Domain::SRange: return app("bvsle", f0, f1);
  }
  return "true";
}

std::string ident(const std::string &slot) {
  std::string s = slot;
  for (char &ch : s)
    if (ch == '.')
      ch = '_';
  return s;
}

/// Emits define-funs for the live lines of `p`; returns the output terms.
std::vector<std::string> emit_program(std::ostream &out, const Program &p, const std::string &prefix, unsigned w) {
  const std::vector<bool> live = p.live_lines();
  auto term = [&](OperandIndex o) -> std::string {
    if (o < p.first_constant())
      return ident(slot_name(p.domain(), o));
    if (o < p.first_instruction())
      return bv(constant_bits(static_cast<ConstantKind>(o - p.first_constant()), w), w);
    return prefix + std::to_string(o - p.first_instruction());
  };
  const std::string sort = "(_ BitVec " + std::to_string(w) + ")";
  for (std::size_t i = 0; i < p.body().size(); ++i) {
    if (!live[i])
      continue;
    const Instruction &ins = p.body()[i];
    const unsigned n = arity(ins.op);
    out << "(define-fun " << prefix << i << " () " << sort << " "
        << smt_primitive(ins.op, term(ins.args[0]), n > 1 ? term(ins.args[1]) : "", n > 2 ? term(ins.args[2]) : "", w)
        << ")\n";
  }
  std::vector<std::string> outs;
  for (OperandIndex o : p.outputs())
    outs.push_back(term(o));
  return outs;
}

} // namespace

std::string export_smt(const Transformer &t, OpId op, Domain domain, unsigned w) {
  assert(w >= 1 && w <= kMaxWidth);
  const unsigned arity_ = op_arity(op);
  std::ostringstream out;
  const std::string sort = "(_ BitVec " + std::to_string(w) + ")";
  out << "; soundness query: op " << op_name(op) << ", domain " << domain_tag(domain) << ", width " << w << "\n";
  out << "; unsat means no input tuple escapes the transformer output\n";
  out << "(set-logic QF_BV)\n";
  for (unsigned s = 0; s < 2 * arity_; ++s)
    out << "(declare-const " << ident(slot_name(domain, s)) << " " << sort << ")\n";
  for (unsigned i = 0; i < arity_; ++i)
    out << "(declare-const c" << i << " " << sort << ")\n";
  const std::vector<std::string> body = emit_program(out, t.body, "b", w);
  std::string guard = "true";
  if (t.condition) {
    const std::vector<std::string> c = emit_program(out, *t.condition, "g", w);
    guard = app("distinct", c[0], bv(0, w));
  }
  const OpTerm r = concrete_term(op, "c0", arity_ > 1 ? "c1" : "c0", w);
  out << "(define-fun r () " << sort << " " << r.value << ")\n";
  for (unsigned i = 0; i < arity_; ++i) {
    const std::string f0 = ident(slot_name(domain, 2 * i)), f1 = ident(slot_name(domain, 2 * i + 1));
    const std::string c = "c" + std::to_string(i);
    out << "(assert " << well_formed(domain, f0, f1, w) << ")\n";
    out << "(assert " << contains_term(domain, f0, f1, c, w) << ")\n";
  }
  out << "(assert " << r.constraint << ")\n";
  out << "(assert (and " << guard << " (not " << contains_term(domain, body[0], body[1], "r", w) << ")))\n";
  out << "(check-sat)\n";
  return out.str();
}

std::string_view answer_name(SolverAnswer a) {
  switch (a) {
  case SolverAnswer::Sat: return "sat";
  case SolverAnswer::Unsat: return "unsat";
  case SolverAnswer::Unknown: return "unknown";
  }
  return "";
}

namespace {

std::optional<SolverAnswer> parse_answer(std::string_view line) {
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
    line.remove_suffix(1);
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front())))
    line.remove_prefix(1);
  if (line == "sat")
    return SolverAnswer::Sat;
  if (line == "unsat")
    return SolverAnswer::Unsat;
  if (line == "unknown" || line == "timeout")
    return SolverAnswer::Unknown;
  return std::nullopt;
}

/// Parses "((name #b0101) (name2 #x0f) (name3 (_ bv5 8)))".
std::map<std::string, uint64_t> parse_model(const std::string &text) {
  std::map<std::string, uint64_t> model;
  std::size_t i = 0;
  while ((i = text.find('(', i)) != std::string::npos) {
    ++i;
    std::size_t j = i;
    while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
      ++j;
    if (j == i)
      continue;
    const std::string name = text.substr(i, j - i);
    while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j])))
      ++j;
    if (text.compare(j, 2, "#b") == 0) {
      std::size_t k = j + 2;
      uint64_t v = 0;
      while (k < text.size() && (text[k] == '0' || text[k] == '1'))
        v = (v << 1) | static_cast<uint64_t>(text[k++] - '0');
      model[name] = v;
    } else if (text.compare(j, 2, "#x") == 0) {
      std::size_t k = j + 2;
      uint64_t v = 0;
      while (k < text.size() && std::isxdigit(static_cast<unsigned char>(text[k])))
        v = (v << 4) | std::stoull(std::string(1, text[k++]), nullptr, 16);
      model[name] = v;
    } else if (text.compare(j, 6, "(_ bv") == 0) {
      model[name] = std::stoull(text.substr(j + 5));
    }
  }
  return model;
}

std::vector<std::string> declared_constants(const std::string &query) {
  std::vector<std::string> names;
  std::istringstream in(query);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("(declare-const ", 0) == 0)
      names.push_back(line.substr(15, line.find(' ', 15) - 15));
  return names;
}

} // namespace

SolverResult run_solver(const std::string &command, const std::string &query, unsigned timeout_seconds) {
  SolverResult res;
  if (command.empty())
    return res;
  std::string full = query;
  const std::vector<std::string> names = declared_constants(query);
  if (!names.empty()) {
    full += "(get-value (";
    for (std::size_t i = 0; i < names.size(); ++i)
      full += (i ? " " : "") + names[i];
    full += "))\n";
  }
  const auto dir = std::filesystem::temp_directory_path();
  std::random_device rd;
  const auto path = dir / ("xsynth_query_" + std::to_string(rd()) + std::to_string(rd()) + ".smt2");
  std::ofstream(path) << full;
  const std::string cmd =
      "timeout " + std::to_string(timeout_seconds) + " " + command + " " + path.string() + " 2>&1";
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(path);
    return res;
  }
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe))
    res.output += buf;
  pclose(pipe);
  std::filesystem::remove(path);
  // Solvers in print-success mode echo "success" for each command first.
  std::istringstream in(res.output);
  std::string first;
  std::size_t consumed = 0;
  while (std::getline(in, first)) {
    consumed += first.size() + 1;
    if (first != "success")
      break;
  }
  res.answer = parse_answer(first).value_or(SolverAnswer::Unknown);
  if (res.answer == SolverAnswer::Sat)
    res.model = parse_model(res.output.substr(std::min(consumed, res.output.size())));
  return res;
}

std::optional<SolverAnswer> read_result_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    return std::nullopt;
  std::string line;
  std::getline(in, line);
  return parse_answer(line);
}

std::string find_solver() {
  const char *path = std::getenv("PATH");
  if (!path)
    return "";
  for (const char *name : {"z3", "cvc5", "yices-smt2"}) {
    std::istringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      const auto candidate = std::filesystem::path(dir) / name;
      std::error_code ec;
      if (!dir.empty() && std::filesystem::is_regular_file(candidate, ec))
        return candidate.string();
    }
  }
  return "";
}

std::string smt_file_name(OpId op, Domain domain, const std::string &candidate, unsigned width) {
  return std::string(op_name(op)) + "_" + std::string(domain_tag(domain)) + "_" + candidate + "_" +
         std::to_string(width) + ".smt2";
}

} // namespace xsynth
