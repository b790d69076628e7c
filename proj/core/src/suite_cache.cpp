#include <fstream>
#include <sstream>

#include "xsynth/oracle.hpp"

namespace xsynth {

namespace {

constexpr const char *kMagic = "xsynth-suite";
constexpr int kVersion = 1;

std::string key_line(OpId op, Domain domain, const SuitePolicy &policy, uint64_t seed) {
  std::ostringstream out;
  out << "key " << op_name(op) << " " << domain_tag(domain) << " " << seed << " " << policy.key();
  return out.str();
}

} // namespace

std::string suite_cache_name(OpId op, Domain domain, const SuitePolicy &policy, uint64_t seed) {
  // The policy key is long; hash it to keep file names short.
  const std::size_t h = std::hash<std::string>{}(policy.key());
  std::ostringstream out;
  out << op_name(op) << "_" << domain_tag(domain) << "_s" << seed << "_" << std::hex << h << ".suite";
  return out.str();
}

void save_suite(const TestSuite &suite, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << kMagic << " " << kVersion << "\n";
  out << key_line(suite.op, suite.domain, suite.policy, suite.seed) << "\n";
  out << "groups " << suite.groups.size() << "\n";
  out << std::hex;
  for (const WidthGroup &g : suite.groups) {
    out << "group " << std::dec << g.width << " " << static_cast<int>(g.tier) << " " << g.inputs.size << " "
        << g.concrete_samples << " " << g.skipped << std::hex << "\n";
    for (std::size_t r = 0; r < g.inputs.size; ++r) {
      for (const auto &col : g.inputs.slots)
        out << col[r] << " ";
      out << g.best.f0[r] << " " << g.best.f1[r] << "\n";
    }
  }
}

bool load_suite(const std::string &path, OpId op, Domain domain, const SuitePolicy &policy, uint64_t seed,
                TestSuite &out) {
  std::ifstream in(path);
  if (!in)
    return false;
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic || version != kVersion)
    return false;
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  if (line != key_line(op, domain, policy, seed))
    return false;
  std::string word;
  std::size_t ngroups = 0;
  in >> word >> ngroups;
  if (word != "groups")
    return false;
  TestSuite s;
  s.op = op;
  s.domain = domain;
  s.policy = policy;
  s.seed = seed;
  const unsigned nslots = 2 * op_arity(op);
  for (std::size_t gi = 0; gi < ngroups; ++gi) {
    WidthGroup g;
    int tier = 0;
    std::size_t rows = 0;
    in >> std::dec >> word >> g.width >> tier >> rows >> g.concrete_samples >> g.skipped;
    if (!in || word != "group" || g.width < 1 || g.width > kMaxWidth)
      return false;
    g.tier = static_cast<Tier>(tier);
    g.inputs = ColumnBlock(g.width, nslots);
    in >> std::hex;
    for (std::size_t r = 0; r < rows; ++r) {
      for (unsigned k = 0; k < nslots; ++k) {
        uint64_t v = 0;
        in >> v;
        g.inputs.slots[k].push_back(v);
      }
      uint64_t b0 = 0, b1 = 0;
      in >> b0 >> b1;
      g.best.f0.push_back(b0);
      g.best.f1.push_back(b1);
    }
    if (!in)
      return false;
    g.inputs.size = rows;
    g.inputs.finalize();
    s.groups.push_back(std::move(g));
  }
  out = std::move(s);
  return true;
}

} // namespace xsynth
