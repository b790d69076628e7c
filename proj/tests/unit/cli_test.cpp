#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "xsynth/dsl.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = XSYNTH_CLI;
const char *kUremFile = XSYNTH_TEST_DATA "/urem_kb_examples.xs";

int run(const std::string &args) {
  const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string &name) {
  const fs::path d = fs::temp_directory_path() / ("xsynth_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

nlohmann::json read_json(const fs::path &p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

const std::string kQuick = " --chains 4 --inner-steps 200 --outer-iters 1 --threads 1 --quiet";

} // namespace

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    if (kCli.empty())
      GTEST_SKIP() << "command line tool not built";
  }
};

TEST_F(Cli, RejectsUnknownOperationAndDomain) {
  EXPECT_NE(run("synth --op Frobnicate"), 0);
  EXPECT_NE(run("synth --op And --domain xx"), 0);
  EXPECT_NE(run("bogus"), 0);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, SynthWritesMembersAndReport) {
  const fs::path out = fresh_dir("synth");
  ASSERT_EQ(run("synth --op Modu --domain kb --seed 7" + kQuick + " --out " + out.string()), 0);
  ASSERT_TRUE(fs::exists(out / "modu_kb.xs"));
  ASSERT_TRUE(fs::exists(out / "modu_kb_report.json"));
  const auto set = xsynth::read_transformer_file((out / "modu_kb.xs").string());
  EXPECT_GE(set.size(), 1u);
  for (const auto &m : set)
    EXPECT_TRUE(fs::exists(out / (m.name + ".xs"))) << m.name;
  const nlohmann::json rep = read_json(out / "modu_kb_report.json");
  EXPECT_EQ(rep["op"], "Modu");
  EXPECT_EQ(rep["domain"], "kb");
  EXPECT_EQ(rep["result"]["members"].size(), set.size());
  EXPECT_TRUE(rep.contains("timing"));
  fs::remove_all(out);
}

TEST_F(Cli, BasicDslRestrictsOpcodes) {
  const fs::path out = fresh_dir("basic");
  ASSERT_EQ(run("synth --op Xor --domain kb --dsl basic" + kQuick + " --out " + out.string()), 0);
  const nlohmann::json rep = read_json(out / "xor_kb_report.json");
  std::set<std::string> ops;
  for (const auto &o : rep["config"]["opcodes"])
    ops.insert(o.get<std::string>());
  EXPECT_EQ(ops, (std::set<std::string>{"and", "or", "xor", "neg", "add", "sub"}));
  fs::remove_all(out);
}

TEST_F(Cli, NoAbductionLogsNoAbductionChains) {
  const fs::path out = fresh_dir("noabd");
  ASSERT_EQ(run("synth --op Modu --domain kb --no-abduction" + kQuick + " --out " + out.string()), 0);
  const nlohmann::json rep = read_json(out / "modu_kb_report.json");
  EXPECT_FALSE(rep["config"]["abduction"].get<bool>());
  ASSERT_FALSE(rep["iterations"].empty());
  for (const auto &it : rep["iterations"])
    EXPECT_EQ(it["abduction_chains"].get<int>(), 0);
  fs::remove_all(out);
}

TEST_F(Cli, SameSeedGivesSameReport) {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  ASSERT_EQ(run("synth --op Or --domain cru --seed 5" + kQuick + " --out " + a.string()), 0);
  ASSERT_EQ(run("synth --op Or --domain cru --seed 5" + kQuick + " --out " + b.string()), 0);
  nlohmann::json ra = read_json(a / "or_cru_report.json"), rb = read_json(b / "or_cru_report.json");
  ra.erase("timing");
  rb.erase("timing");
  EXPECT_EQ(ra, rb);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_F(Cli, EvalAndExport) {
  const fs::path out = fresh_dir("eval");
  EXPECT_EQ(run("eval --op Modu --domain kb --synth " + std::string(kUremFile) +
                " --exact-samples 200 --norm-samples 100 --norm-concrete 100 --json " + (out / "rows.json").string()),
            0);
  const nlohmann::json rows = read_json(out / "rows.json");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["metric"], "exact_pct");
  EXPECT_EQ(run("export-smt --op Modu --domain kb --in " + std::string(kUremFile) + " --width 4 --out " +
                out.string()),
            0);
  std::size_t files = 0;
  for (const auto &e : fs::directory_iterator(out))
    files += e.path().extension() == ".smt2";
  EXPECT_EQ(files, 2u);
  // Wrong domain for the file.
  EXPECT_NE(run("eval --op Modu --domain cru --synth " + std::string(kUremFile)), 0);
  fs::remove_all(out);
}
