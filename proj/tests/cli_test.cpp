#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lazypair/cli.hpp"

namespace {

namespace fs = std::filesystem;
using lazypair::cli::kExitCheckFailed;
using lazypair::cli::kExitPass;
using lazypair::cli::kExitUsage;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = lazypair::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lazypair_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

TEST_F(CliTest, GenSortWritesTwoNPlusOneLines) {
  auto r = cli({"gen", "--kind", "sort", "--n", "3", "--seed", "1", "--out", path("t.txt")});
  EXPECT_EQ(r.code, kExitPass) << r.err;
  EXPECT_EQ(count_lines(read(path("t.txt"))), 7);
}

TEST_F(CliTest, GenIsDeterministic) {
  for (const char* name : {"a.txt", "b.txt"}) {
    ASSERT_EQ(cli({"gen", "--kind", "random", "--n", "500", "--seed", "7", "--out", path(name)}).code, 0);
  }
  EXPECT_EQ(read(path("a.txt")), read(path("b.txt")));
}

TEST_F(CliTest, GenUsageErrors) {
  EXPECT_EQ(cli({"gen", "--kind", "sort", "--out", path("t.txt")}).code, kExitUsage);
  EXPECT_EQ(cli({"gen", "--kind", "heap", "--n", "3", "--out", path("t.txt")}).code, kExitUsage);
  EXPECT_EQ(cli({"gen", "--kind", "random", "--n", "3", "--mix", "1,1,1,1,1", "--out", path("t.txt")}).code,
            kExitUsage);
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
}

TEST_F(CliTest, RunCheckPasses) {
  cli({"gen", "--kind", "sort", "--n", "3", "--out", path("t.txt")});
  for (const char* variant : {"lazy", "eager"}) {
    auto r = cli({"run", "--trace", path("t.txt"), "--variant", variant, "--check"});
    EXPECT_EQ(r.code, kExitPass) << r.err;
    EXPECT_EQ(r.out.substr(0, 12), "PASS, ops=7\n");
  }
}

TEST_F(CliTest, VariantsDifferOnlyWhenDecreasesOccur) {
  cli({"gen", "--kind", "sort", "--n", "3", "--out", path("s.txt")});
  EXPECT_EQ(cli({"run", "--trace", path("s.txt")}).out,
            cli({"run", "--trace", path("s.txt"), "--variant", "eager"}).out);
  cli({"gen", "--kind", "dijkstra", "--n", "300", "--out", path("d.txt")});
  auto lazy = cli({"run", "--trace", path("d.txt"), "--check"});
  auto eager = cli({"run", "--trace", path("d.txt"), "--variant", "eager", "--check"});
  EXPECT_EQ(lazy.code, kExitPass);
  EXPECT_EQ(eager.code, kExitPass);
  EXPECT_NE(lazy.out, eager.out);
}

TEST_F(CliTest, GeneratedTracesReplayUnderCheck) {
  for (const char* kind : {"random", "sort", "dijkstra"}) {
    for (const char* seed : {"1", "2", "3"}) {
      ASSERT_EQ(cli({"gen", "--kind", kind, "--n", "400", "--seed", seed, "--out", path("t.txt")}).code,
                kExitPass);
      auto r = cli({"run", "--trace", path("t.txt"), "--check"});
      EXPECT_EQ(r.code, kExitPass) << kind << " seed " << seed << ": " << r.out << r.err;
    }
  }
}

TEST_F(CliTest, RunPolicyFlags) {
  cli({"gen", "--kind", "random", "--n", "2000", "--out", path("t.txt")});
  EXPECT_EQ(cli({"run", "--trace", path("t.txt"), "--check", "--no-meld-cleanup", "--periodic", "2",
                 "--direct-relink", "0.5"})
                .code,
            kExitPass);
  EXPECT_EQ(cli({"run", "--trace", path("t.txt"), "--variant", "eager", "--periodic", "2"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--trace", path("t.txt"), "--periodic", "0"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--trace", path("t.txt"), "--variant", "fast"}).code, kExitUsage);
}

TEST_F(CliTest, RunWritesMetricsCsv) {
  cli({"gen", "--kind", "sort", "--n", "3", "--out", path("t.txt")});
  ASSERT_EQ(cli({"run", "--trace", path("t.txt"), "--metrics", path("m.csv")}).code, kExitPass);
  const std::string csv = read(path("m.csv"));
  EXPECT_EQ(count_lines(csv), 8);
  EXPECT_EQ(csv.substr(0, 9), "op_index,");
}

TEST_F(CliTest, CorruptTraceNamesTheLine) {
  auto t = write("bad.txt", "new h\ninsert h a 1\ninsert h b\n");
  auto r = cli({"run", "--trace", t});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"run", "--trace", path("missing.txt")}).code, kExitUsage);
}

TEST_F(CliTest, SemanticallyInvalidTraceFails) {
  auto t = write("empty.txt", "new h\ndeletemin h\n");
  auto r = cli({"run", "--trace", t, "--check"});
  EXPECT_EQ(r.code, kExitCheckFailed);
  EXPECT_EQ(r.out.substr(0, 13), "FAIL at op 1:");
}

TEST_F(CliTest, AuditWithoutDeleteMinsHasZeroPotential) {
  auto t = write("t.txt", "new h\ninsert h a 3\ninsert h b 1\n");
  auto r = cli({"audit", "--trace", t, "--out", path("r.txt")});
  EXPECT_EQ(r.code, kExitPass) << r.err;
  EXPECT_EQ(r.out, "PASS, snapshots=3\n");
  const std::string rep = read(path("r.txt"));
  EXPECT_NE(rep.find("phi=0\n"), std::string::npos);
  EXPECT_NE(rep.find("status=PASS\n"), std::string::npos);
}

TEST_F(CliTest, AuditFinalSnapshotOnly) {
  cli({"gen", "--kind", "random", "--n", "300", "--out", path("t.txt")});
  auto r = cli({"audit", "--trace", path("t.txt"), "--out", path("r.txt"), "--snapshots", "final"});
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_EQ(r.out, "PASS, snapshots=1\n");
  EXPECT_EQ(cli({"audit", "--trace", path("t.txt"), "--out", path("r.txt"), "--snapshots", "some"}).code,
            kExitUsage);
}

// Drops the rep and wall_ns columns so repetitions can be compared.
std::vector<std::string> strip_wall(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string field, row;
    for (int i = 0; std::getline(ls, field, ','); ++i) {
      if (i != 3 && i != 12) row += field + ",";
    }
    rows.push_back(row);
  }
  return rows;
}

TEST_F(CliTest, BenchRepsAreDeterministic) {
  auto r = cli({"bench", "--kind", "sort", "--sizes", "64,256", "--reps", "2", "--variants", "lazy,eager"});
  ASSERT_EQ(r.code, kExitPass) << r.err;
  auto rows = strip_wall(r.out);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0].substr(0, 10), "kind,size,");
  for (std::size_t i = 1; i < rows.size(); i += 2) EXPECT_EQ(rows[i], rows[i + 1]);
}

TEST_F(CliTest, BenchToFileAndUnknownVariant) {
  EXPECT_EQ(cli({"bench", "--sizes", "32", "--out", path("b.csv")}).code, kExitPass);
  EXPECT_EQ(count_lines(read(path("b.csv"))), 3);
  EXPECT_EQ(cli({"bench", "--sizes", "32", "--variants", "lazy,turbo"}).code, kExitUsage);
  EXPECT_EQ(cli({"bench", "--kind", "random", "--sizes", "200", "--variants",
                 "lazy-nomeld,lazy-periodic,lazy-direct"})
                .code,
            kExitPass);
}

TEST(ParseVariant, Names) {
  using lazypair::cli::parse_variant;
  EXPECT_EQ(parse_variant("eager")->mode, lazypair::Mode::Eager);
  EXPECT_FALSE(parse_variant("lazy-nomeld")->cleanup_on_meld);
  EXPECT_TRUE(parse_variant("lazy-periodic")->periodic_cleanup);
  EXPECT_TRUE(parse_variant("lazy-direct")->direct_relink);
  EXPECT_FALSE(parse_variant("lazier").has_value());
}

#ifdef LAZYPAIR_CLI_PATH
TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = LAZYPAIR_CLI_PATH;
  const std::string t = path("t.txt");
  auto code = [](const std::string& cmd) {
    int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  EXPECT_EQ(code(bin + " gen --kind sort --n 5 --out " + t), 0);
  EXPECT_EQ(code(bin + " run --trace " + t + " --check"), 0);
  EXPECT_EQ(code(bin + " run"), 2);
  EXPECT_EQ(code(bin + " --help"), 0);
}
#endif

}  // namespace
