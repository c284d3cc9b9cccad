#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "conewave/io.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("conewave_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int run(const std::string& args) {
    const std::string cmd = std::string(CONEWAVE_CLI) + " " + args + " >" + (dir_ / "stdout.txt").string() + " 2>" +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string stderr_text() const { return conewave::read_file(dir_ / "stderr.txt"); }

  // file checksum lines of a manifest
  static std::string files_section(const fs::path& manifest) {
    const std::string m = conewave::read_file(manifest);
    return m.substr(m.find("# files"));
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, UnknownConfigKeyIsBadInput) {
  const fs::path c = config("c.txt", "grid_n=32\ncolour=red\n");
  EXPECT_EQ(run("analyze --config " + c.string() + " --output " + (dir_ / "out").string()), 2);
  EXPECT_NE(stderr_text().find(":2: unknown key 'colour'"), std::string::npos);
}

TEST_F(Cli, MissingConfigAndBadFlagsAreBadInput) {
  EXPECT_EQ(run("analyze --config " + (dir_ / "absent.txt").string()), 2);
  EXPECT_EQ(run("analyze --filter q7"), 2);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run(""), 2);
}

TEST_F(Cli, ConfigAndFieldFileGridsMustAgree) {
  const conewave::FrequencyGrid g = conewave::build_frequency_grid(16, 16, 4.0);
  conewave::write_raster(dir_ / "f.sgrid", g, conewave::Raster<double>(16, 16));
  const fs::path c = config("c.txt", "grid_n=32\nextent=4\nfield=" + (dir_ / "f.sgrid").string() + "\n");
  EXPECT_EQ(run("analyze --config " + c.string() + " --output " + (dir_ / "out").string()), 2);
}

TEST_F(Cli, EmptySchemeFailsReconstruction) {
  const fs::path c = config("c.txt", "grid_n=64\nextent=16\nbands=0\n");
  EXPECT_EQ(run("synthesize --config " + c.string() + " --output " + (dir_ / "out").string()), 1);
  EXPECT_NE(stderr_text().find("no scale bands"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "report.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "f_low.sgrid"));
}

TEST_F(Cli, AnalyzeWritesManifestAndIsWorkerIndependent) {
  const fs::path c = config("c.txt", "grid_n=64\nextent=16\nbands=2\nnodes_per_band=2\nshear_nodes=3\nfield=edge\n");
  ASSERT_EQ(run("--workers 1 analyze --config " + c.string() + " --output " + (dir_ / "w1").string()), 0);
  ASSERT_EQ(run("--workers 3 analyze --config " + c.string() + " --output " + (dir_ / "w3").string()), 0);
  ASSERT_TRUE(fs::exists(dir_ / "w1" / "manifest.txt"));
  const std::string a = files_section(dir_ / "w1" / "manifest.txt"), b = files_section(dir_ / "w3" / "manifest.txt");
  EXPECT_NE(a.find("coefficients/"), std::string::npos);
  EXPECT_EQ(a, b);
}

TEST_F(Cli, ParsevalOnDefaultBlob) {
  const fs::path c = config("c.txt", "grid_n=128\nextent=16\n");
  EXPECT_EQ(run("parseval --config " + c.string() + " --output " + (dir_ / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "ledger.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "nodes.csv"));
}

TEST_F(Cli, VerifyFirstPreset) {
  const fs::path c = config("c.txt", "preset=0\ngrid_n=129\nextent=64\n");
  EXPECT_EQ(run("verify --config " + c.string() + " --output " + (dir_ / "out").string()), 0) << stderr_text();
  EXPECT_TRUE(fs::exists(dir_ / "out" / "manifest.txt"));
}

TEST_F(Cli, NonexistenceSecondPreset) {
  const fs::path c = config("c.txt", "preset=1\n");
  EXPECT_EQ(run("nonexistence --config " + c.string() + " --output " + (dir_ / "out").string()), 0) << stderr_text();
}
