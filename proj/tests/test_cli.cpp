#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef BMINRES_CLI_PATH
#error "BMINRES_CLI_PATH must name the bminres executable"
#endif

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code;
  std::string output;  ///< stdout and stderr combined
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(BMINRES_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

std::string meta_value(const std::string& csv, const std::string& key) {
  const std::string tag = "# meta: " + key + "=";
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (line.rfind(tag, 0) == 0) return line.substr(tag.size());
  return {};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bminres_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveConvergesAndWritesOneRowPerIterationAndColumn) {
  const auto r = run_cli("solve --laplacian 20 200 --rhs ones --rhs random:1 --out " + path("o.csv"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string csv = slurp(path("o.csv"));
  EXPECT_EQ(csv.rfind("# bminres-csv v1\n", 0), 0u);
  const auto rows = data_lines(csv);
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0], "experiment,iteration,column,computed_rel_resid");
  const std::size_t iterations = std::stoul(meta_value(csv, "iterations"));
  EXPECT_EQ(rows.size(), 1 + 2 * iterations);
  EXPECT_EQ(meta_value(csv, "status"), "converged");
}

TEST_F(CliTest, OutputIsBitwiseReproducible) {
  const std::string args = "solve --laplacian 15 200 --rhs random:2 --policy shrink --seed 3 --out ";
  ASSERT_EQ(run_cli(args + path("a.csv")).exit_code, 0);
  ASSERT_EQ(run_cli(args + path("b.csv")).exit_code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(CliTest, DependentPairLogsABreakdownAtTheFirstStep) {
  const auto r = run_cli("solve --laplacian 20 200 --precond ic0 --rhs e:1 --rhs-apply-A --out " + path("o.csv"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const std::string csv = slurp(path("o.csv"));
  const std::string events = meta_value(csv, "breakdown");
  EXPECT_EQ(events.rfind("iteration=1;", 0), 0u) << events;
  EXPECT_EQ(meta_value(csv, "converged_at[2]"), "1");
}

TEST_F(CliTest, IterationCapGivesExitCodeTwo) {
  const auto r = run_cli("solve --laplacian 20 200 --rhs ones --maxit 5 --out " + path("o.csv"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
  EXPECT_EQ(meta_value(slurp(path("o.csv")), "status"), "max_iter_reached");
}

TEST_F(CliTest, UsageErrorsGiveExitCodeOne) {
  EXPECT_EQ(run_cli("solve --rhs ones").exit_code, 1);
  EXPECT_EQ(run_cli("solve --laplacian 10 200 --matrix x.mtx --rhs ones").exit_code, 1);
  EXPECT_EQ(run_cli("solve --matrix " + path("missing.mtx") + " --rhs ones").exit_code, 1);
  EXPECT_EQ(run_cli("fig5 --m 101 --grid 30 --trials 1").exit_code, 1);
  EXPECT_EQ(run_cli("nonsense").exit_code, 1);
}

TEST_F(CliTest, MatrixFileAndDenseRhs) {
  {
    std::ofstream m(path("a.mtx"));
    m << "%%MatrixMarket matrix coordinate real symmetric\n3 3 4\n1 1 2\n2 1 -1\n2 2 -3\n3 3 1\n";
    std::ofstream b(path("b.mtx"));
    b << "%%MatrixMarket matrix array real general\n3 1\n1\n2\n3\n";
  }
  const auto r = run_cli("solve --matrix " + path("a.mtx") + " --rhs " + path("b.mtx") + " --solution " +
                         path("x.mtx") + " --tol 1e-12 --out " + path("o.csv"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(path("x.mtx")));
  EXPECT_LE(std::stoul(meta_value(slurp(path("o.csv")), "iterations")), 3u);
}

TEST_F(CliTest, EigmixEmitsOneRowPerOverlap) {
  const auto r = run_cli("fig5 --grid 30 --trials 2 --m 0 --m 10 --m 50 --threads 2 --out " + path("f5.csv"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto rows = data_lines(slurp(path("f5.csv")));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "m,trials,avg_block_iterations,avg_sequential_iterations");
  EXPECT_EQ(rows[1].rfind("0,2,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("50,2,", 0), 0u);
}

TEST_F(CliTest, RatioSweepFavorsTheBlockSolver) {
  const auto r = run_cli("fig2 --grid 30 --pmax 3 --out " + path("f2.csv"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto rows = data_lines(slurp(path("f2.csv")));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "p,block_iterations,sequential_iterations,ratio");
  EXPECT_EQ(rows[1].substr(rows[1].rfind(',') + 1), "1");
  const double ratio3 = std::stod(rows[3].substr(rows[3].rfind(',') + 1));
  EXPECT_LT(ratio3, 1.0);
}
