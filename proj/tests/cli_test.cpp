#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(MSECOMB_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<double> column(const std::string& csv, std::size_t col) {
  std::vector<double> out;
  const auto rows = lines(csv);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::istringstream row(rows[i]);
    std::string cell;
    for (std::size_t c = 0; c <= col; ++c) std::getline(row, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("msecomb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CombineExample) {
  const auto r = run("combine --beta-c 1.0 --beta-e 1.5 --var-c 0.04 --var-e 0.01");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "beta,weight,est_mse,hausman,lambda,alpha,ordering_violated");
  EXPECT_NEAR(column(r.out, 0)[0], 1.05357142857, 1e-10);
  EXPECT_NEAR(column(r.out, 1)[0], 0.107142857143, 1e-11);
  EXPECT_NEAR(column(r.out, 3)[0], 0.25 / 0.03, 1e-9);
}

TEST_F(Cli, CombineEqualEstimates) {
  const auto r = run("combine --beta-c 1 --beta-e 1 --var-c 2 --var-e 1");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(column(r.out, 0)[0], 1.0);
  EXPECT_EQ(column(r.out, 1)[0], 1.0);
}

TEST_F(Cli, CombinePretestJson) {
  const auto r = run("combine --beta-c 1.0 --beta-e 1.5 --var-c 0.04 --var-e 0.01 --lambda 1 --format json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("weight").get<double>(), 0.12, 1e-12);
  EXPECT_NEAR(j.at("beta").get<double>(), 1.06, 1e-12);
  EXPECT_NEAR(j.at("alpha").get<double>(), 0.682689492137, 1e-10);
}

TEST_F(Cli, CombineUsageErrors) {
  auto r = run("combine --beta-c 1 --beta-e 1.5 --var-c 0.04");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("var-e required"), std::string::npos) << r.out;
  r = run("combine --beta-c 1 --beta-e 1.5 --var-c -0.04 --var-e 0.01");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("var_c"), std::string::npos) << r.out;
  r = run("combine --beta-c 1 --beta-e abc --var-c 0.04 --var-e 0.01");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST_F(Cli, RiskCurveDeltaExtrema) {
  const auto r = run("risk-curve --functional delta --out " + path("delta.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string csv = slurp(path("delta.csv"));
  EXPECT_EQ(lines(csv).front(), "g,value");
  const auto v = column(csv, 1);
  ASSERT_EQ(v.size(), 1001u);
  EXPECT_NEAR(*std::min_element(v.begin(), v.end()), -0.53, 0.02);
  EXPECT_NEAR(*std::max_element(v.begin(), v.end()), 0.25, 0.02);
}

TEST_F(Cli, RiskCurveSingletonAndLambdaFunctional) {
  auto r = run("risk-curve --g-min 0 --g-max 0");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(lines(r.out).size(), 2u);

  const auto delta = run("risk-curve --functional delta --g-step 0.1");
  const auto lambda = run("risk-curve --functional lambda --mu-sd 0 --g-step 0.1");
  ASSERT_EQ(lambda.code, 0) << lambda.out;
  EXPECT_EQ(lines(lambda.out).front(), "g,value,mu_sd");
  EXPECT_EQ(column(delta.out, 1), column(lambda.out, 1));

  const auto pre = run("risk-curve --functional delta-pretest --lambda 1 --g-max 1 --g-step 0.5");
  EXPECT_EQ(lines(pre.out).front(), "g,value,lambda");
}

TEST_F(Cli, RiskCurveErrors) {
  EXPECT_EQ(run("risk-curve --functional gamma").code, 2);
  EXPECT_EQ(run("risk-curve --g-min 1 --g-max 0").code, 2);
  EXPECT_EQ(run("risk-curve --method simpson").code, 2);
  EXPECT_EQ(run("risk-curve --out " + path("missing/dir/out.csv")).code, 3);
}

TEST_F(Cli, MinimaxClaims) {
  auto r = run("minimax --claim thm1.3");
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("dominates").get<bool>());
  for (const char* key : {"claim", "max_gain", "max_loss", "engine", "grid"}) EXPECT_TRUE(j.contains(key));

  r = run("minimax --claim prop1.3 --lambda 1");
  j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j.at("dominates").get<bool>());
  EXPECT_EQ(j.at("lambda").get<double>(), 1.0);

  r = run("minimax --claim thm2.3 --mu-sd 0.6");
  ASSERT_EQ(r.code, 0) << r.out;
  j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j.at("validated_region").get<bool>());
  EXPECT_NE(j.at("note").get<std::string>().find("outside validated region"), std::string::npos);

  r = run("minimax --claim thm2.3 --mu-sd 0.4");
  j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("validated_region").get<bool>());
  EXPECT_TRUE(j.at("dominates").get<bool>());

  EXPECT_EQ(run("minimax --claim thm9.9").code, 2);
}

TEST_F(Cli, SimulateDeterministicFiles) {
  const std::string args = "simulate --dgp iv --n 500 --reps 200 --lambdas 1,3.84 --seed 9";
  ASSERT_EQ(run(args + " --csv " + path("a.csv") + " --json " + path("a.json")).code, 0);
  ASSERT_EQ(run(args + " --csv " + path("b.csv") + " --json " + path("b.json")).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  const auto rows = lines(slurp(path("a.csv")));
  EXPECT_EQ(rows[0], "estimator,bias,variance,mse,mc_se");
  EXPECT_EQ(rows.size(), 6u);
  const auto j = nlohmann::json::parse(slurp(path("a.json")));
  EXPECT_EQ(j.at("metadata").at("R").get<int>(), 200);
  EXPECT_EQ(j.at("metadata").at("seed").get<int>(), 9);
  EXPECT_EQ(j.at("metadata").at("failures").get<int>(), 0);
  EXPECT_EQ(j.at("metadata").at("dgp").at("kind").get<std::string>(), "iv");
}

TEST_F(Cli, SimulateNullOrdering) {
  const auto r = run("simulate --dgp iv --n 2000 --reps 2000");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto mse = column(r.out, 3);
  const auto se = column(r.out, 4);
  // Rows: beta_c, beta_e, beta_mse.
  EXPECT_GT(mse[2] - mse[1], 2.0 * std::max(se[2], se[1]));
  EXPECT_GT(mse[0] - mse[2], 2.0 * std::max(se[0], se[2]));
}

TEST_F(Cli, SimulateExitCodes) {
  auto r = run("simulate --reps 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("reps"), std::string::npos);
  EXPECT_EQ(run("simulate --dgp iv --endo 0.9").code, 2);
  EXPECT_EQ(run("simulate --dgp quantum").code, 2);
  EXPECT_EQ(run("simulate --dgp stratified --n 20 --probs 0.05,0.5,0.95 --reps 200").code, 4);
  EXPECT_EQ(run("simulate --reps 10 --csv " + path("no/such/dir/x.csv")).code, 3);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  {
    std::ofstream cfg(path("run.ini"));
    cfg << "[combine]\nbeta-c=1.0\nbeta-e=1.5\nvar-c=0.04\nvar-e=0.01\n"
        << "[simulate]\ndgp=iv\nn=300\nreps=50\nseed=4\n";
  }
  auto r = run("--config " + path("run.ini") + " combine");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(column(r.out, 1)[0], 0.107142857143, 1e-11);
  r = run("--config " + path("run.ini") + " combine --lambda 100");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(column(r.out, 1)[0], 1.0);

  const auto from_file = run("--config " + path("run.ini") + " simulate");
  const auto from_flags = run("simulate --dgp iv --n 300 --reps 50 --seed 4");
  ASSERT_EQ(from_file.code, 0) << from_file.out;
  EXPECT_EQ(from_file.out, from_flags.out);
  const auto overridden = run("--config " + path("run.ini") + " simulate --seed 5");
  EXPECT_NE(overridden.out, from_file.out);
  EXPECT_EQ(overridden.out, run("simulate --dgp iv --n 300 --reps 50 --seed 5").out);
}

TEST_F(Cli, LocalSweepOutputs) {
  const auto r = run("local-sweep --dgp iv --n 500 --h-min 0 --h-max 1 --h-step 0.5 --reps 100 --json " +
                     path("s.json") + " --csv " + path("s.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto csv = slurp(path("s.csv"));
  EXPECT_EQ(lines(csv).front(), "h,g,empirical,empirical_se,predicted,sigma2_c,sigma2_e,mu");
  EXPECT_EQ(lines(csv).size(), 4u);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("s.json"))).at("points").size(), 3u);
}
