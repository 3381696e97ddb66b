#include "l1hr/cli.hpp"
#include "l1hr/simkit.hpp"
#include "l1hr/tensor_io.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace l1hr;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "l1hr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = runCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path tempPath(const std::string& name) {
  return std::filesystem::path(::testing::TempDir()) / name;
}

}  // namespace

TEST(Cli, CrlbPrintsClosedForms) {
  const CliRun r = run({"crlb", "--snr-db", "0", "--samples", "32", "--symbols", "12"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sigma2=6\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("crlb_c=0.1875\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("crlb_z=0.015625\n"), std::string::npos) << r.out;
}

TEST(Cli, SimulateIsDeterministic) {
  const CliRun a = run({"simulate", "--seed", "7"});
  const CliRun b = run({"simulate", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("true_indices="), std::string::npos);
  EXPECT_NE(a.out.find("estimated_indices="), std::string::npos);
  EXPECT_NE(a.out.find("rmse_c="), std::string::npos);
}

TEST(Cli, NoiselessSimulateRecoversTruth) {
  const CliRun r = run({"simulate", "--seed", "3", "--snr-db", "inf", "--outlier-frac", "0",
                        "--method", "hosvd", "--detector", "esprit"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto field = [&](const std::string& key) {
    const auto at = r.out.find(key + "=");
    return r.out.substr(at + key.size() + 1, r.out.find('\n', at) - at - key.size() - 1);
  };
  EXPECT_EQ(field("true_indices"), field("estimated_indices"));
}

TEST(Cli, SweepWritesCsvWithHeader) {
  const auto path = tempPath("cli_sweep.csv");
  const CliRun r = run({"sweep", "--snr-grid", "10,20", "--trials", "2", "--methods",
                        "hosvd,hooi", "--master-seed", "5", "-o", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = readFile(path.string());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
  std::istringstream in(csv);
  EXPECT_EQ(readCsv(in).rows.size(), 2u * 2u * 2u);

  const auto again = tempPath("cli_sweep_again.csv");
  ASSERT_EQ(run({"sweep", "--snr-grid", "10,20", "--trials", "2", "--methods", "hosvd,hooi",
                 "--master-seed", "5", "-o", again.string()})
                .code,
            0);
  EXPECT_EQ(readFile(again.string()), csv);
}

TEST(Cli, SweepDefaultsToOutputDirectory) {
  const auto dir = tempPath("cli_out_dir");
  std::filesystem::create_directories(dir);
  ::setenv(kOutputDirEnv, dir.c_str(), 1);
  const CliRun r = run({"sweep", "--snr-grid", "20", "--trials", "1", "--methods", "hosvd",
                        "--detectors", "scsm"});
  ::unsetenv(kOutputDirEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "sweep.csv"));
}

TEST(Cli, DecomposeReadsTensorFile) {
  std::mt19937_64 rng(3);
  const ComplexTensor3 t = l1hr::testing::randomTensor(rng, {4, 3, 2});
  const auto input = tempPath("cli_tensor.txt");
  {
    std::ofstream f(input);
    writeTensorText(f, t);
  }
  std::ifstream check(input);
  EXPECT_EQ(readTensorText(check), t);

  const auto output = tempPath("cli_factors.txt");
  const CliRun r = run({"decompose", "-i", input.string(), "-o", output.string(), "--method",
                        "l1tooi", "--ranks", "2", "2", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(output);
  Index rows = 0, cols = 0;
  f >> rows >> cols;
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(cols, 2);
}

TEST(Cli, TensorTextRoundTripIsExact) {
  std::mt19937_64 rng(4);
  const ComplexTensor3 t = l1hr::testing::randomTensor(rng, {3, 2, 4});
  std::stringstream buf;
  writeTensorText(buf, t);
  EXPECT_EQ(readTensorText(buf), t);
  std::istringstream truncated("2 2 1\n1 0\n2 0\n");
  EXPECT_THROW(readTensorText(truncated), std::exception);
}

TEST(Cli, UsageErrorsExitNonzero) {
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"simulate", "--method", "svd"}).code, 0);
  EXPECT_NE(run({"crlb", "--hankel-rows", "20", "--hankel-cols", "20"}).code, 0);
  EXPECT_NE(run({"decompose", "-i", "/nonexistent/file", "--ranks", "1", "1", "1"}).code, 0);
  const CliRun help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("simulate"), std::string::npos);
}
