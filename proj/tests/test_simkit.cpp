#include "l1hr/simkit.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace l1hr;

namespace {

RecoveryResult perfectResult(const Synthesis& data) {
  RecoveryResult r;
  r.estimatedIndices = data.truth.activeIndices;
  r.estimatedPoles = data.truth.poles;
  r.rawPoles = data.truth.poles;
  r.estimatedSymbols = data.truth.symbols;
  return r;
}

RecoveryResult permuteRows(const RecoveryResult& r, const std::vector<int>& perm) {
  RecoveryResult out = r;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto p = static_cast<std::size_t>(perm[i]);
    out.estimatedIndices[i] = r.estimatedIndices[p];
    out.estimatedPoles[i] = r.estimatedPoles[p];
    out.rawPoles[i] = r.rawPoles[p];
    out.estimatedSymbols.row(static_cast<Index>(i)) = r.estimatedSymbols.row(static_cast<Index>(p));
  }
  return out;
}

double assignmentCost(const Eigen::MatrixXd& cost, const std::vector<int>& rowToCol) {
  double total = 0.0;
  for (std::size_t r = 0; r < rowToCol.size(); ++r)
    total += cost(static_cast<Index>(r), rowToCol[r]);
  return total;
}

SweepConfig smallSweep() {
  SweepConfig c;
  c.snrGridDb = {5, 20};
  c.trials = 3;
  c.methods = {Decomposition::Hosvd, Decomposition::L1Totd};
  c.scenario.outlierFraction = 0.05;
  c.masterSeed = 42;
  return c;
}

}  // namespace

TEST(Assignment, MatchesBruteForce) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 6;
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = u(rng);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do best = std::min(best, assignmentCost(cost, perm));
    while (std::next_permutation(perm.begin(), perm.end()));

    const std::vector<int> got = minCostAssignment(cost);
    EXPECT_EQ(std::set<int>(got.begin(), got.end()).size(), static_cast<std::size_t>(n));
    EXPECT_NEAR(assignmentCost(cost, got), best, 1e-12);
  }
  EXPECT_THROW(minCostAssignment(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST(Rmse, PerfectRecoveryIsZero) {
  HrScenario s;
  s.seed = 3;
  const Synthesis data = synthesize(s);
  const RmseValues v = rmse(data.truth, perfectResult(data));
  EXPECT_EQ(v.zHard, 0.0);
  EXPECT_EQ(v.zRaw, 0.0);
  EXPECT_EQ(v.c, 0.0);
  EXPECT_EQ(trialErrors(data.truth, perfectResult(data)).missedSubcarriers, 0);
}

TEST(Rmse, SingleSubcarrierChordLength) {
  HrScenario s;
  s.activeCount = 1;
  s.seed = 4;
  const Synthesis data = synthesize(s);
  for (double theta : {0.01, 0.3, 1.0, 3.0}) {
    RecoveryResult r = perfectResult(data);
    r.estimatedPoles[0] *= std::polar(1.0, theta);
    r.rawPoles = r.estimatedPoles;
    const RmseValues v = rmse(data.truth, r);
    EXPECT_NEAR(v.zHard, 2.0 * std::abs(std::sin(theta / 2.0)), 1e-14);
    EXPECT_NEAR(v.zRaw, v.zHard, 1e-15);
  }
}

TEST(Rmse, RowPermutationDoesNotMatter) {
  std::mt19937_64 rng(5);
  HrScenario s;
  s.seed = 6;
  const Synthesis data = synthesize(s);
  RecoveryResult noisy = perfectResult(data);
  std::normal_distribution<double> n(0.0, 0.01);
  for (auto& z : noisy.rawPoles) z += Complex(n(rng), n(rng));
  noisy.estimatedSymbols += 0.05 * l1hr::testing::randomComplex(rng, 6, 12);
  const RmseValues base = rmse(data.truth, noisy);
  EXPECT_GT(base.c, 0.0);
  std::vector<int> perm{0, 1, 2, 3, 4, 5};
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_EQ(rmse(data.truth, permuteRows(perfectResult(data), perm)).c, 0.0);
    const RmseValues v = rmse(data.truth, permuteRows(noisy, perm));
    EXPECT_NEAR(v.c, base.c, 1e-14);
    EXPECT_NEAR(v.zRaw, base.zRaw, 1e-14);
  }
}

TEST(Rmse, CountsMissedSubcarriersAndRejectsMismatch) {
  HrScenario s;
  s.seed = 7;
  const Synthesis data = synthesize(s);
  RecoveryResult r = perfectResult(data);
  const int wrong = data.truth.activeIndices[0] == 1 ? 2 : 1;
  if (std::find(r.estimatedIndices.begin(), r.estimatedIndices.end(), wrong) ==
      r.estimatedIndices.end()) {
    r.estimatedIndices[0] = wrong;
    r.estimatedPoles[0] = gridPole(wrong, s.gridSize);
    EXPECT_EQ(trialErrors(data.truth, r).missedSubcarriers, 1);
  }
  r.estimatedPoles.pop_back();
  EXPECT_THROW(rmse(data.truth, r), std::invalid_argument);
}

TEST(Crlb, ClosedForms) {
  HrScenario s;
  s.activeCount = 1;
  s.snrDb = 0.0;  // sigma^2 = 1
  EXPECT_DOUBLE_EQ(crlb(s).symbol, 0.03125);
  EXPECT_DOUBLE_EQ(crlb(s).pole, 1.0 / 384.0);
  HrScenario doubled = s;
  doubled.symbolCount = 24;
  EXPECT_DOUBLE_EQ(crlb(doubled).pole, 0.5 * crlb(s).pole);
  EXPECT_DOUBLE_EQ(crlb(doubled).symbol, crlb(s).symbol);
  HrScenario standard;
  standard.snrDb = 0.0;
  EXPECT_DOUBLE_EQ(crlb(standard).symbol, 6.0 / 32.0);
  EXPECT_DOUBLE_EQ(crlb(standard).pole, 6.0 / 384.0);
  EXPECT_EQ(crlb(HrScenario{}).symbol, 0.0);
}

TEST(Seeds, DistinctPerCell) {
  std::set<std::uint64_t> seen;
  for (std::size_t s = 0; s < 7; ++s)
    for (std::size_t t = 0; t < 200; ++t) seen.insert(trialSeed(1, s, t));
  EXPECT_EQ(seen.size(), 1400u);
  EXPECT_NE(trialSeed(1, 0, 0), trialSeed(2, 0, 0));
}

TEST(Csv, RoundTripIsExact) {
  RmseReport report;
  RmseRow row;
  row.snrDb = 12.5;
  row.method = Decomposition::L1Tooi;
  row.detector = Detector::Scsm;
  row.rmseZHard = 1.0 / 3.0;
  row.rmseZRaw = std::sqrt(2.0) * 1e-7;
  row.rmseC = 0.1234567890123456789;
  row.detectionErrorRate = 1.0 / 6.0;
  row.crlbC = 6.0 / 32.0;
  row.crlbZ = 6.0 / 384.0;
  row.trials = 200;
  row.failures = 3;
  report.rows.push_back(row);
  row.method = Decomposition::Hosvd;
  row.detector = Detector::Esprit;
  row.rmseC = std::numeric_limits<double>::quiet_NaN();
  report.rows.push_back(row);

  const std::string text = toCsv(report);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  std::istringstream in(text);
  const RmseReport back = readCsv(in);
  ASSERT_EQ(back.rows.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const RmseRow& a = report.rows[i];
    const RmseRow& b = back.rows[i];
    EXPECT_EQ(a.snrDb, b.snrDb);
    EXPECT_EQ(a.method, b.method);
    EXPECT_EQ(a.detector, b.detector);
    EXPECT_EQ(a.rmseZHard, b.rmseZHard);
    EXPECT_EQ(a.rmseZRaw, b.rmseZRaw);
    EXPECT_TRUE(a.rmseC == b.rmseC || (std::isnan(a.rmseC) && std::isnan(b.rmseC)));
    EXPECT_EQ(a.detectionErrorRate, b.detectionErrorRate);
    EXPECT_EQ(a.crlbC, b.crlbC);
    EXPECT_EQ(a.crlbZ, b.crlbZ);
    EXPECT_EQ(a.trials, b.trials);
    EXPECT_EQ(a.failures, b.failures);
  }
  EXPECT_EQ(toCsv(back), text);

  std::istringstream bad("snr,method\n");
  EXPECT_THROW(readCsv(bad), std::invalid_argument);
}

TEST(Sweep, NoiselessSingleTrialIsExact) {
  SweepConfig c;
  c.snrGridDb = {std::numeric_limits<double>::infinity()};
  c.trials = 1;
  c.scenario.outlierFraction = 0.0;
  const RmseReport r = runSweep(c);
  ASSERT_EQ(r.rows.size(), 8u);
  for (const RmseRow& row : r.rows) {
    EXPECT_LT(row.rmseC, 1e-8);
    EXPECT_LT(row.rmseZHard, 1e-12);
    EXPECT_LT(row.rmseZRaw, 1e-8);
    EXPECT_EQ(row.detectionErrorRate, 0.0);
    EXPECT_EQ(row.failures, 0);
  }
}

TEST(Sweep, DeterministicAcrossRunsAndThreads) {
  SweepConfig c = smallSweep();
  const std::string first = toCsv(runSweep(c));
  EXPECT_EQ(toCsv(runSweep(c)), first);
  c.threads = 3;
  EXPECT_EQ(toCsv(runSweep(c)), first);
  c.masterSeed = 43;
  EXPECT_NE(toCsv(runSweep(c)), first);
}

TEST(Sweep, RowsCoverGridAndCarryCrlb) {
  const SweepConfig c = smallSweep();
  const RmseReport r = runSweep(c);
  ASSERT_EQ(r.rows.size(), 2u * 2u * 2u);
  for (double snr : c.snrGridDb)
    for (auto m : c.methods)
      for (auto d : c.detectors) {
        const RmseRow* row = r.find(snr, m, d);
        ASSERT_NE(row, nullptr);
        HrScenario s = c.scenario;
        s.snrDb = snr;
        EXPECT_EQ(row->crlbC, crlb(s).symbol);
        EXPECT_GT(row->crlbC, 0.0);
        EXPECT_EQ(row->trials, 3);
        EXPECT_GE(row->rmseC, 0.0);
        EXPECT_EQ(row->trialRmseC.size(), static_cast<std::size_t>(3 - row->failures));
      }
}

TEST(Sweep, WritesCsvFile) {
  SweepConfig c = smallSweep();
  c.outputPath = ::testing::TempDir() + "l1hr_sweep_test.csv";
  const RmseReport r = runSweep(c);
  std::ifstream in(c.outputPath);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), toCsv(r));
}

TEST(Sweep, SymbolErrorDoesNotBeatCrlb) {
  SweepConfig c;
  c.snrGridDb = {10, 20};
  c.trials = 20;
  c.methods = {Decomposition::Hosvd};
  c.detectors = {Detector::Scsm};
  c.scenario.outlierFraction = 0.0;
  for (const RmseRow& row : runSweep(c).rows) {
    ASSERT_EQ(row.detectionErrorRate, 0.0);
    EXPECT_GE(row.rmseC, std::sqrt(row.crlbC) * (1.0 - 3.0 / std::sqrt(row.trials)));
  }
}

TEST(Sweep, RejectsBadConfig) {
  SweepConfig c;
  c.trials = 0;
  EXPECT_THROW(runSweep(c), std::invalid_argument);
  c.trials = 1;
  c.snrGridDb.clear();
  EXPECT_THROW(runSweep(c), std::invalid_argument);
}

TEST(Median, OddAndEvenCounts) {
  RmseRow row;
  EXPECT_TRUE(std::isnan(row.medianRmseC()));
  row.trialRmseC = {3.0, 1.0, 2.0};
  EXPECT_EQ(row.medianRmseC(), 2.0);
  row.trialRmseC.push_back(10.0);
  EXPECT_EQ(row.medianRmseC(), 2.5);
}

TEST(MonteCarlo, L1TooiMedianBeatsHooiAt10dB) {
  SweepConfig c;
  c.scenario.outlierFraction = 0.05;
  c.scenario.outlierVariance = 20.0;
  c.snrGridDb = {10};
  c.trials = 200;
  c.methods = {Decomposition::Hooi, Decomposition::L1Tooi};
  c.detectors = {Detector::Scsm};
  const RmseReport r = runSweep(c);
  const double tooi = r.find(10, Decomposition::L1Tooi, Detector::Scsm)->medianRmseC();
  const double hooi = r.find(10, Decomposition::Hooi, Detector::Scsm)->medianRmseC();
  EXPECT_LT(tooi, hooi);
}

TEST(MonteCarlo, L1TooiAggregateBeatsL2At20dB) {
  SweepConfig c;
  c.scenario.outlierFraction = 0.05;
  c.scenario.outlierVariance = 20.0;
  c.snrGridDb = {20};
  c.trials = 200;
  c.methods = {Decomposition::Hosvd, Decomposition::Hooi, Decomposition::L1Tooi};
  c.detectors = {Detector::Scsm};
  const RmseReport r = runSweep(c);
  const double tooi = r.find(20, Decomposition::L1Tooi, Detector::Scsm)->rmseC;
  EXPECT_LT(tooi, r.find(20, Decomposition::Hosvd, Detector::Scsm)->rmseC);
  EXPECT_LT(tooi, r.find(20, Decomposition::Hooi, Detector::Scsm)->rmseC);
}
