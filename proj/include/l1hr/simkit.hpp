#pragma once

#include "l1hr/harmonic.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace l1hr {

// Optimal assignment for a square cost matrix (Hungarian method).
// Returns `rowToCol` with rowToCol[r] the column matched to row r.
std::vector<int> minCostAssignment(const Eigen::MatrixXd& cost);

// Squared errors of one trial after matching estimated to true subcarriers
// by minimum total |z_hat - z|^2 (the same matching aligns symbol rows and
// raw poles).
struct TrialErrors {
  double poleSqErrHard = 0.0;  // sum over Ka matched pairs
  double poleSqErrRaw = 0.0;
  double symbolSqErr = 0.0;    // sum over Ka * Q matched symbols
  int poleCount = 0;
  int symbolCount = 0;
  int missedSubcarriers = 0;   // true subcarriers absent from the estimate
};

TrialErrors trialErrors(const GroundTruth& truth, const RecoveryResult& result);

struct RmseValues {
  double zHard = 0.0;
  double zRaw = 0.0;
  double c = 0.0;
};

// Root mean squared errors of one trial.
RmseValues rmse(const GroundTruth& truth, const RecoveryResult& result);

struct CrlbValues {
  double symbol = 0.0;  // sigma^2 / N
  double pole = 0.0;    // sigma^2 / (E|c|^2 dt^2 N Q), E|c|^2 = 1 for QPSK
};

// Zero when the scenario is noiseless.
CrlbValues crlb(const HrScenario& scenario);

struct SweepConfig {
  // Everything except snrDb and seed, which the sweep sets per trial.
  HrScenario scenario;
  std::vector<double> snrGridDb{0, 5, 10, 15, 20, 25, 30};
  int trials = 200;
  std::vector<Decomposition> methods{Decomposition::Hosvd, Decomposition::Hooi,
                                     Decomposition::L1Totd, Decomposition::L1Tooi};
  std::vector<Detector> detectors{Detector::Esprit, Detector::Scsm};
  std::uint64_t masterSeed = 1;
  // CSV destination; empty means do not write.
  std::string outputPath;
  PipelineOptions options;
  // Worker threads; results do not depend on this.
  int threads = 1;

  void validate() const;
};

// Seed of the data realisation for one (snr, trial) grid cell. All methods
// and detectors at that cell see the same samples.
std::uint64_t trialSeed(std::uint64_t masterSeed, std::size_t snrIndex,
                        std::size_t trialIndex);

struct RmseRow {
  double snrDb = 0.0;
  Decomposition method = Decomposition::Hosvd;
  Detector detector = Detector::Esprit;
  double rmseZHard = 0.0;
  double rmseZRaw = 0.0;
  double rmseC = 0.0;
  // Fraction of true subcarriers missed, averaged over successful trials.
  double detectionErrorRate = 0.0;
  double crlbC = 0.0;
  double crlbZ = 0.0;
  int trials = 0;
  int failures = 0;
  // Per-trial symbol RMSE of the successful trials (not written to CSV).
  std::vector<double> trialRmseC;

  double medianRmseC() const;
};

struct RmseReport {
  std::vector<RmseRow> rows;

  const RmseRow* find(double snrDb, Decomposition method, Detector detector) const;
};

RmseReport runSweep(const SweepConfig& config);

inline constexpr const char* kCsvHeader =
    "snr_db,method,detector,rmse_z_hard,rmse_z_raw,rmse_c,det_err,crlb_c,crlb_z,"
    "trials,failures";

// One header line then one row per RmseRow; reals in %.17g.
void writeCsv(std::ostream& out, const RmseReport& report);
std::string toCsv(const RmseReport& report);

// Inverse of writeCsv (trialRmseC is not stored and comes back empty).
RmseReport readCsv(std::istream& in);

}  // namespace l1hr
