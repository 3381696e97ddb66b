#include "l1hr/simkit.hpp"

#include "l1hr/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace l1hr {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string formatReal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CellOutcome {
  bool ok = false;
  TrialErrors errors;
};

}  // namespace

std::vector<int> minCostAssignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw std::invalid_argument("assignment needs a square cost matrix");
  if (n == 0) return {};
  // Potentials-based Hungarian algorithm on 1-based arrays; column 0 is a
  // sentinel.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> rowToCol(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) rowToCol[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  return rowToCol;
}

TrialErrors trialErrors(const GroundTruth& truth, const RecoveryResult& result) {
  const std::size_t ka = truth.activeIndices.size();
  if (result.estimatedIndices.size() != ka || result.estimatedPoles.size() != ka ||
      result.rawPoles.size() != ka ||
      result.estimatedSymbols.rows() != static_cast<Index>(ka) ||
      result.estimatedSymbols.cols() != truth.symbols.cols()) {
    throw std::invalid_argument("rmse: estimate and truth cardinalities differ");
  }
  Eigen::MatrixXd cost(static_cast<Index>(ka), static_cast<Index>(ka));
  for (std::size_t r = 0; r < ka; ++r)
    for (std::size_t c = 0; c < ka; ++c)
      cost(static_cast<Index>(r), static_cast<Index>(c)) =
          std::norm(result.estimatedPoles[r] - truth.poles[c]);
  const std::vector<int> match = minCostAssignment(cost);

  TrialErrors out;
  out.poleCount = static_cast<int>(ka);
  out.symbolCount = static_cast<int>(ka * static_cast<std::size_t>(truth.symbols.cols()));
  for (std::size_t r = 0; r < ka; ++r) {
    const auto c = static_cast<std::size_t>(match[r]);
    out.poleSqErrHard += std::norm(result.estimatedPoles[r] - truth.poles[c]);
    out.poleSqErrRaw += std::norm(result.rawPoles[r] - truth.poles[c]);
    out.symbolSqErr += (result.estimatedSymbols.row(static_cast<Index>(r)) -
                        truth.symbols.row(static_cast<Index>(c)))
                           .squaredNorm();
  }
  for (int idx : truth.activeIndices) {
    if (std::find(result.estimatedIndices.begin(), result.estimatedIndices.end(), idx) ==
        result.estimatedIndices.end()) {
      ++out.missedSubcarriers;
    }
  }
  return out;
}

RmseValues rmse(const GroundTruth& truth, const RecoveryResult& result) {
  const TrialErrors e = trialErrors(truth, result);
  return {std::sqrt(e.poleSqErrHard / e.poleCount), std::sqrt(e.poleSqErrRaw / e.poleCount),
          std::sqrt(e.symbolSqErr / e.symbolCount)};
}

CrlbValues crlb(const HrScenario& scenario) {
  const double sigma2 = scenario.noiseVariance();
  constexpr double symbolPower = 1.0;
  return {sigma2 / scenario.sampleCount,
          sigma2 / (symbolPower * scenario.deltaT * scenario.deltaT * scenario.sampleCount *
                    scenario.symbolCount)};
}

void SweepConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (snrGridDb.empty()) throw std::invalid_argument("sweep: SNR grid is empty");
  if (methods.empty() || detectors.empty()) {
    throw std::invalid_argument("sweep: need at least one method and one detector");
  }
  HrScenario probe = scenario;
  for (double snr : snrGridDb) {
    probe.snrDb = snr;
    probe.validate();
  }
}

std::uint64_t trialSeed(std::uint64_t masterSeed, std::size_t snrIndex,
                        std::size_t trialIndex) {
  return splitmix64(splitmix64(splitmix64(masterSeed) ^ snrIndex) ^ trialIndex);
}

double RmseRow::medianRmseC() const {
  if (trialRmseC.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v = trialRmseC;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

const RmseRow* RmseReport::find(double snrDb, Decomposition method, Detector detector) const {
  for (const auto& row : rows) {
    if (row.snrDb == snrDb && row.method == method && row.detector == detector) return &row;
  }
  return nullptr;
}

RmseReport runSweep(const SweepConfig& config) {
  config.validate();
  const std::size_t nSnr = config.snrGridDb.size();
  const std::size_t nMethod = config.methods.size();
  const std::size_t nDet = config.detectors.size();
  const auto nTrial = static_cast<std::size_t>(config.trials);
  auto slot = [&](std::size_t s, std::size_t m, std::size_t d, std::size_t t) {
    return ((s * nMethod + m) * nDet + d) * nTrial + t;
  };
  std::vector<CellOutcome> outcomes(nSnr * nMethod * nDet * nTrial);

  auto runCell = [&](std::size_t item) {
    const std::size_t s = item / nTrial;
    const std::size_t t = item % nTrial;
    HrScenario scenario = config.scenario;
    scenario.snrDb = config.snrGridDb[s];
    scenario.seed = trialSeed(config.masterSeed, s, t);
    const Synthesis data = synthesize(scenario);
    for (std::size_t m = 0; m < nMethod; ++m) {
      TuckerFactors factors;
      try {
        factors = factorize(data.samples, scenario, config.methods[m], config.options);
      } catch (const NumericalError&) {
        continue;
      }
      for (std::size_t d = 0; d < nDet; ++d) {
        try {
          const RecoveryResult result = detect(data.samples, factors, scenario, config.methods[m],
                                               config.detectors[d], config.options);
          outcomes[slot(s, m, d, t)] = {true, trialErrors(data.truth, result)};
        } catch (const NumericalError&) {
          // counted as a failure below
        }
      }
    }
  };

  const std::size_t items = nSnr * nTrial;
  const int workers = std::max(1, std::min<int>(config.threads, static_cast<int>(items)));
  if (workers == 1) {
    for (std::size_t i = 0; i < items; ++i) runCell(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < items; i = next++) runCell(i);
      });
    }
  }

  RmseReport report;
  for (std::size_t s = 0; s < nSnr; ++s) {
    HrScenario scenario = config.scenario;
    scenario.snrDb = config.snrGridDb[s];
    const CrlbValues bound = crlb(scenario);
    for (std::size_t m = 0; m < nMethod; ++m) {
      for (std::size_t d = 0; d < nDet; ++d) {
        RmseRow row;
        row.snrDb = scenario.snrDb;
        row.method = config.methods[m];
        row.detector = config.detectors[d];
        row.crlbC = bound.symbol;
        row.crlbZ = bound.pole;
        row.trials = config.trials;
        double hard = 0.0, raw = 0.0, sym = 0.0, missRate = 0.0;
        long poles = 0, symbols = 0;
        int ok = 0;
        for (std::size_t t = 0; t < nTrial; ++t) {
          const CellOutcome& cell = outcomes[slot(s, m, d, t)];
          if (!cell.ok) {
            ++row.failures;
            continue;
          }
          const TrialErrors& e = cell.errors;
          hard += e.poleSqErrHard;
          raw += e.poleSqErrRaw;
          sym += e.symbolSqErr;
          poles += e.poleCount;
          symbols += e.symbolCount;
          missRate += static_cast<double>(e.missedSubcarriers) / e.poleCount;
          row.trialRmseC.push_back(std::sqrt(e.symbolSqErr / e.symbolCount));
          ++ok;
        }
        if (ok > 0) {
          row.rmseZHard = std::sqrt(hard / static_cast<double>(poles));
          row.rmseZRaw = std::sqrt(raw / static_cast<double>(poles));
          row.rmseC = std::sqrt(sym / static_cast<double>(symbols));
          row.detectionErrorRate = missRate / ok;
        } else {
          const double nan = std::numeric_limits<double>::quiet_NaN();
          row.rmseZHard = row.rmseZRaw = row.rmseC = row.detectionErrorRate = nan;
        }
        report.rows.push_back(std::move(row));
      }
    }
  }

  if (!config.outputPath.empty()) {
    std::ofstream file(config.outputPath, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + config.outputPath + " for writing");
    writeCsv(file, report);
    if (!file) throw std::runtime_error("failed writing " + config.outputPath);
  }
  return report;
}

void writeCsv(std::ostream& out, const RmseReport& report) {
  out << kCsvHeader << '\n';
  for (const RmseRow& r : report.rows) {
    out << formatReal(r.snrDb) << ',' << toString(r.method) << ',' << toString(r.detector) << ','
        << formatReal(r.rmseZHard) << ',' << formatReal(r.rmseZRaw) << ','
        << formatReal(r.rmseC) << ',' << formatReal(r.detectionErrorRate) << ','
        << formatReal(r.crlbC) << ',' << formatReal(r.crlbZ) << ',' << r.trials << ','
        << r.failures << '\n';
  }
}

std::string toCsv(const RmseReport& report) {
  std::ostringstream out;
  writeCsv(out, report);
  return out.str();
}

RmseReport readCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("CSV header does not match the sweep schema");
  }
  RmseReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 11) throw std::invalid_argument("CSV row has wrong field count");
    RmseRow row;
    row.snrDb = std::stod(fields[0]);
    const auto method = parseDecomposition(fields[1]);
    const auto detector = parseDetector(fields[2]);
    if (!method || !detector) throw std::invalid_argument("CSV row has unknown method/detector");
    row.method = *method;
    row.detector = *detector;
    row.rmseZHard = std::stod(fields[3]);
    row.rmseZRaw = std::stod(fields[4]);
    row.rmseC = std::stod(fields[5]);
    row.detectionErrorRate = std::stod(fields[6]);
    row.crlbC = std::stod(fields[7]);
    row.crlbZ = std::stod(fields[8]);
    row.trials = std::stoi(fields[9]);
    row.failures = std::stoi(fields[10]);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace l1hr
