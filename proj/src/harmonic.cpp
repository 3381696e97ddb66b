#include "l1hr/harmonic.hpp"

#include "l1hr/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>

namespace l1hr {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

Complex qpskPoint(int bits) {
  return {(bits & 1) ? -kInvSqrt2 : kInvSqrt2, (bits & 2) ? -kInvSqrt2 : kInvSqrt2};
}

// z_k^n computed from the reduced phase, exact on the grid.
Complex gridPower(int subcarrier, long n, int gridSize) {
  const long phase = (static_cast<long>(subcarrier) * n) % gridSize;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(phase) / gridSize);
}

Complex complexGaussian(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace

void HrScenario::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
  if (gridSize < 2) fail("grid size K must be >= 2");
  if (activeCount < 1 || activeCount > gridSize - 1) fail("need 1 <= Ka <= K-1");
  if (symbolCount < 1) fail("need Q >= 1");
  if (sampleCount < 1) fail("need N >= 1");
  if (hankelRows + hankelCols - 1 != sampleCount) fail("need I1 + I2 - 1 == N");
  if (hankelRows <= activeCount || hankelCols <= activeCount) fail("need I1, I2 > Ka");
  if (std::isnan(snrDb)) fail("SNR must be a number");
  if (!(outlierFraction >= 0.0 && outlierFraction < 1.0)) fail("outlier fraction must be in [0, 1)");
  if (!(outlierVariance >= 0.0)) fail("outlier variance must be >= 0");
  if (!(deltaT > 0.0)) fail("sampling interval must be > 0");
}

double HrScenario::noiseVariance() const {
  return activeCount * std::pow(10.0, -snrDb / 10.0);
}

int HrScenario::outlierCount() const {
  return static_cast<int>(std::floor(outlierFraction * sampleCount * symbolCount));
}

Complex gridPole(int subcarrier, int gridSize) { return gridPower(subcarrier, 1, gridSize); }

Synthesis synthesize(const HrScenario& scenario) {
  scenario.validate();
  const int k = scenario.gridSize;
  const int ka = scenario.activeCount;
  const int q = scenario.symbolCount;
  const int n = scenario.sampleCount;
  std::mt19937_64 rng(scenario.seed);

  Synthesis out;
  GroundTruth& truth = out.truth;
  std::vector<int> candidates(static_cast<std::size_t>(k - 1));
  std::iota(candidates.begin(), candidates.end(), 1);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  truth.activeIndices.assign(candidates.begin(), candidates.begin() + ka);
  std::sort(truth.activeIndices.begin(), truth.activeIndices.end());
  for (int idx : truth.activeIndices) {
    truth.poles.push_back(gridPole(idx, k));
    truth.pulsations.push_back(2.0 * std::numbers::pi * idx / k);
  }

  std::uniform_int_distribution<int> symbolBits(0, 3);
  truth.symbols.resize(ka, q);
  for (int s = 0; s < q; ++s)
    for (int r = 0; r < ka; ++r) truth.symbols(r, s) = qpskPoint(symbolBits(rng));

  out.cleanSamples = ComplexMatrix::Zero(q, n);
  for (int s = 0; s < q; ++s)
    for (int t = 0; t < n; ++t)
      for (int r = 0; r < ka; ++r)
        out.cleanSamples(s, t) +=
            truth.symbols(r, s) * gridPower(truth.activeIndices[static_cast<std::size_t>(r)], t, k);

  out.samples = out.cleanSamples;
  const double sigma2 = scenario.noiseVariance();
  if (sigma2 > 0.0) {
    for (int t = 0; t < n; ++t)
      for (int s = 0; s < q; ++s) out.samples(s, t) += complexGaussian(rng, sigma2);
  }

  const int outliers = scenario.outlierCount();
  if (outliers > 0) {
    std::vector<int> positions(static_cast<std::size_t>(n * q));
    std::iota(positions.begin(), positions.end(), 0);
    std::shuffle(positions.begin(), positions.end(), rng);
    for (int o = 0; o < outliers; ++o) {
      const int pos = positions[static_cast<std::size_t>(o)];
      out.samples(pos % q, pos / q) += complexGaussian(rng, scenario.outlierVariance);
    }
  }
  return out;
}

VandermondeDictionary::VandermondeDictionary(int gridSize, Index length)
    : gridSize_(gridSize) {
  if (gridSize < 2 || length < 1) {
    throw std::invalid_argument("dictionary needs K >= 2 and a positive length");
  }
  vectors_.resize(length, gridSize - 1);
  for (int i = 1; i < gridSize; ++i)
    for (Index t = 0; t < length; ++t)
      vectors_(t, i - 1) = gridPower(i, static_cast<long>(t), gridSize) / static_cast<double>(length);
  normalized_ = vectors_.colwise().normalized();
}

ComplexMatrix VandermondeDictionary::select(const std::vector<int>& subcarriers) const {
  ComplexMatrix out(length(), static_cast<Index>(subcarriers.size()));
  for (std::size_t c = 0; c < subcarriers.size(); ++c) {
    const int idx = subcarriers[c];
    if (idx < 1 || idx >= gridSize_) throw std::invalid_argument("subcarrier out of range");
    out.col(static_cast<Index>(c)) = vectors_.col(idx - 1);
  }
  return out;
}

std::vector<int> hardDecide(const std::vector<Complex>& estimates, int gridSize) {
  const std::size_t count = estimates.size();
  if (count > static_cast<std::size_t>(gridSize - 1)) {
    throw std::invalid_argument("more estimates than grid subcarriers");
  }
  std::vector<std::tuple<double, std::size_t, int>> pairs;
  pairs.reserve(count * static_cast<std::size_t>(gridSize - 1));
  for (std::size_t e = 0; e < count; ++e)
    for (int k = 1; k < gridSize; ++k)
      pairs.emplace_back(std::abs(estimates[e] - gridPole(k, gridSize)), e, k);
  std::sort(pairs.begin(), pairs.end());

  std::vector<int> assigned(count, 0);
  std::vector<bool> taken(static_cast<std::size_t>(gridSize), false);
  std::size_t remaining = count;
  for (const auto& [dist, e, k] : pairs) {
    if (remaining == 0) break;
    if (assigned[e] != 0 || taken[static_cast<std::size_t>(k)]) continue;
    assigned[e] = k;
    taken[static_cast<std::size_t>(k)] = true;
    --remaining;
  }
  return assigned;
}

EspritResult espritRecover(const SemiUnitaryMatrix& basis, int gridSize) {
  const Index rows = basis.rows();
  const Index ka = basis.cols();
  if (rows <= ka) throw std::invalid_argument("ESPRIT needs more rows than columns");
  const ComplexMatrix top = basis.matrix().topRows(rows - 1);
  const ComplexMatrix bottom = basis.matrix().bottomRows(rows - 1);

  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(top);
  if (qr.rank() < ka) throw NumericalError("ESPRIT: shift-invariance system is rank deficient");
  const ComplexMatrix z = qr.solve(bottom);

  Eigen::ComplexEigenSolver<ComplexMatrix> eig(z, false);
  if (eig.info() != Eigen::Success) throw NumericalError("ESPRIT: eigenvalue solver failed");

  EspritResult out;
  for (Index i = 0; i < ka; ++i) out.rawEigenvalues.push_back(eig.eigenvalues()(i));
  auto phase = [](Complex v) {
    const double a = std::arg(v);
    return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
  };
  std::sort(out.rawEigenvalues.begin(), out.rawEigenvalues.end(), [&](Complex a, Complex b) {
    return std::pair(phase(a), std::abs(a)) < std::pair(phase(b), std::abs(b));
  });
  out.indices = hardDecide(out.rawEigenvalues, gridSize);
  return out;
}

Eigen::VectorXd scsmScores(const SemiUnitaryMatrix& basis,
                           const VandermondeDictionary& dictionary) {
  if (basis.rows() != dictionary.length()) {
    throw std::invalid_argument("SCSM: basis rows do not match dictionary length");
  }
  return (dictionary.normalized().adjoint() * basis.matrix()).rowwise().norm();
}

std::vector<int> selectLargest(const Eigen::VectorXd& scores, Index activeCount) {
  if (activeCount < 1 || activeCount > scores.size()) {
    throw std::invalid_argument("SCSM: active count out of range");
  }
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });
  std::vector<int> picked;
  for (Index i = 0; i < activeCount; ++i) {
    picked.push_back(static_cast<int>(order[static_cast<std::size_t>(i)]) + 1);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::vector<int> scsmRecover(const SemiUnitaryMatrix& basis,
                             const VandermondeDictionary& dictionary,
                             Index activeCount) {
  return selectLargest(scsmScores(basis, dictionary), activeCount);
}

ComplexMatrix recoverSymbols(const ComplexMatrix& samples,
                             const std::vector<Complex>& poles) {
  const Index n = samples.cols();
  const Index ka = static_cast<Index>(poles.size());
  if (ka < 1 || ka > n) throw std::invalid_argument("need 1 <= Ka <= N poles");
  for (Index a = 0; a < ka; ++a)
    for (Index b = a + 1; b < ka; ++b)
      if (std::abs(poles[static_cast<std::size_t>(a)] - poles[static_cast<std::size_t>(b)]) < 1e-12) {
        throw NumericalError("symbol recovery: duplicate poles");
      }

  ComplexMatrix v(n, ka);
  for (Index k = 0; k < ka; ++k) {
    Complex power{1.0, 0.0};
    for (Index t = 0; t < n; ++t) {
      v(t, k) = power;
      power *= poles[static_cast<std::size_t>(k)];
    }
  }
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(v);
  if (qr.rank() < ka) throw NumericalError("symbol recovery: Vandermonde system is rank deficient");
  return qr.solve(samples.transpose());
}

std::string_view toString(Decomposition method) {
  switch (method) {
    case Decomposition::Hosvd: return "hosvd";
    case Decomposition::Hooi: return "hooi";
    case Decomposition::L1Totd: return "l1totd";
    case Decomposition::L1Tooi: return "l1tooi";
  }
  return "?";
}

std::string_view toString(Detector detector) {
  return detector == Detector::Esprit ? "esprit" : "scsm";
}

std::optional<Decomposition> parseDecomposition(std::string_view name) {
  for (auto m : {Decomposition::Hosvd, Decomposition::Hooi, Decomposition::L1Totd,
                 Decomposition::L1Tooi}) {
    if (toString(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<Detector> parseDetector(std::string_view name) {
  if (name == "esprit") return Detector::Esprit;
  if (name == "scsm") return Detector::Scsm;
  return std::nullopt;
}

TuckerFactors factorize(const ComplexMatrix& samples, const HrScenario& scenario,
                        Decomposition method, const PipelineOptions& options) {
  scenario.validate();
  const ComplexTensor3 hankel =
      buildFsHankel(samples, scenario.hankelRows, scenario.hankelCols);
  TuckerConfig config;
  config.ranks = {scenario.activeCount, scenario.activeCount, scenario.symbolCount};
  config.delta = options.delta;
  config.maxInnerIters = options.maxInnerIters;
  config.outerTol = options.outerTol;
  config.maxOuterIters = options.maxOuterIters;
  switch (method) {
    case Decomposition::Hosvd: return hosvd(hankel, config.ranks);
    case Decomposition::Hooi: return hooi(hankel, config);
    case Decomposition::L1Totd: return l1totd(hankel, config);
    case Decomposition::L1Tooi: return l1tooi(hankel, config);
  }
  throw std::invalid_argument("unknown decomposition");
}

RecoveryResult detect(const ComplexMatrix& samples, const TuckerFactors& factors,
                      const HrScenario& scenario, Decomposition method,
                      Detector detector, const PipelineOptions& options) {
  RecoveryResult out;
  out.method = method;
  out.detector = detector;
  if (detector == Detector::Esprit) {
    EspritResult esprit = espritRecover(factors.mode(1), scenario.gridSize);
    out.estimatedIndices = std::move(esprit.indices);
    out.rawPoles = std::move(esprit.rawEigenvalues);
  } else {
    const VandermondeDictionary dict1(scenario.gridSize, scenario.hankelRows);
    Eigen::VectorXd scores = scsmScores(factors.mode(1), dict1);
    if (options.fuseModeTwo) {
      const VandermondeDictionary dict2(scenario.gridSize, scenario.hankelCols);
      scores = 0.5 * (scores + scsmScores(factors.mode(2), dict2));
    }
    out.estimatedIndices = selectLargest(scores, scenario.activeCount);
  }
  for (int idx : out.estimatedIndices) {
    out.estimatedPoles.push_back(gridPole(idx, scenario.gridSize));
  }
  if (detector == Detector::Scsm) out.rawPoles = out.estimatedPoles;
  out.estimatedSymbols = recoverSymbols(samples, out.estimatedPoles);
  return out;
}

RecoveryResult runPipeline(const HrScenario& scenario, Decomposition method,
                           Detector detector, const PipelineOptions& options) {
  const Synthesis data = synthesize(scenario);
  const TuckerFactors factors = factorize(data.samples, scenario, method, options);
  return detect(data.samples, factors, scenario, method, detector, options);
}

Complex qpskDecision(Complex value) {
  return {value.real() < 0.0 ? -kInvSqrt2 : kInvSqrt2,
          value.imag() < 0.0 ? -kInvSqrt2 : kInvSqrt2};
}

}  // namespace l1hr
