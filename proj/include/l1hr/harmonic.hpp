#pragma once

#include "l1hr/robust_pca.hpp"
#include "l1hr/tensor.hpp"
#include "l1hr/tucker.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace l1hr {

// Random-access multi-symbol harmonic retrieval experiment.
//
// K - 1 subcarriers with poles z_k = exp(j 2 pi k / K), k = 1..K-1, of which
// `activeCount` carry one QPSK symbol per frame slot q. Each symbol is
// observed through `sampleCount` samples, stacked into an I1 x I2 x Q Hankel
// tensor with I1 + I2 - 1 = N.
struct HrScenario {
  int gridSize = 50;      // K
  int activeCount = 6;    // Ka
  int symbolCount = 12;   // Q
  int sampleCount = 32;   // N
  int hankelRows = 17;    // I1
  int hankelCols = 16;    // I2
  // +inf means noiseless.
  double snrDb = std::numeric_limits<double>::infinity();
  double outlierFraction = 0.0;
  double outlierVariance = 20.0;
  std::uint64_t seed = 0;
  double deltaT = 1.0;

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  // sigma^2 = Ka * 10^(-snrDb / 10): SNR is the mean noiseless sample power
  // (Ka for unit-power symbols on unit-modulus poles) over the noise power.
  double noiseVariance() const;

  // Number of samples hit by an outlier, floor(rho * N * Q).
  int outlierCount() const;
};

Complex gridPole(int subcarrier, int gridSize);

struct GroundTruth {
  std::vector<int> activeIndices;  // ascending, in [1, K-1]
  ComplexMatrix symbols;           // Ka x Q, row r belongs to activeIndices[r]
  std::vector<Complex> poles;
  std::vector<double> pulsations;
};

struct Synthesis {
  GroundTruth truth;
  ComplexMatrix samples;       // Q x N, noise and outliers included
  ComplexMatrix cleanSamples;  // Q x N
};

// Deterministic in scenario.seed.
Synthesis synthesize(const HrScenario& scenario);

// Columns w_i = (1/I)(1, z_i, ..., z_i^{I-1})^T for i = 1..K-1 and their
// unit-norm copies. Column c corresponds to subcarrier c + 1.
class VandermondeDictionary {
 public:
  VandermondeDictionary(int gridSize, Index length);

  int gridSize() const { return gridSize_; }
  Index length() const { return vectors_.rows(); }
  Index size() const { return vectors_.cols(); }

  const ComplexMatrix& vectors() const { return vectors_; }
  const ComplexMatrix& normalized() const { return normalized_; }

  // Columns of `vectors()` for the given subcarriers.
  ComplexMatrix select(const std::vector<int>& subcarriers) const;

 private:
  int gridSize_;
  ComplexMatrix vectors_;
  ComplexMatrix normalized_;
};

// Assigns each estimate to a distinct grid subcarrier in [1, K-1]: all
// (estimate, subcarrier) pairs are visited by increasing |z - z_k| and a
// pair is taken when both sides are still free. Result is aligned with
// `estimates`.
std::vector<int> hardDecide(const std::vector<Complex>& estimates, int gridSize);

struct EspritResult {
  std::vector<Complex> rawEigenvalues;
  std::vector<int> indices;  // hard decisions aligned with rawEigenvalues
};

// Solves U(2:I, :) = U(1:I-1, :) Z in the least-squares sense and takes the
// eigenvalues of Z as pole estimates. Throws NumericalError if the top block
// is rank deficient.
EspritResult espritRecover(const SemiUnitaryMatrix& basis, int gridSize);

// s_i = ||w_i^H U||_F with unit-norm dictionary vectors.
Eigen::VectorXd scsmScores(const SemiUnitaryMatrix& basis,
                           const VandermondeDictionary& dictionary);

// Subcarriers of the `activeCount` largest scores (ties go to the smaller
// subcarrier), returned in ascending order.
std::vector<int> selectLargest(const Eigen::VectorXd& scores, Index activeCount);

std::vector<int> scsmRecover(const SemiUnitaryMatrix& basis,
                             const VandermondeDictionary& dictionary,
                             Index activeCount);

// Least-squares symbols for the given poles: for every row x^(q) of the
// Q x N sample matrix, min_c ||x^(q) - V c|| with V(n, k) = z_k^n.
// Returns Ka x Q. Throws NumericalError when V is rank deficient.
ComplexMatrix recoverSymbols(const ComplexMatrix& samples,
                             const std::vector<Complex>& poles);

enum class Decomposition { Hosvd, Hooi, L1Totd, L1Tooi };
enum class Detector { Esprit, Scsm };

std::string_view toString(Decomposition method);
std::string_view toString(Detector detector);
std::optional<Decomposition> parseDecomposition(std::string_view name);
std::optional<Detector> parseDetector(std::string_view name);

struct PipelineOptions {
  // Absolute inner L1-PCA tolerance. Hankel tensors of the default scenario
  // have L1-PCA objectives near 1e3, so this is about 1e-6 relative.
  double delta = 1e-3;
  int maxInnerIters = 500;
  double outerTol = 1e-6;
  int maxOuterIters = 100;
  // Average mode-1 and mode-2 SCSM scores instead of mode-1 only.
  bool fuseModeTwo = false;
};

struct RecoveryResult {
  std::vector<int> estimatedIndices;
  std::vector<Complex> estimatedPoles;  // grid poles of estimatedIndices
  // ESPRIT eigenvalues before hard decision; equal to estimatedPoles for SCSM.
  std::vector<Complex> rawPoles;
  ComplexMatrix estimatedSymbols;  // Ka x Q, row r belongs to estimatedIndices[r]
  Decomposition method = Decomposition::L1Tooi;
  Detector detector = Detector::Scsm;

  bool operator==(const RecoveryResult&) const = default;
};

// Hankel tensor + chosen decomposition with ranks (Ka, Ka, Q).
TuckerFactors factorize(const ComplexMatrix& samples, const HrScenario& scenario,
                        Decomposition method, const PipelineOptions& options = {});

// Detector on the mode-1 factor followed by symbol recovery.
RecoveryResult detect(const ComplexMatrix& samples, const TuckerFactors& factors,
                      const HrScenario& scenario, Decomposition method,
                      Detector detector, const PipelineOptions& options = {});

// synthesize -> Hankel -> decomposition -> detector -> symbols.
RecoveryResult runPipeline(const HrScenario& scenario, Decomposition method,
                           Detector detector, const PipelineOptions& options = {});

// Nearest QPSK point (+-1 +-j)/sqrt(2).
Complex qpskDecision(Complex value);

}  // namespace l1hr
