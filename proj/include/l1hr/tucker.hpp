#pragma once

#include "l1hr/robust_pca.hpp"
#include "l1hr/tensor.hpp"

#include <array>
#include <optional>
#include <vector>

namespace l1hr {

using TuckerRanks = std::array<Index, 3>;
using FactorSet = std::array<SemiUnitaryMatrix, 3>;

struct TuckerConfig {
  TuckerRanks ranks{1, 1, 1};
  // Inner L1-PCA tolerance.
  double delta = 1e-6;
  int maxInnerIters = 500;
  // Relative objective improvement over one sweep below which the
  // alternating engines (HOOI, L1-TOOI) stop.
  double outerTol = 1e-6;
  int maxOuterIters = 100;
};

struct TuckerFactors {
  FactorSet factors;
  // hooi:   ||U_i^H H_i||_F after every sub-step.
  // l1totd: ||U_i^H unfold(H, i)||_1 for i = 1, 2, 3.
  // l1tooi: ||U_i^H H_i||_1 after every sub-step (nondecreasing).
  // hosvd leaves it empty.
  std::vector<double> objectiveTrace;
  int sweeps = 0;
  bool converged = true;

  // Factor for a 1-based mode.
  const SemiUnitaryMatrix& mode(int m) const {
    return factors[static_cast<std::size_t>(m - 1)];
  }
};

// unfold(H x_j U_j^H for all j != mode, mode), computed with mode products.
// Equals unfold(H, mode) * conj(kron(...)) with the operand order
// mode 1 -> (U3 (x) U2), mode 2 -> (U3 (x) U1), mode 3 -> (U2 (x) U1).
ComplexMatrix partialProjection(const ComplexTensor3& tensor,
                                const FactorSet& factors, int mode);

// ||H x_1 U1^H x_2 U2^H x_3 U3^H||_1 and ||...||_F.
double l1TuckerObjective(const ComplexTensor3& tensor, const FactorSet& factors);
double frobTuckerObjective(const ComplexTensor3& tensor, const FactorSet& factors);

TuckerFactors hosvd(const ComplexTensor3& tensor, const TuckerRanks& ranks);

// Starts from `init` when given, from hosvd otherwise.
TuckerFactors hooi(const ComplexTensor3& tensor, const TuckerConfig& config,
                   const std::optional<FactorSet>& init = std::nullopt);

// One L1-PCA per mode on the plain unfoldings. Modes without an explicit
// initial basis start from svdPca of the unfolding.
TuckerFactors l1totd(const ComplexTensor3& tensor, const TuckerConfig& config,
                     const std::optional<FactorSet>& init = std::nullopt);

// Alternating L1-PCA sweeps started from l1totd.
TuckerFactors l1tooi(const ComplexTensor3& tensor, const TuckerConfig& config);

}  // namespace l1hr
