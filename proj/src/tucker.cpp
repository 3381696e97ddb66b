#include "l1hr/tucker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace l1hr {
namespace {

void checkRanks(const ComplexTensor3& tensor, const TuckerRanks& ranks) {
  for (int mode = 1; mode <= 3; ++mode) {
    const Index r = ranks[static_cast<std::size_t>(mode - 1)];
    if (r < 1 || r > tensor.dim(mode)) {
      throw std::invalid_argument("rank " + std::to_string(r) + " for mode " +
                                  std::to_string(mode) + " must be in [1, " +
                                  std::to_string(tensor.dim(mode)) + "]");
    }
  }
}

void checkConfig(const ComplexTensor3& tensor, const TuckerConfig& config) {
  checkRanks(tensor, config.ranks);
  if (!(config.delta > 0.0) || !(config.outerTol > 0.0)) {
    throw std::invalid_argument("tucker tolerances must be positive");
  }
  if (config.maxInnerIters < 1 || config.maxOuterIters < 1) {
    throw std::invalid_argument("tucker iteration caps must be >= 1");
  }
}

void checkFactors(const ComplexTensor3& tensor, const TuckerRanks& ranks,
                  const FactorSet& factors) {
  for (int mode = 1; mode <= 3; ++mode) {
    const auto& u = factors[static_cast<std::size_t>(mode - 1)];
    if (u.rows() != tensor.dim(mode) ||
        u.cols() != ranks[static_cast<std::size_t>(mode - 1)]) {
      throw std::invalid_argument("initial factor for mode " + std::to_string(mode) +
                                  " has the wrong shape");
    }
  }
}

Index rankOf(const TuckerRanks& ranks, int mode) {
  return ranks[static_cast<std::size_t>(mode - 1)];
}

SemiUnitaryMatrix& factorOf(FactorSet& factors, int mode) {
  return factors[static_cast<std::size_t>(mode - 1)];
}

bool improvementBelow(double current, double previous, double tol) {
  return current - previous <= tol * std::max(std::abs(previous), 1e-300);
}

}  // namespace

ComplexMatrix partialProjection(const ComplexTensor3& tensor,
                                const FactorSet& factors, int mode) {
  ComplexTensor3 t = tensor;
  for (int other = 1; other <= 3; ++other) {
    if (other == mode) continue;
    t = modeProduct(t, other, factors[static_cast<std::size_t>(other - 1)].matrix().adjoint());
  }
  return unfold(t, mode);
}

double l1TuckerObjective(const ComplexTensor3& tensor, const FactorSet& factors) {
  return projectCore(tensor, factors[0].matrix(), factors[1].matrix(),
                     factors[2].matrix())
      .l1Norm();
}

double frobTuckerObjective(const ComplexTensor3& tensor, const FactorSet& factors) {
  return projectCore(tensor, factors[0].matrix(), factors[1].matrix(),
                     factors[2].matrix())
      .frobeniusNorm();
}

TuckerFactors hosvd(const ComplexTensor3& tensor, const TuckerRanks& ranks) {
  checkRanks(tensor, ranks);
  TuckerFactors out;
  for (int mode = 1; mode <= 3; ++mode) {
    factorOf(out.factors, mode) = svdPca(unfold(tensor, mode), rankOf(ranks, mode));
  }
  return out;
}

TuckerFactors hooi(const ComplexTensor3& tensor, const TuckerConfig& config,
                   const std::optional<FactorSet>& init) {
  checkConfig(tensor, config);
  TuckerFactors out;
  if (init) {
    checkFactors(tensor, config.ranks, *init);
    out.factors = *init;
  } else {
    out.factors = hosvd(tensor, config.ranks).factors;
  }
  out.converged = false;

  double previous = frobTuckerObjective(tensor, out.factors);
  for (int sweep = 1; sweep <= config.maxOuterIters; ++sweep) {
    for (int mode = 1; mode <= 3; ++mode) {
      const ComplexMatrix projected = partialProjection(tensor, out.factors, mode);
      auto& u = factorOf(out.factors, mode);
      u = svdPca(projected, rankOf(config.ranks, mode));
      out.objectiveTrace.push_back(frobNorm(u.matrix().adjoint() * projected));
    }
    out.sweeps = sweep;
    const double current = out.objectiveTrace.back();
    if (improvementBelow(current, previous, config.outerTol)) {
      out.converged = true;
      break;
    }
    previous = current;
  }
  return out;
}

TuckerFactors l1totd(const ComplexTensor3& tensor, const TuckerConfig& config,
                     const std::optional<FactorSet>& init) {
  checkConfig(tensor, config);
  if (init) checkFactors(tensor, config.ranks, *init);

  // The three mode problems are independent of each other.
  TuckerFactors out;
  for (int mode = 1; mode <= 3; ++mode) {
    const ComplexMatrix unfolding = unfold(tensor, mode);
    const Index rank = rankOf(config.ranks, mode);
    const SemiUnitaryMatrix start =
        init ? (*init)[static_cast<std::size_t>(mode - 1)] : svdPca(unfolding, rank);
    L1PcaResult r = l1pca(unfolding, {rank, config.delta, config.maxInnerIters}, start);
    out.objectiveTrace.push_back(r.objective);
    out.converged = out.converged && r.converged;
    factorOf(out.factors, mode) = std::move(r.basis);
  }
  return out;
}

TuckerFactors l1tooi(const ComplexTensor3& tensor, const TuckerConfig& config) {
  checkConfig(tensor, config);
  TuckerFactors out;
  out.factors = l1totd(tensor, config).factors;
  out.converged = false;

  double previous = l1TuckerObjective(tensor, out.factors);
  for (int sweep = 1; sweep <= config.maxOuterIters; ++sweep) {
    for (int mode = 1; mode <= 3; ++mode) {
      const ComplexMatrix projected = partialProjection(tensor, out.factors, mode);
      auto& u = factorOf(out.factors, mode);
      L1PcaResult r =
          l1pca(projected, {rankOf(config.ranks, mode), config.delta, config.maxInnerIters}, u);
      out.objectiveTrace.push_back(r.objective);
      u = std::move(r.basis);
    }
    out.sweeps = sweep;
    const double current = out.objectiveTrace.back();
    if (improvementBelow(current, previous, config.outerTol)) {
      out.converged = true;
      break;
    }
    previous = current;
  }
  return out;
}

}  // namespace l1hr
