#include "l1hr/robust_pca.hpp"

#include <Eigen/Eigenvalues>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace l1hr {
namespace {

// Relative threshold below which a singular value counts as zero.
constexpr double kRankTolerance = 1e-12;
// Smallest eigenvalue ratio of a^H a for which the Gram route keeps the
// polar factor orthonormal to about 1e-13.
constexpr double kGramConditionFloor = 1e-3;

// Extends the orthonormal columns of `basis` to `target` columns with
// Gram-Schmidt against e_0, e_1, ... in order.
ComplexMatrix completeBasis(const ComplexMatrix& basis, Index target) {
  ComplexMatrix out(basis.rows(), target);
  Index filled = basis.cols();
  out.leftCols(filled) = basis;
  for (Index c = 0; c < basis.rows() && filled < target; ++c) {
    ComplexVector v = ComplexVector::Unit(basis.rows(), c);
    for (int pass = 0; pass < 2; ++pass) {
      const auto current = out.leftCols(filled);
      v -= current * (current.adjoint() * v);
    }
    const double n = v.norm();
    if (n > 1e-8) out.col(filled++) = v / n;
  }
  return out;
}

struct ThinSvd {
  ComplexMatrix u;
  Eigen::VectorXd s;  // nonincreasing
  ComplexMatrix v;
};

// LAPACK divide and conquer, with Eigen's Jacobi SVD as a fallback when the
// LAPACK driver reports failure.
ThinSvd thinSvd(const ComplexMatrix& a) {
  const auto rows = static_cast<lapack_int>(a.rows());
  const auto cols = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(rows, cols);
  ComplexMatrix work = a;
  ThinSvd out{ComplexMatrix(rows, k), Eigen::VectorXd(k), ComplexMatrix(k, cols)};
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, work.data(), rows, out.s.data(),
                     out.u.data(), rows, out.v.data(), k);
  if (info == 0) {
    out.v.adjointInPlace();
    return out;
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

struct Polar {
  ComplexMatrix factor;  // unt(a)
  double nuclear = 0.0;  // ||a||_*
};

Polar polarDecompose(const ComplexMatrix& a) {
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("unt: input matrix is zero");
  }
  // Well-conditioned case: a (a^H a)^{-1/2} from the small Gram matrix.
  if (a.cols() <= a.rows()) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(a.adjoint() * a);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    if (eig.info() == Eigen::Success && lambda(0) > kGramConditionFloor * lambda.maxCoeff()) {
      const Eigen::VectorXd s = lambda.cwiseSqrt();
      Polar out;
      out.nuclear = s.sum();
      out.factor = a * (eig.eigenvectors() * s.cwiseInverse().asDiagonal() *
                        eig.eigenvectors().adjoint());
      return out;
    }
  }
  const ThinSvd svd = thinSvd(a);
  const Eigen::VectorXd& s = svd.s;
  const Index full = s.size();
  const double threshold = kRankTolerance * std::max(1.0, s(0));
  Index numericRank = 0;
  while (numericRank < full && s(numericRank) > threshold) ++numericRank;

  Polar out;
  out.nuclear = s.sum();
  if (numericRank == full) {
    out.factor = svd.u * svd.v.adjoint();
  } else {
    const ComplexMatrix u = completeBasis(svd.u.leftCols(numericRank), full);
    const ComplexMatrix v = completeBasis(svd.v.leftCols(numericRank), full);
    out.factor = u * v.adjoint();
  }
  return out;
}

}  // namespace

SemiUnitaryMatrix::SemiUnitaryMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.cols() > m_.rows()) {
    throw std::invalid_argument("semi-unitary matrix needs cols <= rows");
  }
  const double err = orthonormalityError(m_);
  if (!(err <= kTolerance)) {
    throw std::invalid_argument("matrix columns are not orthonormal (error " +
                                std::to_string(err) + ")");
  }
}

SemiUnitaryMatrix SemiUnitaryMatrix::identity(Index n) {
  return SemiUnitaryMatrix(ComplexMatrix::Identity(n, n));
}

double orthonormalityError(const ComplexMatrix& m) {
  if (m.cols() == 0) return 0.0;
  const ComplexMatrix gram = m.adjoint() * m;
  return (gram - ComplexMatrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

double projectorDistance(const ComplexMatrix& p, const ComplexMatrix& q) {
  if (p.rows() != q.rows()) {
    throw std::invalid_argument("projectorDistance: row counts differ");
  }
  return (p * p.adjoint() - q * q.adjoint()).norm();
}

ComplexMatrix csgn(const ComplexMatrix& a) {
  return a.unaryExpr([](const Complex& v) {
    const double r = std::abs(v);
    return r == 0.0 ? Complex{1.0, 0.0} : v / r;
  });
}

ComplexMatrix unt(const ComplexMatrix& a) { return polarDecompose(a).factor; }

double l1Norm(const ComplexMatrix& a) { return a.cwiseAbs().sum(); }

double frobNorm(const ComplexMatrix& a) { return a.norm(); }

double nuclearNorm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues().sum();
}

L1PcaResult l1pca(const ComplexMatrix& x, const L1PcaConfig& config,
                  const SemiUnitaryMatrix& init) {
  if (config.rank < 1 || config.rank > x.rows()) {
    throw std::invalid_argument("l1pca: rank must be in [1, rows(X)]");
  }
  if (!(config.delta > 0.0)) throw std::invalid_argument("l1pca: delta must be > 0");
  if (config.maxIters < 1) throw std::invalid_argument("l1pca: maxIters must be >= 1");
  if (init.rows() != x.rows() || init.cols() != config.rank) {
    throw std::invalid_argument("l1pca: initial basis is " +
                                std::to_string(init.rows()) + "x" +
                                std::to_string(init.cols()) + ", expected " +
                                std::to_string(x.rows()) + "x" +
                                std::to_string(config.rank));
  }
  if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("l1pca: data matrix is zero");
  }

  const ComplexMatrix xh = x.adjoint();
  L1PcaResult result;

  ComplexMatrix signs = csgn(xh * init.matrix());
  Polar polar = polarDecompose(x * signs);
  result.nuclearTrace.push_back(polar.nuclear);

  int k = 0;
  while (true) {
    signs = csgn(xh * polar.factor);
    const double previous = polar.nuclear;
    polar = polarDecompose(x * signs);
    result.nuclearTrace.push_back(polar.nuclear);
    ++k;
    if (std::abs(polar.nuclear - previous) <= config.delta) {
      result.converged = true;
      break;
    }
    if (k >= config.maxIters) break;
  }

  result.iterations = k;
  result.objective = l1Norm(polar.factor.adjoint() * x);
  result.basis = SemiUnitaryMatrix(std::move(polar.factor));
  return result;
}

SemiUnitaryMatrix svdPca(const ComplexMatrix& x, Index rank) {
  if (rank < 1 || rank > std::min(x.rows(), x.cols())) {
    throw std::invalid_argument("svdPca: rank " + std::to_string(rank) +
                                " exceeds min(rows, cols) of a " +
                                std::to_string(x.rows()) + "x" +
                                std::to_string(x.cols()) + " matrix");
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeThinU);
  return SemiUnitaryMatrix(svd.matrixU().leftCols(rank));
}

}  // namespace l1hr
