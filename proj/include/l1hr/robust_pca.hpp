#pragma once

#include "l1hr/tensor.hpp"

#include <vector>

namespace l1hr {

// Complex matrix with orthonormal columns (P^H P = I, cols <= rows).
class SemiUnitaryMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  SemiUnitaryMatrix() = default;

  // Throws std::invalid_argument unless max |P^H P - I| <= kTolerance.
  explicit SemiUnitaryMatrix(ComplexMatrix m);

  static SemiUnitaryMatrix identity(Index n);

  const ComplexMatrix& matrix() const { return m_; }
  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }

  // Orthogonal projector P P^H onto the column space.
  ComplexMatrix projector() const { return m_ * m_.adjoint(); }

 private:
  ComplexMatrix m_;
};

// Largest entry of |P^H P - I|.
double orthonormalityError(const ComplexMatrix& m);

// ||P P^H - Q Q^H||_F, the basis-independent distance between two subspaces.
double projectorDistance(const ComplexMatrix& p, const ComplexMatrix& q);

// Entrywise a / |a|, with zero entries mapped to 1.
ComplexMatrix csgn(const ComplexMatrix& a);

// U V^H from the thin SVD a = U D V^H. When fewer than min(rows, cols)
// singular values are numerically nonzero the missing singular vectors are
// completed deterministically by Gram-Schmidt on the standard basis, so the
// result always has orthonormal columns (rows >= cols) or rows (rows < cols).
// Throws std::invalid_argument for an all-zero input.
ComplexMatrix unt(const ComplexMatrix& a);

double l1Norm(const ComplexMatrix& a);
double frobNorm(const ComplexMatrix& a);
double nuclearNorm(const ComplexMatrix& a);

struct L1PcaConfig {
  Index rank = 1;
  // Stop once the nuclear-norm sequence moves by at most this much.
  double delta = 1e-6;
  int maxIters = 500;
};

struct L1PcaResult {
  SemiUnitaryMatrix basis;
  // ||basis^H X||_1
  double objective = 0.0;
  // Number of sign-matrix updates after the initial one.
  int iterations = 0;
  bool converged = false;
  // ||X B^(k)||_* for k = 0..iterations; nondecreasing.
  std::vector<double> nuclearTrace;
};

// Fixed-point iteration for max ||P^H X||_1 over D x K semi-unitary P,
// started from `init`:
//   B0 = csgn(X^H P0), B(k) = csgn(X^H unt(X B(k-1))),
// returning unt(X B(k)) once |‖XB(k)‖_* - ‖XB(k-1)‖_*| <= delta.
L1PcaResult l1pca(const ComplexMatrix& x, const L1PcaConfig& config,
                  const SemiUnitaryMatrix& init);

// First `rank` left singular vectors of x.
SemiUnitaryMatrix svdPca(const ComplexMatrix& x, Index rank);

}  // namespace l1hr
