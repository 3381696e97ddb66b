#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace l1hr {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Dense third-order complex tensor.
//
// Element (i1, i2, i3) is stored at i1 + I1 * (i2 + I2 * i3), so the raw
// storage is exactly the column-major layout of the mode-1 unfolding.
// Indices are 0-based.
class ComplexTensor3 {
 public:
  using Dims = std::array<Index, 3>;

  ComplexTensor3() = default;

  // Zero-filled tensor. Every dimension must be >= 1.
  explicit ComplexTensor3(const Dims& dims);

  // Takes ownership of `data` laid out as described above.
  ComplexTensor3(const Dims& dims, std::vector<Complex> data);

  const Dims& dims() const { return dims_; }

  // Size along a 1-based mode (1, 2 or 3).
  Index dim(int mode) const;

  Index size() const { return static_cast<Index>(data_.size()); }

  Complex& operator()(Index i1, Index i2, Index i3) {
    return data_[static_cast<std::size_t>(i1 + dims_[0] * (i2 + dims_[1] * i3))];
  }
  const Complex& operator()(Index i1, Index i2, Index i3) const {
    return data_[static_cast<std::size_t>(i1 + dims_[0] * (i2 + dims_[1] * i3))];
  }

  std::span<const Complex> data() const { return data_; }

  double frobeniusNorm() const;
  double l1Norm() const;

  bool operator==(const ComplexTensor3&) const = default;

 private:
  Dims dims_{0, 0, 0};
  std::vector<Complex> data_;
};

// Mode-k unfolding (k in {1,2,3}): an I_k x (prod_{l != k} I_l) matrix whose
// columns are the mode-k fibres. The remaining indices are ordered with the
// first one varying fastest, i.e. the column of fibre (i_a, i_b), a < b, is
// i_a + I_a * i_b. With this ordering
//   unfold(A x_2 M2 x_3 M3, 1) == unfold(A, 1) * kron(M3, M2)^T
// and likewise kron(M3, M1) for mode 2 and kron(M2, M1) for mode 3.
ComplexMatrix unfold(const ComplexTensor3& tensor, int mode);

// Inverse of unfold for the given target dimensions.
ComplexTensor3 fold(const ComplexMatrix& unfolding, int mode,
                    const ComplexTensor3::Dims& dims);

// A x_k M for M of shape R_k x I_k.
ComplexTensor3 modeProduct(const ComplexTensor3& tensor, int mode,
                           const ComplexMatrix& matrix);

// Standard Kronecker product; block (i, j) of the result is a(i, j) * b.
ComplexMatrix kronecker(const ComplexMatrix& a, const ComplexMatrix& b);

// Stacks Q sample vectors (rows of a Q x N matrix) into an I1 x I2 x Q
// tensor with H(i1, i2, q) = x^{(q)}_{i1 + i2}. Requires I1 + I2 - 1 == N.
ComplexTensor3 buildFsHankel(const ComplexMatrix& samples, Index rows,
                             Index cols);

// core x_1 U1 x_2 U2 x_3 U3.
ComplexTensor3 reconstruct(const ComplexTensor3& core, const ComplexMatrix& u1,
                           const ComplexMatrix& u2, const ComplexMatrix& u3);

// tensor x_1 U1^H x_2 U2^H x_3 U3^H.
ComplexTensor3 projectCore(const ComplexTensor3& tensor, const ComplexMatrix& u1,
                           const ComplexMatrix& u2, const ComplexMatrix& u3);

}  // namespace l1hr
