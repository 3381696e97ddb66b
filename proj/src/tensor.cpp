#include "l1hr/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace l1hr {
namespace {

void checkMode(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("mode index must be 1, 2 or 3, got " +
                                std::to_string(mode));
  }
}

void checkDims(const ComplexTensor3::Dims& dims) {
  for (Index d : dims) {
    if (d < 1) throw std::invalid_argument("tensor dimensions must be positive");
  }
}

std::size_t volume(const ComplexTensor3::Dims& dims) {
  return static_cast<std::size_t>(dims[0] * dims[1] * dims[2]);
}

}  // namespace

ComplexTensor3::ComplexTensor3(const Dims& dims) : dims_(dims) {
  checkDims(dims);
  data_.assign(volume(dims), Complex{0.0, 0.0});
}

ComplexTensor3::ComplexTensor3(const Dims& dims, std::vector<Complex> data)
    : dims_(dims), data_(std::move(data)) {
  checkDims(dims);
  if (data_.size() != volume(dims)) {
    throw std::invalid_argument("tensor data length does not match dimensions");
  }
}

Index ComplexTensor3::dim(int mode) const {
  checkMode(mode);
  return dims_[static_cast<std::size_t>(mode - 1)];
}

double ComplexTensor3::frobeniusNorm() const {
  double sum = 0.0;
  for (const Complex& v : data_) sum += std::norm(v);
  return std::sqrt(sum);
}

double ComplexTensor3::l1Norm() const {
  double sum = 0.0;
  for (const Complex& v : data_) sum += std::abs(v);
  return sum;
}

ComplexMatrix unfold(const ComplexTensor3& tensor, int mode) {
  checkMode(mode);
  const auto [n1, n2, n3] = tensor.dims();
  const auto data = tensor.data();
  switch (mode) {
    case 1:
      return Eigen::Map<const ComplexMatrix>(data.data(), n1, n2 * n3);
    case 2: {
      ComplexMatrix out(n2, n1 * n3);
      for (Index k = 0; k < n3; ++k)
        for (Index j = 0; j < n2; ++j)
          for (Index i = 0; i < n1; ++i) out(j, i + n1 * k) = tensor(i, j, k);
      return out;
    }
    default: {
      ComplexMatrix out(n3, n1 * n2);
      for (Index k = 0; k < n3; ++k)
        for (Index j = 0; j < n2; ++j)
          for (Index i = 0; i < n1; ++i) out(k, i + n1 * j) = tensor(i, j, k);
      return out;
    }
  }
}

ComplexTensor3 fold(const ComplexMatrix& unfolding, int mode,
                    const ComplexTensor3::Dims& dims) {
  checkMode(mode);
  ComplexTensor3 out(dims);
  const auto [n1, n2, n3] = dims;
  const Index expectedRows = dims[static_cast<std::size_t>(mode - 1)];
  if (unfolding.rows() != expectedRows ||
      unfolding.rows() * unfolding.cols() != n1 * n2 * n3) {
    throw std::invalid_argument("unfolding shape does not match target dims");
  }
  for (Index k = 0; k < n3; ++k)
    for (Index j = 0; j < n2; ++j)
      for (Index i = 0; i < n1; ++i) {
        switch (mode) {
          case 1: out(i, j, k) = unfolding(i, j + n2 * k); break;
          case 2: out(i, j, k) = unfolding(j, i + n1 * k); break;
          default: out(i, j, k) = unfolding(k, i + n1 * j); break;
        }
      }
  return out;
}

ComplexTensor3 modeProduct(const ComplexTensor3& tensor, int mode,
                           const ComplexMatrix& matrix) {
  checkMode(mode);
  if (matrix.cols() != tensor.dim(mode)) {
    throw std::invalid_argument("mode product: matrix columns (" +
                                std::to_string(matrix.cols()) +
                                ") != tensor mode size (" +
                                std::to_string(tensor.dim(mode)) + ")");
  }
  auto dims = tensor.dims();
  dims[static_cast<std::size_t>(mode - 1)] = matrix.rows();
  return fold(matrix * unfold(tensor, mode), mode, dims);
}

ComplexMatrix kronecker(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexTensor3 buildFsHankel(const ComplexMatrix& samples, Index rows,
                             Index cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("Hankel dimensions must be positive");
  }
  if (rows + cols - 1 != samples.cols()) {
    throw std::invalid_argument("Hankel dimensions require I1 + I2 - 1 == N (" +
                                std::to_string(rows) + " + " +
                                std::to_string(cols) + " - 1 != " +
                                std::to_string(samples.cols()) + ")");
  }
  if (samples.rows() < 1) throw std::invalid_argument("need at least one symbol");
  ComplexTensor3 out({rows, cols, samples.rows()});
  for (Index q = 0; q < samples.rows(); ++q)
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) out(i, j, q) = samples(q, i + j);
  return out;
}

ComplexTensor3 reconstruct(const ComplexTensor3& core, const ComplexMatrix& u1,
                           const ComplexMatrix& u2, const ComplexMatrix& u3) {
  return modeProduct(modeProduct(modeProduct(core, 1, u1), 2, u2), 3, u3);
}

ComplexTensor3 projectCore(const ComplexTensor3& tensor, const ComplexMatrix& u1,
                           const ComplexMatrix& u2, const ComplexMatrix& u3) {
  return modeProduct(modeProduct(modeProduct(tensor, 1, u1.adjoint()), 2,
                                 u2.adjoint()),
                     3, u3.adjoint());
}

}  // namespace l1hr
