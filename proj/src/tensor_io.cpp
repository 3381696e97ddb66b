#include "l1hr/tensor_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace l1hr {
namespace {

void writeEntry(std::ostream& out, const Complex& v) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.real(), v.imag());
  out << buf;
}

}  // namespace

ComplexTensor3 readTensorText(std::istream& in) {
  long long n1 = 0, n2 = 0, n3 = 0;
  if (!(in >> n1 >> n2 >> n3) || n1 < 1 || n2 < 1 || n3 < 1) {
    throw std::invalid_argument("tensor file: expected a header 'I1 I2 I3' of positive sizes");
  }
  const auto count = static_cast<std::size_t>(n1 * n2 * n3);
  std::vector<Complex> data;
  data.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) {
      throw std::invalid_argument("tensor file: expected " + std::to_string(count) +
                                  " entries, got " + std::to_string(i));
    }
    data.emplace_back(re, im);
  }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("tensor file: trailing data after entries");
  return ComplexTensor3({n1, n2, n3}, std::move(data));
}

void writeTensorText(std::ostream& out, const ComplexTensor3& tensor) {
  const auto& d = tensor.dims();
  out << d[0] << ' ' << d[1] << ' ' << d[2] << '\n';
  for (const Complex& v : tensor.data()) writeEntry(out, v);
}

void writeFactorsText(std::ostream& out, const TuckerFactors& factors) {
  for (int mode = 1; mode <= 3; ++mode) {
    const ComplexMatrix& m = factors.mode(mode).matrix();
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Index c = 0; c < m.cols(); ++c)
      for (Index r = 0; r < m.rows(); ++r) writeEntry(out, m(r, c));
  }
}

}  // namespace l1hr
