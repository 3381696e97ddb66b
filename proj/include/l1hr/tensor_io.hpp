#pragma once

#include "l1hr/tensor.hpp"
#include "l1hr/tucker.hpp"

#include <iosfwd>

namespace l1hr {

// Plain-text tensor format: a header line "I1 I2 I3" followed by I1*I2*I3
// lines "re im", in the column order of the mode-1 unfolding (i1 fastest,
// then i2, then i3).
ComplexTensor3 readTensorText(std::istream& in);
void writeTensorText(std::ostream& out, const ComplexTensor3& tensor);

// Factor matrices of a decomposition: for each mode a line "rows cols"
// followed by rows*cols lines "re im" in column-major order.
void writeFactorsText(std::ostream& out, const TuckerFactors& factors);

}  // namespace l1hr
