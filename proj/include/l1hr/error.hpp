#pragma once

#include <stdexcept>

namespace l1hr {

// Raised when a numerical stage cannot produce a result for the data it was
// given (rank-deficient shift-invariance system, duplicate poles, ...).
// Invalid arguments are reported with std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace l1hr
