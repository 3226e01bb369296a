#pragma once

#include <stdexcept>
#include <string>

namespace hardcore {

/// A computation broke down (underflow, failed bracket, lost invariant).
/// Precondition failures use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hardcore
