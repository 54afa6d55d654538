#pragma once

#include <stdexcept>
#include <string>

namespace zite {

/// A numerical procedure failed: indefinite stiffness matrix, empty
/// spectrum, too few roots in a search window, estimate out of range.
/// Parameter and configuration problems use std::invalid_argument or
/// std::domain_error instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace zite
