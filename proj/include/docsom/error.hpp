#pragma once

#include <stdexcept>
#include <string>

namespace docsom {

// Raised for bad inputs: malformed files, broken invariants, invalid configs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace docsom
