#pragma once

#include <stdexcept>
#include <string>

namespace stol {

// Raised for rejected inputs: shape mismatches, out-of-range labels,
// malformed files, violated preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

}  // namespace stol
