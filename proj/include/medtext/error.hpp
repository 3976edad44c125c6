#pragma once

#include <stdexcept>
#include <string>

namespace medtext {

// Malformed or contract-violating input data. The CLI maps this to exit
// code 1; usage problems are handled by the argument parser (exit 2).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace medtext
