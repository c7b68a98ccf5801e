#ifndef KTLAB_ERRORS_HPP
#define KTLAB_ERRORS_HPP

#include <stdexcept>

namespace ktlab {

// Invalid configuration or violated precondition (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// NaN/overflow or other breakdown during integration (CLI exit code 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ktlab

#endif
