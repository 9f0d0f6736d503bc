#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exact computation would leave its declared integer headroom.
class HeadroomError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-contract input (bad degree, bad window, non-commuting maps...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The requested computation exceeds its configured work budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A shifted or truncated average ran off the end of the available sample.
class InsufficientWindow : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ergolab
