#pragma once

#include <stdexcept>
#include <string>

namespace mfc {

/// Invalid parameters: zero input gain, window shorter than two periods,
/// malformed scenario file, unknown preset.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite value reached a numeric kernel.
class NumericError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Samples pushed out of time order.
class OrderingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Time outside a reference profile's horizon.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A plant or observer state left the finite region |x| <= 1e9.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File I/O failure; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Magnitude beyond which a simulated state counts as diverged.
inline constexpr double kDivergenceBound = 1e9;

}  // namespace mfc
