#pragma once

#include <stdexcept>
#include <string>

namespace qregion {

/// Subsystem label is unknown, duplicated, or sets overlap where they must not.
struct LabelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operands have incompatible dimensions.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input fails a structural invariant (normalization, positivity, unitarity).
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested computation exceeds the desk-scale capacity limits.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed serialized state or region; message carries the offending field path.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qregion
