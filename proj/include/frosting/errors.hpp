#pragma once

#include <stdexcept>
#include <string>

namespace frosting {

enum class Err {
    ZeroQuaternion,
    DegreeMismatch,
    TooFewGaussians,
    DegenerateBoundingBox,
    NonPositiveInput,
    ShiftLengthMismatch,
    DegenerateCell,
    BadCellIndex,
    DegenerateCellCenter,
    DegenerateAxes,
    EmptyLayer,
    NonFiniteLoss,
    MissingProperty,
    UnsupportedFormat,
    BadRestCount,
    BadIndex,
    SchemaError,
    CorruptPackage,
    VersionError,
    IoFailure,
    SizeMismatch,
};

const char* err_name(Err kind);

// Domain error: bad inputs, malformed files, violated preconditions.
// CLI maps these to exit code 1. Internal invariant breaches use
// std::logic_error and map to exit code 2.
class Error : public std::runtime_error {
  public:
    Error(Err kind, const std::string& message)
        : std::runtime_error(std::string(err_name(kind)) + ": " + message), kind_(kind) {}

    Err kind() const { return kind_; }

  private:
    Err kind_;
};

[[noreturn]] inline void fail(Err kind, const std::string& message) {
    throw Error(kind, message);
}

inline void internal_check(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("internal invariant violated: ") + what);
}

}  // namespace frosting
