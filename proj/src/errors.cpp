#include "frosting/errors.hpp"

namespace frosting {

const char* err_name(Err kind) {
    switch (kind) {
        case Err::ZeroQuaternion: return "ZeroQuaternion";
        case Err::DegreeMismatch: return "DegreeMismatch";
        case Err::TooFewGaussians: return "TooFewGaussians";
        case Err::DegenerateBoundingBox: return "DegenerateBoundingBox";
        case Err::NonPositiveInput: return "NonPositiveInput";
        case Err::ShiftLengthMismatch: return "ShiftLengthMismatch";
        case Err::DegenerateCell: return "DegenerateCell";
        case Err::BadCellIndex: return "BadCellIndex";
        case Err::DegenerateCellCenter: return "DegenerateCellCenter";
        case Err::DegenerateAxes: return "DegenerateAxes";
        case Err::EmptyLayer: return "EmptyLayer";
        case Err::NonFiniteLoss: return "NonFiniteLoss";
        case Err::MissingProperty: return "MissingProperty";
        case Err::UnsupportedFormat: return "UnsupportedFormat";
        case Err::BadRestCount: return "BadRestCount";
        case Err::BadIndex: return "BadIndex";
        case Err::SchemaError: return "SchemaError";
        case Err::CorruptPackage: return "CorruptPackage";
        case Err::VersionError: return "VersionError";
        case Err::IoFailure: return "IoFailure";
        case Err::SizeMismatch: return "SizeMismatch";
    }
    return "UnknownError";
}

}  // namespace frosting
