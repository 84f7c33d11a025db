#include "vfil/error.hpp"

namespace vfil {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::GridTooSmall: return "GridTooSmall";
        case ErrorCode::GridNotSymmetric: return "GridNotSymmetric";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::OrderTooHigh: return "OrderTooHigh";
        case ErrorCode::DegenerateVector: return "DegenerateVector";
        case ErrorCode::NotUnitField: return "NotUnitField";
        case ErrorCode::UnknownFamily: return "UnknownFamily";
        case ErrorCode::FarFieldRejected: return "FarFieldRejected";
        case ErrorCode::CompatibilityRejected: return "CompatibilityRejected";
        case ErrorCode::StabilityViolated: return "StabilityViolated";
        case ErrorCode::FixedPointDiverged: return "FixedPointDiverged";
        case ErrorCode::MaskFragmented: return "MaskFragmented";
        case ErrorCode::InsufficientSnapshots: return "InsufficientSnapshots";
        case ErrorCode::UnknownOracle: return "UnknownOracle";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

}  // namespace vfil
