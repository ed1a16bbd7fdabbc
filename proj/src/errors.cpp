#include "fracmix/errors.hpp"

namespace fracmix {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::UnsupportedRegion: return "UnsupportedRegion";
        case ErrorCode::RegionTooSmall: return "RegionTooSmall";
        case ErrorCode::NonPositiveR: return "NonPositiveR";
        case ErrorCode::SingularPotential: return "SingularPotential";
        case ErrorCode::NonPositivePotential: return "NonPositivePotential";
        case ErrorCode::ResolutionTooLow: return "ResolutionTooLow";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::IllPosedMode: return "IllPosedMode";
        case ErrorCode::NotIllPosed: return "NotIllPosed";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InputError: return "InputError";
    }
    return "Unknown";
}

void fail(ErrorCode code, const std::string& what) {
    throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace fracmix
