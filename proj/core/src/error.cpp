#include "gchp/error.hpp"

namespace gchp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::TooFewEvents: return "TooFewEvents";
        case ErrorCode::NonStationaryFit: return "NonStationaryFit";
        case ErrorCode::OneSidedData: return "OneSidedData";
        case ErrorCode::ZeroDelta: return "ZeroDelta";
        case ErrorCode::NonConvergent: return "NonConvergent";
        case ErrorCode::SingularFundamentalMatrix: return "SingularFundamentalMatrix";
        case ErrorCode::UnknownFormat: return "UnknownFormat";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::WindowTooLarge: return "WindowTooLarge";
        case ErrorCode::DegenerateCurve: return "DegenerateCurve";
        case ErrorCode::AllKindsFailed: return "AllKindsFailed";
        case ErrorCode::EmptyReport: return "EmptyReport";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

} // namespace gchp
