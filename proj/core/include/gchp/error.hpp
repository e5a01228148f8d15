#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gchp {

// Named failure conditions raised by the modelling pipeline. Precondition
// violations on plain arguments throw std::invalid_argument instead.
enum class ErrorCode {
    TooFewEvents,
    NonStationaryFit,
    OneSidedData,
    ZeroDelta,
    NonConvergent,
    SingularFundamentalMatrix,
    UnknownFormat,
    MalformedRow,
    TooFewSamples,
    InsufficientData,
    WindowTooLarge,
    DegenerateCurve,
    AllKindsFailed,
    EmptyReport,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    // Message without the code prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace gchp
