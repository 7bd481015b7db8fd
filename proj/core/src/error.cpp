#include "synchrocal/error.hpp"

namespace synchrocal {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::WindowSizeMismatch: return "WindowSizeMismatch";
    case ErrorCode::RateMismatch: return "RateMismatch";
    case ErrorCode::TimestampMismatch: return "TimestampMismatch";
    case ErrorCode::ZeroTruth: return "ZeroTruth";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InconsistentErrorColumns: return "InconsistentErrorColumns";
    case ErrorCode::BadSync: return "BadSync";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::BadCrc: return "BadCrc";
    case ErrorCode::IdCodeMismatch: return "IdCodeMismatch";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::TooFewRuns: return "TooFewRuns";
    case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, std::optional<std::size_t> line)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), line_(line)
{
}

} // namespace synchrocal
