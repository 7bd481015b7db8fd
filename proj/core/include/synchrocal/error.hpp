#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace synchrocal {

enum class ErrorCode {
    InvalidSpec,
    InvalidProfile,
    InvalidModel,
    InvalidConfig,
    IndexOutOfRange,
    WindowSizeMismatch,
    RateMismatch,
    TimestampMismatch,
    ZeroTruth,
    TooFewSamples,
    ConstantInput,
    EmptySeries,
    NoConvergence,
    MissingColumn,
    MalformedRow,
    InconsistentErrorColumns,
    BadSync,
    BadLength,
    BadCrc,
    IdCodeMismatch,
    ValueOutOfRange,
    TooFewRuns,
    IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `line()` is set for row-level CSV errors.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
};

} // namespace synchrocal
