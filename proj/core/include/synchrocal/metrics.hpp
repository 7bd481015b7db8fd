#pragma once

#include "synchrocal/signals.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synchrocal {

// Sign convention throughout: error = true - measured.

enum class ErrorChannel { RME, PE };

std::string_view to_string(ErrorChannel c) noexcept;

/// Symmetrical-component positive sequence (Xa + a Xb + a^2 Xc) / 3, a = 1 at 120 degrees.
/// Throws TimestampMismatch when the report indices differ.
TimeTaggedPhasor positive_sequence(const TimeTaggedPhasor& a, const TimeTaggedPhasor& b, const TimeTaggedPhasor& c);

/// Relative magnitude error in percent: 100 * (true - meas) / true. Throws ZeroTruth below 1e-12.
double rme(const TimeTaggedPhasor& truth, const TimeTaggedPhasor& meas);

/// Phase error in degrees: true - meas, wrapped to (-180, 180].
double phase_error(const TimeTaggedPhasor& truth, const TimeTaggedPhasor& meas);

/// Total vector error in percent.
double tve(const TimeTaggedPhasor& truth, const TimeTaggedPhasor& meas);

struct ErrorPoint {
    std::int64_t n = 0;
    double value = 0.0;
};

struct ErrorSeries {
    std::string test_id;
    ErrorChannel channel = ErrorChannel::PE;
    std::vector<ErrorPoint> values;
    std::map<std::string, std::string> meta;

    std::vector<double> samples() const;
    std::size_t size() const { return values.size(); }
};

/// Elementwise rme or phase_error over aligned series; reports flagged invalid
/// on either side are dropped.
ErrorSeries build_error_series(std::span<const TimeTaggedPhasor> truth, std::span<const TimeTaggedPhasor> meas,
                               ErrorChannel channel, std::string test_id = {});

} // namespace synchrocal
