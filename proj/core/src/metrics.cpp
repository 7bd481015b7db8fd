#include "synchrocal/metrics.hpp"

#include "synchrocal/angle.hpp"
#include "synchrocal/error.hpp"

#include <cmath>
#include <complex>

namespace synchrocal {

namespace {

constexpr double kZeroTruth = 1e-12;

void require_truth(const TimeTaggedPhasor& truth)
{
    if (!(truth.magnitude >= kZeroTruth))
        throw Error(ErrorCode::ZeroTruth, "true magnitude below 1e-12");
}

} // namespace

std::string_view to_string(ErrorChannel c) noexcept
{
    return c == ErrorChannel::RME ? "RME" : "PE";
}

TimeTaggedPhasor positive_sequence(const TimeTaggedPhasor& a, const TimeTaggedPhasor& b, const TimeTaggedPhasor& c)
{
    if (a.n != b.n || a.n != c.n)
        throw Error(ErrorCode::TimestampMismatch, "positive sequence needs phasors from one report");
    const std::complex<double> alpha = std::polar(1.0, kTwoPi / 3.0);
    const std::complex<double> x = (a.as_complex() + alpha * b.as_complex() + alpha * alpha * c.as_complex()) / 3.0;
    TimeTaggedPhasor p = TimeTaggedPhasor::from_complex(a.n, a.t, x);
    p.valid = a.valid && b.valid && c.valid;
    p.degenerate = a.degenerate || b.degenerate || c.degenerate;
    return p;
}

double rme(const TimeTaggedPhasor& truth, const TimeTaggedPhasor& meas)
{
    require_truth(truth);
    return 100.0 * (truth.magnitude - meas.magnitude) / truth.magnitude;
}

double phase_error(const TimeTaggedPhasor& truth, const TimeTaggedPhasor& meas)
{
    return wrap_degrees(wrap_degrees(truth.angle_deg) - wrap_degrees(meas.angle_deg));
}

double tve(const TimeTaggedPhasor& truth, const TimeTaggedPhasor& meas)
{
    require_truth(truth);
    const auto t = truth.as_complex();
    return 100.0 * std::abs(meas.as_complex() - t) / std::abs(t);
}

std::vector<double> ErrorSeries::samples() const
{
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& p : values)
        out.push_back(p.value);
    return out;
}

ErrorSeries build_error_series(std::span<const TimeTaggedPhasor> truth, std::span<const TimeTaggedPhasor> meas,
                               ErrorChannel channel, std::string test_id)
{
    if (truth.size() != meas.size())
        throw Error(ErrorCode::TimestampMismatch, "true and measured series differ in length");
    ErrorSeries out;
    out.test_id = std::move(test_id);
    out.channel = channel;
    out.values.reserve(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i].n != meas[i].n)
            throw Error(ErrorCode::TimestampMismatch, "report index mismatch at position " + std::to_string(i));
        if (i > 0 && truth[i].n <= truth[i - 1].n)
            throw Error(ErrorCode::TimestampMismatch, "report indices must be strictly increasing");
        if (!truth[i].valid || !meas[i].valid)
            continue;
        const double v = channel == ErrorChannel::RME ? rme(truth[i], meas[i]) : phase_error(truth[i], meas[i]);
        out.values.push_back({truth[i].n, v});
    }
    return out;
}

} // namespace synchrocal
