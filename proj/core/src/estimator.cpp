#include "synchrocal/estimator.hpp"

#include "synchrocal/angle.hpp"
#include "synchrocal/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace synchrocal {

std::string_view to_string(ProfileClass c) noexcept
{
    switch (c) {
    case ProfileClass::P: return "P";
    case ProfileClass::M: return "M";
    case ProfileClass::Ideal: return "IDEAL";
    }
    return "?";
}

std::string_view to_string(WindowShape w) noexcept
{
    switch (w) {
    case WindowShape::Rectangular: return "RECTANGULAR";
    case WindowShape::Triangular: return "TRIANGULAR";
    case WindowShape::Hann: return "HANN";
    }
    return "?";
}

EstimatorProfile EstimatorProfile::for_class(ProfileClass cls, double f0)
{
    EstimatorProfile p;
    p.pmu_class = cls;
    p.reference_frequency = f0;
    switch (cls) {
    case ProfileClass::P:
        p.window_cycles = 2.0;
        p.window_shape = WindowShape::Triangular;
        break;
    case ProfileClass::M:
        p.window_cycles = 6.0;
        p.window_shape = WindowShape::Hann;
        break;
    case ProfileClass::Ideal:
        p.window_cycles = 0.0;
        p.window_shape = WindowShape::Rectangular;
        break;
    }
    return p;
}

std::size_t EstimatorProfile::window_span(double sample_rate) const
{
    if (pmu_class == ProfileClass::Ideal)
        return 0;
    return static_cast<std::size_t>(std::llround(window_cycles * sample_rate / reference_frequency));
}

void EstimatorProfile::validate(double sample_rate) const
{
    if (pmu_class == ProfileClass::Ideal)
        return;
    if (!(reference_frequency > 0.0) || !(window_cycles > 0.0) || !(sample_rate > 0.0))
        throw Error(ErrorCode::InvalidProfile, "window_cycles, reference_frequency and sample_rate must be positive");
    const double span = window_cycles * sample_rate / reference_frequency;
    if (std::abs(span - std::round(span)) > 1e-9 * span)
        throw Error(ErrorCode::InvalidProfile, "window must cover an integer number of samples");
    const auto s = static_cast<std::size_t>(std::llround(span));
    if (s < 2 || s % 2 != 0)
        throw Error(ErrorCode::InvalidProfile, "window span must be an even number of samples");
}

std::vector<double> window_weights(WindowShape shape, std::size_t span)
{
    std::vector<double> w(span + 1);
    const double half = static_cast<double>(span) / 2.0;
    for (std::size_t i = 0; i <= span; ++i) {
        const double k = static_cast<double>(i) - half;
        switch (shape) {
        case WindowShape::Rectangular: w[i] = (i == 0 || i == span) ? 0.5 : 1.0; break;
        case WindowShape::Triangular: w[i] = 1.0 - std::abs(k) / half; break;
        case WindowShape::Hann: w[i] = 0.5 * (1.0 + std::cos(std::numbers::pi * k / half)); break;
        }
    }
    return w;
}

TimeTaggedPhasor estimate_phasor(const SampleWindow& window, const EstimatorProfile& profile, double t_tag, std::int64_t n)
{
    if (profile.pmu_class == ProfileClass::Ideal) {
        if (window.spec == nullptr)
            throw Error(ErrorCode::InvalidProfile, "IDEAL profile needs the generating spec");
        TimeTaggedPhasor p = true_phase_phasor_at_time(*window.spec, window.phase, t_tag);
        p.n = n;
        return p;
    }

    profile.validate(window.sample_rate);
    const std::size_t span = profile.window_span(window.sample_rate);
    if (window.samples.size() != span + 1)
        throw Error(ErrorCode::WindowSizeMismatch, "window holds " + std::to_string(window.samples.size()) +
                                                       " samples, profile needs " + std::to_string(span + 1));
    const double centre = static_cast<double>(window.first_index) + static_cast<double>(span / 2);
    if (std::abs(centre - t_tag * window.sample_rate) > 1e-6)
        throw Error(ErrorCode::WindowSizeMismatch, "window is not centred on the report time tag");

    const std::vector<double> w = window_weights(profile.window_shape, span);
    const double cycles_per_sample = profile.reference_frequency / window.sample_rate;
    std::complex<double> acc{0.0, 0.0};
    double wsum = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i <= span; ++i) {
        const auto idx = static_cast<double>(window.first_index + static_cast<std::int64_t>(i));
        const double theta = kTwoPi * std::fmod(cycles_per_sample * idx, 1.0);
        acc += w[i] * window.samples[i] * std::complex<double>(std::cos(theta), -std::sin(theta));
        wsum += w[i];
        peak = std::max(peak, std::abs(window.samples[i]));
    }
    const std::complex<double> x = acc * (std::numbers::sqrt2 / wsum);

    TimeTaggedPhasor p = TimeTaggedPhasor::from_complex(n, t_tag, x);
    if (peak == 0.0 || p.magnitude <= 1e-12 * peak) {
        p.magnitude = 0.0;
        p.angle_deg = 0.0;
        p.degenerate = true;
    }
    return p;
}

PhasorSeriesTriple run_estimator(const PhaseTriple& waveforms, const EstimatorProfile& profile, double report_rate)
{
    const Waveform& ref = waveforms[0];
    for (const Waveform& wf : waveforms) {
        if (wf.sample_rate != ref.sample_rate || wf.first_index != ref.first_index ||
            wf.samples.size() != ref.samples.size())
            throw Error(ErrorCode::RateMismatch, "phases disagree on sample rate or span");
    }
    if (!(report_rate > 0.0))
        throw Error(ErrorCode::RateMismatch, "report rate must be positive");
    const double ratio = ref.sample_rate / report_rate;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw Error(ErrorCode::RateMismatch, "report instants do not align to samples");
    const auto samples_per_report = static_cast<std::int64_t>(std::llround(ratio));

    TestSignalSpec spec = ref.spec;
    spec.report_rate = report_rate;
    const std::size_t count = spec.report_count();
    const bool ideal = profile.pmu_class == ProfileClass::Ideal;
    const auto span = static_cast<std::int64_t>(profile.window_span(ref.sample_rate));
    if (!ideal)
        profile.validate(ref.sample_rate);

    const auto data_begin = ref.first_index;
    const auto data_end = ref.first_index + static_cast<std::int64_t>(ref.samples.size());

    PhasorSeriesTriple out;
    for (std::size_t ph = 0; ph < 3; ++ph) {
        const Waveform& wf = waveforms[ph];
        auto& series = out[ph];
        series.reserve(count);
        for (std::size_t k = 0; k < count; ++k) {
            const auto n = static_cast<std::int64_t>(k);
            const double t = static_cast<double>(n) / report_rate;
            const std::int64_t first = n * samples_per_report - span / 2;
            const std::int64_t last = first + span;
            if (!ideal && (first < data_begin || last >= data_end)) {
                TimeTaggedPhasor edge;
                edge.n = n;
                edge.t = t;
                edge.valid = false;
                series.push_back(edge);
                continue;
            }
            SampleWindow window;
            window.sample_rate = wf.sample_rate;
            window.phase = wf.phase;
            window.spec = &wf.spec;
            window.first_index = first;
            if (!ideal)
                window.samples = std::span<const double>(wf.samples).subspan(
                    static_cast<std::size_t>(first - data_begin), static_cast<std::size_t>(span + 1));
            series.push_back(estimate_phasor(window, profile, t, n));
        }
    }
    return out;
}

} // namespace synchrocal
