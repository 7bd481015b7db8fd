#pragma once

#include "synchrocal/signals.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace synchrocal {

enum class ProfileClass { P, M, Ideal };
enum class WindowShape { Rectangular, Triangular, Hann };

std::string_view to_string(ProfileClass c) noexcept;
std::string_view to_string(WindowShape w) noexcept;

/// Reference device-under-test filter. P-class: short triangular window,
/// M-class: long Hann window, Ideal: returns the analytic truth.
struct EstimatorProfile {
    ProfileClass pmu_class = ProfileClass::P;
    double window_cycles = 2.0;
    WindowShape window_shape = WindowShape::Triangular;
    double reference_frequency = 60.0;

    static EstimatorProfile for_class(ProfileClass cls, double f0 = 60.0);

    /// Span of the window in samples (even). The window itself holds span + 1
    /// samples centred on the report instant; both end weights are halved or zero.
    std::size_t window_span(double sample_rate) const;
    std::size_t window_length(double sample_rate) const { return window_span(sample_rate) + 1; }

    void validate(double sample_rate) const;

    bool operator==(const EstimatorProfile&) const = default;
};

/// Window weights for `span + 1` samples, symmetric about the centre.
std::vector<double> window_weights(WindowShape shape, std::size_t span);

/// Contiguous run of samples handed to the estimator. `first_index` is the
/// absolute sample number of samples[0]; `spec` is needed only by Ideal profiles.
struct SampleWindow {
    std::span<const double> samples;
    double sample_rate = 0.0;
    std::int64_t first_index = 0;
    Phase phase = Phase::A;
    const TestSignalSpec* spec = nullptr;
};

/// Single-bin weighted Fourier correlation at the reference frequency. The
/// angle is referenced to cos(2 pi f_ref t) with t absolute, so a nominal
/// cosine reads 0 degrees at every report. Throws WindowSizeMismatch when the
/// window length or centring does not match the profile.
TimeTaggedPhasor estimate_phasor(const SampleWindow& window, const EstimatorProfile& profile, double t_tag,
                                 std::int64_t n = 0);

using PhaseTriple = std::array<Waveform, 3>;
using PhasorSeriesTriple = std::array<std::vector<TimeTaggedPhasor>, 3>;

/// One estimate per report index 0 .. spec.report_count() - 1 per phase.
/// Reports whose window leaves the sampled span come back with valid = false.
PhasorSeriesTriple run_estimator(const PhaseTriple& waveforms, const EstimatorProfile& profile, double report_rate);

} // namespace synchrocal
