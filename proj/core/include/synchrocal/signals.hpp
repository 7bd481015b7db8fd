#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace synchrocal {

enum class PmuClass { P, M };
enum class TestType { AM, PM, FrUp, FrDown, Steady };
enum class Phase { A, B, C };

std::string_view to_string(PmuClass c) noexcept;
std::string_view to_string(TestType t) noexcept;
std::string_view to_string(Phase p) noexcept;

/// Full parameterization of one dynamic test. Amplitudes are per-unit peak,
/// modulation depth k_a is in radians, ramp rate r_f in Hz/s.
struct TestSignalSpec {
    PmuClass pmu_class = PmuClass::P;
    TestType test = TestType::Steady;
    double x_m = 1.0;
    double f0 = 60.0;
    double k_x = 0.0;
    double k_a = 0.0;
    double f_mod = 0.0;
    double r_f = 0.0;
    double duration_s = 1.0;
    double report_rate = 30.0;
    double sample_rate = 960.0;
    std::uint64_t seed = 0;

    /// Spec with the default modulation settings for `test`:
    /// k_x = 0.1 (AM), k_a = 0.1 rad (PM), f_mod = 0.1 Hz, r_f = +/-0.03 Hz/s.
    static TestSignalSpec for_test(TestType test, PmuClass cls = PmuClass::P, double duration_s = 1.0);

    /// Throws Error(InvalidSpec) when an invariant is violated.
    void validate() const;

    std::size_t report_count() const;
    std::size_t sample_count() const;
    std::size_t samples_per_report() const;
    double report_interval() const { return 1.0 / report_rate; }

    bool operator==(const TestSignalSpec&) const = default;
};

/// One reporting-instant phasor: RMS magnitude, angle in degrees wrapped to (-180, 180].
struct TimeTaggedPhasor {
    std::int64_t n = 0;
    double t = 0.0;
    double magnitude = 0.0;
    double angle_deg = 0.0;
    bool valid = true;
    bool degenerate = false;

    std::complex<double> as_complex() const;
    static TimeTaggedPhasor from_complex(std::int64_t n, double t, std::complex<double> value);
};

/// Sampled waveform. samples[i] sits at t = (first_index + i) / sample_rate.
struct Waveform {
    std::vector<double> samples;
    double sample_rate = 0.0;
    std::int64_t first_index = 0;
    Phase phase = Phase::A;
    TestSignalSpec spec;

    double time_at(std::size_t i) const { return static_cast<double>(first_index + static_cast<std::int64_t>(i)) / sample_rate; }
};

/// Closed-form instantaneous value of one phase at time t (seconds).
double instantaneous_value(const TestSignalSpec& spec, Phase phase, double t);

/// RMS complex envelope X(t) of one phase such that x(t) = Re{sqrt(2) X(t) e^{j w0 t}}.
std::complex<double> analytic_envelope(const TestSignalSpec& spec, Phase phase, double t);

/// Samples 0 .. duration_s * sample_rate - 1 of one phase.
Waveform synthesize_waveform(const TestSignalSpec& spec, Phase phase);

/// Samples first_index .. first_index + count - 1 (first_index may be negative),
/// used to give estimator windows room around the first and last report.
Waveform synthesize_waveform(const TestSignalSpec& spec, Phase phase, std::int64_t first_index, std::size_t count);

/// Ground-truth positive-sequence phasor at report index n.
TimeTaggedPhasor true_phasor_at(const TestSignalSpec& spec, std::int64_t n);

/// Ground-truth phasor of a single phase at arbitrary time t.
TimeTaggedPhasor true_phase_phasor_at_time(const TestSignalSpec& spec, Phase phase, double t);

std::vector<TimeTaggedPhasor> true_phasor_series(const TestSignalSpec& spec);

} // namespace synchrocal
