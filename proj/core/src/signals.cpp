#include "synchrocal/signals.hpp"

#include "synchrocal/angle.hpp"
#include "synchrocal/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace synchrocal {

namespace {

constexpr double kIntegerTolerance = 1e-9;

bool is_integral(double v)
{
    return std::abs(v - std::round(v)) <= kIntegerTolerance * std::max(1.0, std::abs(v));
}

double phase_offset(Phase phase)
{
    switch (phase) {
    case Phase::A: return 0.0;
    case Phase::B: return -kTwoPi / 3.0;
    case Phase::C: return kTwoPi / 3.0;
    }
    return 0.0;
}

// Carrier angle w0*t reduced to [0, 2pi) before scaling so long records keep precision.
double carrier_angle(double f0, double t)
{
    return kTwoPi * std::fmod(f0 * t, 1.0);
}

double modulation_angle(const TestSignalSpec& spec, double t)
{
    const double wt = kTwoPi * spec.f_mod * t;
    return spec.k_a * std::cos(wt - std::numbers::pi) + std::numbers::pi * spec.r_f * t * t;
}

double amplitude_factor(const TestSignalSpec& spec, double t)
{
    return 1.0 + spec.k_x * std::cos(kTwoPi * spec.f_mod * t);
}

[[noreturn]] void invalid(const std::string& what)
{
    throw Error(ErrorCode::InvalidSpec, what);
}

} // namespace

std::string_view to_string(PmuClass c) noexcept
{
    return c == PmuClass::P ? "P" : "M";
}

std::string_view to_string(TestType t) noexcept
{
    switch (t) {
    case TestType::AM: return "AM";
    case TestType::PM: return "PM";
    case TestType::FrUp: return "FR_UP";
    case TestType::FrDown: return "FR_DOWN";
    case TestType::Steady: return "STEADY";
    }
    return "?";
}

std::string_view to_string(Phase p) noexcept
{
    switch (p) {
    case Phase::A: return "A";
    case Phase::B: return "B";
    case Phase::C: return "C";
    }
    return "?";
}

TestSignalSpec TestSignalSpec::for_test(TestType test, PmuClass cls, double duration_s)
{
    TestSignalSpec s;
    s.pmu_class = cls;
    s.test = test;
    s.duration_s = duration_s;
    switch (test) {
    case TestType::AM:
        s.k_x = 0.1;
        s.f_mod = 0.1;
        break;
    case TestType::PM:
        s.k_a = 0.1;
        s.f_mod = 0.1;
        break;
    case TestType::FrUp: s.r_f = 0.03; break;
    case TestType::FrDown: s.r_f = -0.03; break;
    case TestType::Steady: break;
    }
    return s;
}

void TestSignalSpec::validate() const
{
    for (double v : {x_m, f0, k_x, k_a, f_mod, r_f, duration_s, report_rate, sample_rate})
        if (!std::isfinite(v))
            invalid("non-finite parameter");
    if (x_m <= 0.0)
        invalid("x_m must be positive");
    if (f0 <= 0.0)
        invalid("f0 must be positive");
    if (report_rate <= 0.0 || duration_s <= 0.0)
        invalid("report_rate and duration_s must be positive");
    if (sample_rate < 8.0 * f0)
        invalid("sample_rate must be at least 8 * f0");
    if (!is_integral(sample_rate / report_rate))
        invalid("report_rate must divide sample_rate");
    if (!is_integral(duration_s * report_rate))
        invalid("duration_s * report_rate must be a whole number of reports");
    if (k_x < 0.0 || k_x > 1.0 || k_a < 0.0 || f_mod < 0.0)
        invalid("modulation parameters out of range");

    switch (test) {
    case TestType::AM:
        if (!(k_x > 0.0) || k_a != 0.0 || r_f != 0.0 || !(f_mod > 0.0))
            invalid("AM test requires k_x > 0, f_mod > 0, k_a = 0, r_f = 0");
        break;
    case TestType::PM:
        if (!(k_a > 0.0) || k_x != 0.0 || r_f != 0.0 || !(f_mod > 0.0))
            invalid("PM test requires k_a > 0, f_mod > 0, k_x = 0, r_f = 0");
        break;
    case TestType::FrUp:
        if (k_x != 0.0 || k_a != 0.0 || !(r_f > 0.0))
            invalid("FR_UP test requires r_f > 0 and no modulation");
        break;
    case TestType::FrDown:
        if (k_x != 0.0 || k_a != 0.0 || !(r_f < 0.0))
            invalid("FR_DOWN test requires r_f < 0 and no modulation");
        break;
    case TestType::Steady:
        if (k_x != 0.0 || k_a != 0.0 || r_f != 0.0)
            invalid("STEADY test requires k_x = k_a = r_f = 0");
        break;
    }
}

std::size_t TestSignalSpec::report_count() const
{
    return static_cast<std::size_t>(std::llround(duration_s * report_rate));
}

std::size_t TestSignalSpec::sample_count() const
{
    return static_cast<std::size_t>(std::llround(duration_s * sample_rate));
}

std::size_t TestSignalSpec::samples_per_report() const
{
    return static_cast<std::size_t>(std::llround(sample_rate / report_rate));
}

std::complex<double> TimeTaggedPhasor::as_complex() const
{
    return std::polar(magnitude, deg_to_rad(angle_deg));
}

TimeTaggedPhasor TimeTaggedPhasor::from_complex(std::int64_t n, double t, std::complex<double> value)
{
    TimeTaggedPhasor p;
    p.n = n;
    p.t = t;
    p.magnitude = std::abs(value);
    p.angle_deg = p.magnitude > 0.0 ? wrap_degrees(rad_to_deg(std::arg(value))) : 0.0;
    return p;
}

double instantaneous_value(const TestSignalSpec& spec, Phase phase, double t)
{
    return spec.x_m * amplitude_factor(spec, t) *
           std::cos(carrier_angle(spec.f0, t) + phase_offset(phase) + modulation_angle(spec, t));
}

std::complex<double> analytic_envelope(const TestSignalSpec& spec, Phase phase, double t)
{
    const double mag = spec.x_m / std::numbers::sqrt2 * amplitude_factor(spec, t);
    return std::polar(mag, phase_offset(phase) + modulation_angle(spec, t));
}

Waveform synthesize_waveform(const TestSignalSpec& spec, Phase phase)
{
    return synthesize_waveform(spec, phase, 0, spec.sample_count());
}

Waveform synthesize_waveform(const TestSignalSpec& spec, Phase phase, std::int64_t first_index, std::size_t count)
{
    spec.validate();
    Waveform wf;
    wf.sample_rate = spec.sample_rate;
    wf.first_index = first_index;
    wf.phase = phase;
    wf.spec = spec;
    wf.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        wf.samples[i] = instantaneous_value(spec, phase, wf.time_at(i));
    return wf;
}

TimeTaggedPhasor true_phase_phasor_at_time(const TestSignalSpec& spec, Phase phase, double t)
{
    const double mag = spec.x_m / std::numbers::sqrt2 * amplitude_factor(spec, t);
    TimeTaggedPhasor p;
    p.t = t;
    p.magnitude = mag;
    p.angle_deg = wrap_degrees(rad_to_deg(phase_offset(phase) + modulation_angle(spec, t)));
    return p;
}

TimeTaggedPhasor true_phasor_at(const TestSignalSpec& spec, std::int64_t n)
{
    if (n < 0 || static_cast<std::size_t>(n) >= spec.report_count())
        throw Error(ErrorCode::IndexOutOfRange, "report index " + std::to_string(n) + " outside test duration");
    const double t = static_cast<double>(n) / spec.report_rate;
    TimeTaggedPhasor p = true_phase_phasor_at_time(spec, Phase::A, t);
    p.n = n;
    return p;
}

std::vector<TimeTaggedPhasor> true_phasor_series(const TestSignalSpec& spec)
{
    spec.validate();
    const std::size_t count = spec.report_count();
    std::vector<TimeTaggedPhasor> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n)
        out.push_back(true_phasor_at(spec, static_cast<std::int64_t>(n)));
    return out;
}

} // namespace synchrocal
