#include "oracles.hpp"

#include "synchrocal/angle.hpp"
#include "synchrocal/error.hpp"
#include "synchrocal/estimator.hpp"
#include "synchrocal/metrics.hpp"
#include "synchrocal/noise.hpp"
#include "synchrocal/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace synchrocal;

namespace {

struct Centred {
    Waveform wf;
    SampleWindow window;
};

// Window of `profile` centred on report n of `spec`, cut from a waveform with margins.
Centred centred_window(const TestSignalSpec& spec, const EstimatorProfile& profile, std::int64_t n)
{
    const std::size_t span = profile.window_span(spec.sample_rate);
    const auto centre = n * static_cast<std::int64_t>(spec.samples_per_report());
    Centred c{synthesize_waveform(spec, Phase::A, centre - static_cast<std::int64_t>(span / 2), span + 1), {}};
    c.window.samples = c.wf.samples;
    c.window.sample_rate = spec.sample_rate;
    c.window.first_index = c.wf.first_index;
    c.window.spec = &spec;
    return c;
}

PhaseTriple three_phase(const TestSignalSpec& spec)
{
    return {synthesize_waveform(spec, Phase::A), synthesize_waveform(spec, Phase::B),
            synthesize_waveform(spec, Phase::C)};
}

} // namespace

TEST(Estimator, SteadyNominalIsExactForEveryClass)
{
    const auto spec = TestSignalSpec::for_test(TestType::Steady, PmuClass::P, 1.0);
    for (ProfileClass cls : {ProfileClass::P, ProfileClass::M, ProfileClass::Ideal}) {
        const auto profile = EstimatorProfile::for_class(cls);
        for (std::int64_t n : {3, 10, 25}) {
            auto c = centred_window(spec, profile, n);
            const auto p = estimate_phasor(c.window, profile, static_cast<double>(n) / spec.report_rate, n);
            EXPECT_NEAR(p.magnitude, 1.0 / std::sqrt(2.0), 1e-9) << to_string(cls);
            EXPECT_NEAR(p.angle_deg, 0.0, 1e-9) << to_string(cls);
            EXPECT_EQ(p.n, n);
        }
    }
}

TEST(Estimator, ZeroSignalIsDegenerate)
{
    const auto profile = EstimatorProfile::for_class(ProfileClass::P);
    std::vector<double> zeros(33, 0.0);
    SampleWindow w{zeros, 960.0, -16, Phase::A, nullptr};
    const auto p = estimate_phasor(w, profile, 0.0);
    EXPECT_TRUE(p.degenerate);
    EXPECT_EQ(p.magnitude, 0.0);
    EXPECT_EQ(p.angle_deg, 0.0);
}

TEST(Estimator, OffNominalMatchesDirectSum)
{
    auto spec = TestSignalSpec::for_test(TestType::Steady, PmuClass::P, 1.0);
    spec.f0 = 60.5;
    const auto profile = EstimatorProfile::for_class(ProfileClass::P, 60.0);
    for (std::int64_t n : {2, 7, 19}) {
        auto c = centred_window(spec, profile, n);
        const auto w = window_weights(profile.window_shape, profile.window_span(spec.sample_rate));
        const auto ref = oracle::windowed_correlation(c.window.samples, w, c.window.first_index, spec.sample_rate, 60.0);
        const auto got = estimate_phasor(c.window, profile, static_cast<double>(n) / spec.report_rate, n);
        EXPECT_NEAR(got.magnitude, std::abs(ref), 1e-12);
        EXPECT_NEAR(got.angle_deg, rad_to_deg(std::arg(ref)), 1e-10);
        // Off-nominal input must actually move the estimate.
        EXPECT_GT(std::abs(got.angle_deg), 1e-3);
    }
}

TEST(Estimator, LinearInAmplitude)
{
    auto spec = TestSignalSpec::for_test(TestType::PM, PmuClass::M, 1.0);
    const auto profile = EstimatorProfile::for_class(ProfileClass::M);
    auto base = centred_window(spec, profile, 15);
    const auto p1 = estimate_phasor(base.window, profile, 0.5, 15);
    spec.x_m = 3.7;
    auto scaled = centred_window(spec, profile, 15);
    const auto p2 = estimate_phasor(scaled.window, profile, 0.5, 15);
    EXPECT_NEAR(p2.magnitude, 3.7 * p1.magnitude, 1e-12);
}

TEST(Estimator, WindowGuards)
{
    const auto spec = TestSignalSpec::for_test(TestType::Steady);
    const auto profile = EstimatorProfile::for_class(ProfileClass::P);
    auto c = centred_window(spec, profile, 5);
    auto short_window = c.window;
    short_window.samples = short_window.samples.subspan(1);
    EXPECT_THROW(estimate_phasor(short_window, profile, 5.0 / 30.0), Error);
    try {
        estimate_phasor(c.window, profile, 6.0 / 30.0);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::WindowSizeMismatch);
    }

    auto odd = profile;
    odd.window_cycles = 2.0 + 1.0 / 16.0;
    try {
        odd.validate(960.0);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidProfile);
    }
}

TEST(Estimator, WindowWeightsIntegrateExactly)
{
    // Every shape is symmetric and its weights sum to span / 2 (rectangle: span).
    for (std::size_t span : {32u, 96u}) {
        const auto tri = window_weights(WindowShape::Triangular, span);
        const auto hann = window_weights(WindowShape::Hann, span);
        const auto rect = window_weights(WindowShape::Rectangular, span);
        double st = 0, sh = 0, sr = 0;
        for (std::size_t i = 0; i <= span; ++i) {
            EXPECT_NEAR(tri[i], tri[span - i], 1e-15);
            EXPECT_NEAR(hann[i], hann[span - i], 1e-15);
            st += tri[i];
            sh += hann[i];
            sr += rect[i];
        }
        EXPECT_NEAR(st, span / 2.0, 1e-12);
        EXPECT_NEAR(sh, span / 2.0, 1e-12);
        EXPECT_NEAR(sr, static_cast<double>(span), 1e-12);
    }
}

TEST(Estimator, RunFlagsEdgesAndCountsReports)
{
    const auto spec = TestSignalSpec::for_test(TestType::PM, PmuClass::P, 2.0);
    const auto out = run_estimator(three_phase(spec), EstimatorProfile::for_class(ProfileClass::P), 30.0);
    ASSERT_EQ(out[0].size(), 60u);
    EXPECT_FALSE(out[0].front().valid);
    EXPECT_TRUE(out[0][1].valid);
    EXPECT_TRUE(out[0].back().valid);

    const auto m = run_estimator(three_phase(spec), EstimatorProfile::for_class(ProfileClass::M), 30.0);
    std::size_t invalid = 0;
    for (const auto& p : m[1])
        invalid += !p.valid;
    // Half a six-cycle window is 48 samples: reports 0 and 1 start too early, 59 ends too late.
    EXPECT_EQ(invalid, 3u);
}

TEST(Estimator, IdealEqualsTruthAndIgnoresSampleRate)
{
    auto spec = TestSignalSpec::for_test(TestType::FrUp, PmuClass::P, 5.0);
    const auto truth = true_phasor_series(spec);
    const auto ideal = EstimatorProfile::for_class(ProfileClass::Ideal);
    const auto a = run_estimator(three_phase(spec), ideal, 30.0);
    spec.sample_rate = 1920.0;
    const auto b = run_estimator(three_phase(spec), ideal, 30.0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        EXPECT_EQ(a[0][i].magnitude, truth[i].magnitude);
        EXPECT_EQ(a[0][i].angle_deg, truth[i].angle_deg);
        EXPECT_EQ(b[0][i].angle_deg, a[0][i].angle_deg);
        EXPECT_TRUE(a[0][i].valid);
    }
}

TEST(Estimator, RateMismatch)
{
    const auto spec = TestSignalSpec::for_test(TestType::Steady);
    auto phases = three_phase(spec);
    phases[2].sample_rate = 1000.0;
    EXPECT_THROW(run_estimator(phases, EstimatorProfile::for_class(ProfileClass::P), 30.0), Error);
    EXPECT_THROW(run_estimator(three_phase(spec), EstimatorProfile::for_class(ProfileClass::P), 7.0), Error);
}

// ---------------------------------------------------------------- noise

namespace {

std::vector<TimeTaggedPhasor> steady_truth(std::size_t n)
{
    return true_phasor_series(TestSignalSpec::for_test(TestType::Steady, PmuClass::P, static_cast<double>(n) / 30.0));
}

} // namespace

TEST(Noise, NoneIsIdentity)
{
    const auto truth = true_phasor_series(TestSignalSpec::for_test(TestType::PM, PmuClass::P, 10.0));
    const auto out = inject_errors(truth, NoiseModel::none(), 5);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        EXPECT_EQ(out[i].magnitude, truth[i].magnitude);
        EXPECT_EQ(out[i].angle_deg, truth[i].angle_deg);
    }
}

TEST(Noise, BiasShiftsEveryAngle)
{
    const auto truth = steady_truth(300);
    const auto out = inject_errors(truth, NoiseModel::bias(0.0, 0.36), 1);
    const auto pe = build_error_series(truth, out, ErrorChannel::PE);
    for (const auto& p : pe.values)
        EXPECT_NEAR(p.value, 0.36, 1e-12);
}

TEST(Noise, SameSeedIsBitIdentical)
{
    const auto truth = steady_truth(1000);
    const auto model = NoiseModel::composite(
        {NoiseModel::gaussian(1e-4, 0.01), NoiseModel::gmm({}, {{0.5, -0.1, 0.01}, {0.5, 0.1, 0.01}})});
    const auto a = inject_errors(truth, model, 99), b = inject_errors(truth, model, 99), c = inject_errors(truth, model, 98);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].magnitude, b[i].magnitude);
        EXPECT_EQ(a[i].angle_deg, b[i].angle_deg);
        differs = differs || a[i].angle_deg != c[i].angle_deg;
    }
    EXPECT_TRUE(differs);
}

TEST(Noise, DrawDependsOnlyOnIndex)
{
    const auto model = NoiseModel::gaussian(1e-3, 0.1);
    const auto truth = steady_truth(100);
    const auto full = inject_errors(truth, model, 3);
    const auto tail = inject_errors(std::span(truth).subspan(50), model, 3);
    for (std::size_t i = 0; i < tail.size(); ++i)
        EXPECT_EQ(tail[i].angle_deg, full[50 + i].angle_deg);
}

TEST(Noise, GaussianStdWithinFivePercent)
{
    const auto truth = steady_truth(18000);
    const auto pe = build_error_series(truth, inject_errors(truth, NoiseModel::gaussian(0.0, 0.008), 21), ErrorChannel::PE);
    EXPECT_NEAR(moments(pe.samples()).std_dev, 0.008, 0.05 * 0.008);
}

TEST(Noise, MagnitudeConvention)
{
    const auto truth = steady_truth(10);
    const auto out = inject_errors(truth, NoiseModel::bias(0.01, 0.0), 0);
    const auto r = build_error_series(truth, out, ErrorChannel::RME);
    for (const auto& p : r.values)
        EXPECT_NEAR(p.value, 1.0, 1e-12);
}

TEST(Noise, QuantizeIsDiscrete)
{
    const double q = 0.004;
    const auto truth = steady_truth(6000);
    const auto model = NoiseModel::composite({NoiseModel::gaussian(0.0, 0.01), NoiseModel::quantize(0.0, q)});
    const auto pe = build_error_series(truth, inject_errors(truth, model, 4), ErrorChannel::PE);
    std::set<long long> levels;
    double lo = 1e300, hi = -1e300;
    for (const auto& p : pe.values) {
        const double m = p.value / q;
        EXPECT_NEAR(m, std::round(m), 1e-6);
        levels.insert(std::llround(m));
        lo = std::min(lo, p.value);
        hi = std::max(hi, p.value);
    }
    EXPECT_LE(levels.size(), static_cast<std::size_t>(std::ceil((hi - lo) / q)) + 1);
    EXPECT_GT(levels.size(), 3u);
}

TEST(Noise, ModelValidation)
{
    auto code_of = [](const NoiseModel& m) {
        try {
            m.validate();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoFailure;
    };
    EXPECT_EQ(code_of(NoiseModel::gmm({}, {{0.5, 0, 1}, {0.6, 1, 1}})), ErrorCode::InvalidModel);
    EXPECT_EQ(code_of(NoiseModel::gmm({}, {{1.0, 0, -1}})), ErrorCode::InvalidModel);
    EXPECT_EQ(code_of(NoiseModel::gaussian(-1, 0)), ErrorCode::InvalidModel);
    EXPECT_EQ(code_of(NoiseModel::quantize(0, 0)), ErrorCode::InvalidModel);
    EXPECT_EQ(code_of(NoiseModel::composite({NoiseModel::quantize(0, 0)})), ErrorCode::InvalidModel);
    EXPECT_NO_THROW(NoiseModel::gmm({}, {{0.3, 0, 1}, {0.7, 1, 1}}).validate());
}
