#include "synchrocal/campaign.hpp"
#include "synchrocal/error.hpp"
#include "synchrocal/random.hpp"

#include <algorithm>
#include <future>

namespace synchrocal {

namespace {

constexpr std::uint64_t kRepeatStream = 0x5245'5045'4154ULL;
constexpr std::uint64_t kAnalysisStream = 0x414e'414cULL;

double range_overlap(std::span<const double> a, std::span<const double> b)
{
    const auto [a_lo, a_hi] = std::minmax_element(a.begin(), a.end());
    const auto [b_lo, b_hi] = std::minmax_element(b.begin(), b.end());
    const double lo = std::max(*a_lo, *b_lo);
    const double hi = std::min(*a_hi, *b_hi);
    const double narrow = std::min(*a_hi - *a_lo, *b_hi - *b_lo);
    if (hi < lo)
        return 0.0;
    if (narrow <= 0.0)
        return 1.0; // a point inside the other range
    return std::min(1.0, (hi - lo) / narrow);
}

ErrorSeries concatenate(std::span<const ErrorSeries> runs)
{
    ErrorSeries out;
    if (runs.empty())
        return out;
    out.test_id = runs.front().test_id;
    out.channel = runs.front().channel;
    for (const auto& r : runs)
        out.values.insert(out.values.end(), r.values.begin(), r.values.end());
    return out;
}

template <typename Fn>
void guarded(ChannelReport& report, const char* stage, Fn&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        report.notes.push_back(std::string(stage) + " skipped: " + e.what());
    }
}

} // namespace

std::string test_label(TestType t)
{
    switch (t) {
    case TestType::PM: return "PM";
    case TestType::AM: return "AM";
    case TestType::FrUp: return "FR-U";
    case TestType::FrDown: return "FR-D";
    case TestType::Steady: return "STEADY";
    }
    return "?";
}

ConsistencyResult check_consistency(std::span<const ErrorSeries> runs, const ConsistencyThresholds& thresholds)
{
    if (runs.size() < 2)
        throw Error(ErrorCode::TooFewRuns, "consistency needs at least two runs");
    std::vector<std::vector<double>> samples;
    samples.reserve(runs.size());
    for (const auto& r : runs) {
        if (r.values.empty())
            throw Error(ErrorCode::EmptySeries, "run " + r.test_id + " has no samples");
        samples.push_back(r.samples());
    }

    ConsistencyResult result;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            PairConsistency p;
            p.run_a = i;
            p.run_b = j;
            const TwoSampleKs ks = ks_two_sample(samples[i], samples[j]);
            p.ks_statistic = ks.statistic;
            p.p_value = ks.p_value;
            p.range_overlap = range_overlap(samples[i], samples[j]);
            p.pass = p.p_value >= thresholds.min_p_value && p.range_overlap >= thresholds.min_range_overlap;
            result.pass = result.pass && p.pass;
            result.pairs.push_back(p);
        }
    }
    return result;
}

ChannelReport analyze_channel(const ErrorSeries& series, const AnalysisOptions& options)
{
    ChannelReport report;
    report.channel = series.channel;
    report.n = series.size();
    if (report.n < 2) {
        report.notes.push_back("fewer than 2 samples: statistics omitted");
        return report;
    }

    const std::vector<double> x = series.samples();
    const std::uint64_t seed = derive_seed(options.seed, kAnalysisStream, static_cast<std::uint64_t>(series.channel));
    report.moments = moments(x);
    report.histogram = histogram(x);

    if (report.moments->degenerate()) {
        report.notes.push_back("zero-variance series: normality tests and GMM skipped");
        return report;
    }

    guarded(report, "Shapiro-Wilk", [&] { report.shapiro_wilk = shapiro_wilk(x, options.alpha, seed); });
    guarded(report, "K-S", [&] { report.ks_gaussian = ks_gaussian(x, options.alpha); });

    // Every component needs ten samples.
    const std::size_t k_max = std::min(options.gmm_k_max, x.size() / 10);
    if (k_max < options.gmm_k_max)
        report.notes.push_back("GMM order capped at " + std::to_string(k_max) + " by sample count");
    if (k_max >= 1)
        guarded(report, "GMM", [&] { report.gmm = select_gmm_order(x, k_max, seed); });
    return report;
}

CampaignReport analyze_errors(const ErrorTable& errors, const AnalysisOptions& options, std::string label,
                              std::string provenance)
{
    CampaignReport report;
    report.test_label = std::move(label);
    report.provenance = std::move(provenance);
    report.errors = errors;
    if (errors.rme)
        report.rme = analyze_channel(*errors.rme, options);
    else
        report.rme.notes.push_back("channel not present in input");
    if (errors.pe)
        report.pe = analyze_channel(*errors.pe, options);
    else
        report.pe.notes.push_back("channel not present in input");
    report.rme.channel = ErrorChannel::RME;
    report.pe.channel = ErrorChannel::PE;
    return report;
}

ErrorTable run_repeat(const CampaignConfig& config, std::size_t repeat_index)
{
    TestSignalSpec spec = config.spec;
    spec.duration_s = static_cast<double>(config.reports_per_repeat()) / spec.report_rate;
    spec.seed = derive_seed(config.seed, kRepeatStream, repeat_index);

    // Margins on both sides keep every report window inside the sampled span.
    const auto margin = static_cast<std::int64_t>(config.profile.window_length(spec.sample_rate) / 2 + 1);
    const std::size_t count = spec.sample_count() + 2 * static_cast<std::size_t>(margin);
    const PhaseTriple waves{synthesize_waveform(spec, Phase::A, -margin, count),
                            synthesize_waveform(spec, Phase::B, -margin, count),
                            synthesize_waveform(spec, Phase::C, -margin, count)};
    const PhasorSeriesTriple est = run_estimator(waves, config.profile, spec.report_rate);

    std::vector<TimeTaggedPhasor> pos;
    pos.reserve(est[0].size());
    for (std::size_t i = 0; i < est[0].size(); ++i)
        pos.push_back(positive_sequence(est[0][i], est[1][i], est[2][i]));

    // Reference: positive sequence of the applied three-phase set, formed the
    // same way as the measured one so an exact estimator yields exact zeros.
    std::vector<TimeTaggedPhasor> truth;
    truth.reserve(pos.size());
    for (const TimeTaggedPhasor& m : pos) {
        auto phase_truth = [&](Phase ph) {
            TimeTaggedPhasor p = true_phase_phasor_at_time(spec, ph, m.t);
            p.n = m.n;
            return p;
        };
        truth.push_back(positive_sequence(phase_truth(Phase::A), phase_truth(Phase::B), phase_truth(Phase::C)));
    }
    const std::vector<TimeTaggedPhasor> meas = inject_errors(pos, config.noise, spec.seed);

    const std::string id = test_label(spec.test) + '#' + std::to_string(repeat_index);
    ErrorTable table;
    table.rme = build_error_series(truth, meas, ErrorChannel::RME, id);
    table.pe = build_error_series(truth, meas, ErrorChannel::PE, id);

    // Repeats share one global report numbering.
    const auto offset = static_cast<std::int64_t>(repeat_index * config.reports_per_repeat());
    for (auto* s : {&*table.rme, &*table.pe}) {
        s->meta["repeat"] = std::to_string(repeat_index);
        s->meta["seed"] = std::to_string(spec.seed);
        for (auto& p : s->values)
            p.n += offset;
    }
    return table;
}

CampaignReport run_campaign(const CampaignConfig& config)
{
    config.validate();

    std::vector<std::future<ErrorTable>> jobs;
    jobs.reserve(config.repeats);
    for (std::size_t r = 0; r < config.repeats; ++r)
        jobs.push_back(std::async(std::launch::async, [&config, r] { return run_repeat(config, r); }));

    std::vector<ErrorSeries> rme_runs, pe_runs;
    for (auto& job : jobs) {
        ErrorTable t = job.get();
        rme_runs.push_back(std::move(*t.rme));
        pe_runs.push_back(std::move(*t.pe));
    }

    ErrorTable all;
    all.rme = concatenate(rme_runs);
    all.pe = concatenate(pe_runs);
    const std::string label = test_label(config.spec.test);
    all.rme->test_id = all.pe->test_id = label;

    CampaignReport report =
        analyze_errors(all, AnalysisOptions{config.alpha, config.gmm_k_max, config.seed}, label, config.to_text());
    report.repeats = config.repeats;
    if (config.repeats >= 2) {
        report.consistency_rme = check_consistency(rme_runs, config.consistency);
        report.consistency_pe = check_consistency(pe_runs, config.consistency);
    }
    report.consistent = report.consistency_rme.pass && report.consistency_pe.pass;

    if (!config.output_dir.empty())
        emit_report(report, config.output_dir);
    return report;
}

} // namespace synchrocal
