// synchrocal: run simulated characterization campaigns or analyze measured
// error data through the same statistics back end.
//
// Exit codes: 0 success, 2 consistency failure between repeats, 1 any error.

#include "synchrocal/campaign.hpp"
#include "synchrocal/error.hpp"
#include "synchrocal/ingest.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <iostream>
#include <optional>

namespace {

using namespace synchrocal;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconsistent = 2;

struct AnalysisArgs {
    double alpha = 0.05;
    std::size_t gmm_k_max = 6;
    std::uint64_t seed = 0;
    std::string out;
    std::string label;
};

void add_analysis_options(CLI::App& cmd, AnalysisArgs& a)
{
    cmd.add_option("--alpha", a.alpha, "Significance level of the normality tests")->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--gmm-k-max", a.gmm_k_max, "Largest GMM order considered")->check(CLI::PositiveNumber);
    cmd.add_option("--seed", a.seed, "Seed for subsampling and EM restarts");
    cmd.add_option("--out", a.out, "Directory for report artifacts");
    cmd.add_option("--label", a.label, "Test label used in summary.csv");
}

void print_report(const CampaignReport& report)
{
    std::cout << summary_csv(std::span(&report, 1));
    for (const ChannelReport* c : {&report.pe, &report.rme}) {
        if (c->gmm)
            std::cout << "# " << to_string(c->channel) << " GMM k = " << c->gmm->k << '\n';
        for (const auto& note : c->notes)
            std::cout << "# " << to_string(c->channel) << ": " << note << '\n';
    }
    if (report.repeats > 1)
        std::cout << "# consistency: " << (report.consistent ? "pass" : "FAIL") << '\n';
}

CampaignReport finish(const ErrorTable& table, const AnalysisArgs& a, const std::string& default_label,
                      std::string provenance)
{
    CampaignReport report = analyze_errors(table, AnalysisOptions{a.alpha, a.gmm_k_max, a.seed},
                                           a.label.empty() ? default_label : a.label, std::move(provenance));
    if (!a.out.empty())
        emit_report(report, a.out);
    print_report(report);
    return report;
}

// Truth for frame captures: steady nominal signal unless a campaign config
// describes the applied test.
TimeTaggedPhasor frame_truth(const std::optional<CampaignConfig>& truth_cfg, double nominal_rms, std::int64_t n)
{
    if (truth_cfg)
        return true_phasor_at(truth_cfg->spec, n);
    TimeTaggedPhasor t;
    t.n = n;
    t.magnitude = nominal_rms;
    return t;
}

ErrorTable frames_to_errors(const std::vector<DataFrame>& frames, const FrameConfig& cfg,
                            const std::optional<CampaignConfig>& truth_cfg, double nominal_rms)
{
    if (frames.empty())
        throw Error(ErrorCode::EmptySeries, "capture holds no frames");
    const double t0 = frames.front().timestamp(cfg.time_base);
    const double rate = truth_cfg ? truth_cfg->spec.report_rate : cfg.data_rate;

    std::vector<TimeTaggedPhasor> truth, meas;
    for (const DataFrame& f : frames) {
        const auto n = static_cast<std::int64_t>(std::llround((f.timestamp(cfg.time_base) - t0) * rate));
        auto phasor = [&](std::size_t i) {
            TimeTaggedPhasor p;
            p.n = n;
            p.magnitude = f.phasors[i].magnitude;
            p.angle_deg = f.phasors[i].angle_deg;
            return p;
        };
        meas.push_back(cfg.num_phasors >= 3 ? positive_sequence(phasor(0), phasor(1), phasor(2)) : phasor(0));
        truth.push_back(frame_truth(truth_cfg, nominal_rms, n));
    }
    ErrorTable table;
    table.rme = build_error_series(truth, meas, ErrorChannel::RME, "frames");
    table.pe = build_error_series(truth, meas, ErrorChannel::PE, "frames");
    return table;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"PMU random-error characterization campaigns"};
    app.require_subcommand(1);

    // run
    std::string config_path, run_out;
    std::optional<std::uint64_t> run_seed;
    auto* run = app.add_subcommand("run", "Simulate a campaign described by a config file");
    run->add_option("--config", config_path, "Campaign config (key = value)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "Override output_dir");
    run->add_option("--seed", run_seed, "Override seed");

    // ingest
    AnalysisArgs ingest_args;
    std::string csv_path, frames_path, frame_cfg_path, truth_path;
    std::vector<std::string> column_map;
    double nominal_rms = 1.0 / std::sqrt(2.0);
    auto* ingest = app.add_subcommand("ingest", "Analyze calibrator CSV or a data-frame capture");
    auto* csv_opt = ingest->add_option("--csv", csv_path, "Calibrator CSV")->check(CLI::ExistingFile);
    ingest->add_option("--map", column_map, "Column mapping canonical=header")->needs(csv_opt);
    auto* frames_opt = ingest->add_option("--frames", frames_path, "Binary data-frame capture")->check(CLI::ExistingFile);
    auto* fcfg_opt = ingest->add_option("--frame-config", frame_cfg_path, "Frame layout config")->check(CLI::ExistingFile);
    ingest->add_option("--truth", truth_path, "Campaign config describing the applied test signal")
        ->needs(frames_opt)
        ->check(CLI::ExistingFile);
    ingest->add_option("--nominal-rms", nominal_rms, "True RMS magnitude for steady captures")->needs(frames_opt);
    frames_opt->needs(fcfg_opt);
    csv_opt->excludes(frames_opt);
    add_analysis_options(*ingest, ingest_args);

    // stats
    AnalysisArgs stats_args;
    std::string errors_path;
    auto* stats = app.add_subcommand("stats", "Statistics on a prepared error-series CSV");
    stats->add_option("--errors", errors_path, "CSV with n,rel_err_pct,ang_err_deg")->required()->check(CLI::ExistingFile);
    add_analysis_options(*stats, stats_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*run) {
            CampaignConfig cfg = CampaignConfig::load(config_path);
            if (!run_out.empty())
                cfg.output_dir = run_out;
            if (run_seed) {
                cfg.seed = *run_seed;
                cfg.spec.seed = *run_seed;
            }
            const CampaignReport report = run_campaign(cfg);
            print_report(report);
            if (!cfg.output_dir.empty())
                std::cout << "# artifacts written to " << cfg.output_dir << '\n';
            return report.consistent ? kExitOk : kExitInconsistent;
        }
        if (*ingest) {
            if (!csv_path.empty()) {
                const auto records = parse_calibrator_csv(read_text_file(csv_path), parse_column_map(column_map));
                finish(error_table_from_records(records, csv_path), ingest_args, "CSV", "ingest --csv " + csv_path);
                return kExitOk;
            }
            if (!frames_path.empty()) {
                const FrameConfig fcfg = FrameConfig::load(frame_cfg_path);
                const auto frames = decode_frame_stream(read_binary_file(frames_path), fcfg);
                std::optional<CampaignConfig> truth;
                if (!truth_path.empty())
                    truth = CampaignConfig::load(truth_path);
                const std::string label = truth ? test_label(truth->spec.test) : std::string("STEADY");
                finish(frames_to_errors(frames, fcfg, truth, nominal_rms), ingest_args, label,
                       "ingest --frames " + frames_path + " --frame-config " + frame_cfg_path);
                return kExitOk;
            }
            std::cerr << "synchrocal ingest: one of --csv or --frames is required\n";
            return kExitError;
        }
        if (*stats) {
            finish(parse_error_series_csv(read_text_file(errors_path), errors_path), stats_args, "ERRORS",
                   "stats --errors " + errors_path);
            return kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << "synchrocal: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "synchrocal: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
