#pragma once

#include "synchrocal/estimator.hpp"
#include "synchrocal/ingest.hpp"
#include "synchrocal/metrics.hpp"
#include "synchrocal/noise.hpp"
#include "synchrocal/signals.hpp"
#include "synchrocal/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace synchrocal {

struct ConsistencyThresholds {
    double min_p_value = 0.001;
    double min_range_overlap = 0.8;

    bool operator==(const ConsistencyThresholds&) const = default;
};

struct CampaignConfig {
    TestSignalSpec spec;
    EstimatorProfile profile;
    NoiseModel noise;
    std::size_t repeats = 3;
    std::size_t target_samples = 18'000;
    double alpha = 0.05;
    std::size_t gmm_k_max = 6;
    std::string output_dir;
    std::uint64_t seed = 0;
    ConsistencyThresholds consistency;

    /// Throws InvalidConfig (or the nested InvalidSpec / InvalidProfile / InvalidModel).
    void validate() const;
    std::size_t reports_per_repeat() const { return target_samples / repeats; }

    /// Key-value text covering every field; from_text(to_text(c)) == c.
    std::string to_text() const;
    static CampaignConfig from_text(std::string_view text);
    static CampaignConfig load(const std::filesystem::path& path);

    bool operator==(const CampaignConfig&) const = default;
};

// ---------------------------------------------------------------- consistency

struct PairConsistency {
    std::size_t run_a = 0;
    std::size_t run_b = 0;
    double ks_statistic = 0.0;
    double p_value = 1.0;
    double range_overlap = 1.0;
    bool pass = true;
};

struct ConsistencyResult {
    std::vector<PairConsistency> pairs;
    bool pass = true;
};

/// Pairwise two-sample K-S between runs. A pair passes when p >= min_p_value
/// and the overlap of the value ranges, relative to the narrower range, is at
/// least min_range_overlap. Throws TooFewRuns for fewer than two runs.
ConsistencyResult check_consistency(std::span<const ErrorSeries> runs, const ConsistencyThresholds& thresholds = {});

// ---------------------------------------------------------------- analysis

struct AnalysisOptions {
    double alpha = 0.05;
    std::size_t gmm_k_max = 6;
    std::uint64_t seed = 0;
};

struct ChannelReport {
    ErrorChannel channel = ErrorChannel::PE;
    std::size_t n = 0;
    std::optional<MomentSummary> moments{};
    std::optional<NormalityResult> shapiro_wilk{};
    std::optional<NormalityResult> ks_gaussian{};
    std::optional<GmmModel> gmm{};
    std::optional<Histogram> histogram{};
    /// Human-readable reasons for skipped stages (degenerate series, too few samples, ...).
    std::vector<std::string> notes{};
};

/// Runs moments, both normality tests, BIC-selected GMM and an FD histogram.
/// Zero-variance input skips the normality tests and the GMM with a note.
ChannelReport analyze_channel(const ErrorSeries& series, const AnalysisOptions& options);

struct CampaignReport {
    std::string test_label; ///< PM, AM, FR-U, FR-D, STEADY or a free label for ingested data
    ChannelReport rme{.channel = ErrorChannel::RME};
    ChannelReport pe{.channel = ErrorChannel::PE};
    ConsistencyResult consistency_rme;
    ConsistencyResult consistency_pe;
    bool consistent = true;
    std::size_t repeats = 1;
    /// Echo of the inputs (campaign config text or ingestion source).
    std::string provenance;
    ErrorTable errors;
};

/// Shared back end for simulated and ingested data.
CampaignReport analyze_errors(const ErrorTable& errors, const AnalysisOptions& options, std::string test_label,
                              std::string provenance);

// ---------------------------------------------------------------- campaign

/// One seeded pass: synthesize, estimate, positive sequence, inject, metrics.
ErrorTable run_repeat(const CampaignConfig& config, std::size_t repeat_index);

/// Runs `repeats` passes (in parallel), checks consistency, concatenates,
/// analyzes both channels and writes artifacts when output_dir is set.
CampaignReport run_campaign(const CampaignConfig& config);

/// Label used in summary tables: PM, AM, FR-U, FR-D, STEADY.
std::string test_label(TestType t);

// ---------------------------------------------------------------- reporting

/// summary.csv for one or more reports: PE rows first, then RME, each in
/// PM, AM, FR-U, FR-D, STEADY order, then free labels alphabetically.
std::string summary_csv(std::span<const CampaignReport> reports);
std::string histogram_csv(const Histogram& h);
std::string histogram_svg(const Histogram& h, const std::string& title, const std::string& x_label);
std::string report_json(const CampaignReport& report);

/// Writes summary.csv, errors.csv, report.json and per-channel
/// histogram_<rme|pe>.csv/.svg. Returns the written paths. Throws IoFailure.
std::vector<std::filesystem::path> emit_report(const CampaignReport& report, const std::filesystem::path& out_dir);

} // namespace synchrocal
