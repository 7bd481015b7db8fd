#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synchrocal {

// ---------------------------------------------------------------- moments

/// Sample std (n - 1 denominator); skewness g1 = m3 / m2^1.5 and excess
/// kurtosis g2 = m4 / m2^2 - 3 use population central moments.
struct MomentSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    /// False for a zero-variance series: skewness and kurtosis are NaN.
    bool shape_defined = true;

    bool degenerate() const noexcept { return !shape_defined; }
};

/// Throws TooFewSamples for n < 2.
MomentSummary moments(std::span<const double> x);

/// Linear-interpolation sample quantile (type 7) of already sorted data.
double sorted_quantile(std::span<const double> sorted, double p);

// ---------------------------------------------------------------- histogram

struct BinRule {
    enum class Kind { FreedmanDiaconis, Fixed };
    Kind kind = Kind::FreedmanDiaconis;
    double width = 0.0;

    static BinRule freedman_diaconis() { return {}; }
    static BinRule fixed(double width) { return {Kind::Fixed, width}; }
};

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::size_t n_total = 0;

    std::size_t bins() const noexcept { return counts.size(); }
    /// Number of separate runs of bins whose count reaches
    /// threshold_fraction * max(count); a coarse peak counter for plots.
    std::size_t count_modes(double threshold_fraction = 0.2) const;
};

/// Upper bound on the bin count; wider bins are used past this.
inline constexpr std::size_t kMaxHistogramBins = 4096;

/// FD: width 2 * IQR * n^(-1/3) starting at min(x); IQR = 0 gives one bin
/// [min - eps, max + eps]. FIXED: edges on multiples of width. Throws EmptySeries.
Histogram histogram(std::span<const double> x, BinRule rule = {});

// ---------------------------------------------------------------- normality

enum class NormalityTest { ShapiroWilk, KsGaussian };
std::string_view to_string(NormalityTest t) noexcept;

/// How ks_gaussian turns D into a p-value. Lilliefors accounts for the mean and
/// std being estimated from the same data (Dallal-Wilkinson approximation);
/// KolmogorovAsymptotic treats them as known and is conservative.
enum class KsPValueMethod { Lilliefors, KolmogorovAsymptotic };

struct SubsampleResult {
    std::uint64_t seed = 0;
    double statistic = 0.0;
    double p_value = 0.0;
};

struct NormalityResult {
    NormalityTest test = NormalityTest::ShapiroWilk;
    double statistic = 0.0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
    std::size_t n_used = 0;
    std::string p_value_method;
    std::string note;
    /// Shapiro-Wilk only: per-subsample results when n exceeded the valid range.
    std::vector<SubsampleResult> subsamples;
};

inline constexpr std::size_t kShapiroWilkMaxN = 5000;
inline constexpr std::size_t kShapiroWilkSubsamples = 11;

/// Royston's AS R94 W test. For n > 5000, 11 seeded subsamples of 5000 are
/// tested and the median p-value (with its W) is reported.
/// Throws TooFewSamples (n < 3) and ConstantInput.
NormalityResult shapiro_wilk(std::span<const double> x, double alpha = 0.05, std::uint64_t seed = 0);

/// W and p for one sample with 3 <= n <= 5000 (no subsampling).
NormalityResult shapiro_wilk_single(std::span<const double> x, double alpha = 0.05);

/// One-sample K-S against N(mean, sd) fitted to x. Throws TooFewSamples (n < 5) and ConstantInput.
NormalityResult ks_gaussian(std::span<const double> x, double alpha = 0.05,
                            KsPValueMethod method = KsPValueMethod::Lilliefors);

struct TwoSampleKs {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample sup-distance with the asymptotic Kolmogorov p-value. Throws TooFewSamples (n < 5).
TwoSampleKs ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Upper tail P(K > lambda) of the limiting Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// Dallal-Wilkinson approximation to the Lilliefors p-value.
double lilliefors_p_value(double d, std::size_t n);

double normal_cdf(double z);
double normal_quantile(double p);

// ---------------------------------------------------------------- GMM

struct GaussianComponent {
    double weight = 0.0;
    double mean = 0.0;
    double std_dev = 0.0;
};

struct GmmModel {
    std::size_t k = 0;
    std::vector<GaussianComponent> components; ///< sorted by mean
    double log_likelihood = 0.0;
    double bic = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    /// Log-likelihood at every E-step of the winning restart.
    std::vector<double> ll_trace;
    /// select_gmm_order: BIC of each candidate k = 1 .. k_max.
    std::vector<double> candidate_bic;
};

struct GmmOptions {
    std::size_t max_iterations = 500;
    double tolerance = 1e-8;
    std::size_t restarts = 3;
};

/// 1-D EM with quantile initialisation and seed-perturbed restarts; the best
/// likelihood is kept. Throws TooFewSamples when n < 10 k. A fit that hits the
/// iteration cap returns best-so-far with converged = false.
GmmModel fit_gmm(std::span<const double> x, std::size_t k, std::uint64_t seed, const GmmOptions& options = {});

/// Minimum-BIC model over k = 1 .. k_max.
GmmModel select_gmm_order(std::span<const double> x, std::size_t k_max, std::uint64_t seed,
                          const GmmOptions& options = {});

} // namespace synchrocal
