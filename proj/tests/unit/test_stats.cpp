#include "oracles.hpp"

#include "synchrocal/error.hpp"
#include "synchrocal/random.hpp"
#include "synchrocal/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace synchrocal;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0)
{
    SplitMix64 rng(seed);
    std::normal_distribution<double> z(mean, sd);
    std::vector<double> x(n);
    for (double& v : x)
        v = z(rng);
    return x;
}

// Equal-weight mixture with the given means and a shared std.
std::vector<double> mixture(std::size_t n, std::uint64_t seed, std::vector<double> means, double sd)
{
    SplitMix64 rng(seed);
    std::normal_distribution<double> z(0.0, sd);
    std::vector<double> x(n);
    for (double& v : x)
        v = means[rng() % means.size()] + z(rng);
    return x;
}

std::vector<double> generated(std::size_t n, auto&& f)
{
    std::vector<double> x;
    for (std::size_t i = 1; i <= n; ++i)
        x.push_back(f(static_cast<double>(i)));
    return x;
}

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoFailure;
}

} // namespace

// ---------------------------------------------------------------- moments

TEST(Moments, TwoPointSymmetric)
{
    const std::vector<double> x{0, 0, 3, 3};
    const auto m = moments(x);
    EXPECT_EQ(m.mean, 1.5);
    EXPECT_EQ(m.median, 1.5);
    EXPECT_EQ(m.skewness, 0.0);
    EXPECT_EQ(m.excess_kurtosis, -2.0);
    EXPECT_TRUE(m.shape_defined);
}

TEST(Moments, ConstantSeriesIsDegenerate)
{
    const auto m = moments(std::vector<double>{5, 5, 5});
    EXPECT_TRUE(m.degenerate());
    EXPECT_EQ(m.mean, 5.0);
    EXPECT_EQ(m.median, 5.0);
    EXPECT_EQ(m.std_dev, 0.0);
    EXPECT_TRUE(std::isnan(m.skewness));
    EXPECT_EQ(code_of([] { moments(std::vector<double>{1.0}); }), ErrorCode::TooFewSamples);
}

TEST(Moments, MatchesDirectSummationOracle)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto x = mixture(18000, seed, {0.352, 0.368}, 0.003);
        const auto got = moments(x);
        const auto want = oracle::moments(x);
        EXPECT_NEAR(got.mean, want.mean, 1e-9 * std::abs(want.mean));
        EXPECT_EQ(got.median, want.median);
        EXPECT_NEAR(got.std_dev, want.std_dev, 1e-9 * want.std_dev);
        EXPECT_NEAR(got.skewness, want.skewness, 1e-9 * std::max(1.0, std::abs(want.skewness)));
        EXPECT_NEAR(got.excess_kurtosis, want.excess_kurtosis, 1e-9 * std::abs(want.excess_kurtosis));
    }
}

TEST(Moments, OddMedian)
{
    EXPECT_EQ(moments(std::vector<double>{9, 1, 4}).median, 4.0);
}

TEST(Moments, AffineEquivariance)
{
    const auto x = mixture(5000, 77, {-1, 0.5, 2}, 0.4);
    const auto base = moments(x);
    for (auto [a, b] : {std::pair{2.5, -1.0}, std::pair{-0.3, 10.0}}) {
        std::vector<double> y;
        for (double v : x)
            y.push_back(a * v + b);
        const auto m = moments(y);
        EXPECT_NEAR(m.mean, a * base.mean + b, 1e-10);
        EXPECT_NEAR(m.median, a * base.median + b, 1e-10);
        EXPECT_NEAR(m.std_dev, std::abs(a) * base.std_dev, 1e-10);
        EXPECT_NEAR(m.skewness, (a > 0 ? 1 : -1) * base.skewness, 1e-9);
        EXPECT_NEAR(m.excess_kurtosis, base.excess_kurtosis, 1e-9);
    }
}

TEST(Moments, GaussianShapeVanishesWithN)
{
    double g1 = 0, g2 = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto m = moments(gaussian(100000, 500 + s));
        g1 += m.skewness / 20;
        g2 += m.excess_kurtosis / 20;
    }
    EXPECT_LT(std::abs(g1), 0.05);
    EXPECT_LT(std::abs(g2), 0.1);
}

// ---------------------------------------------------------------- histogram

TEST(Histogram, ConservesCounts)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> x(1000);
    for (double& v : x)
        v = u(rng);
    for (const BinRule rule : {BinRule::freedman_diaconis(), BinRule::fixed(0.05), BinRule::fixed(0.3)}) {
        const auto h = histogram(x, rule);
        EXPECT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}), 1000u);
        EXPECT_EQ(h.n_total, 1000u);
        EXPECT_EQ(h.bin_edges.size(), h.counts.size() + 1);
        for (std::size_t i = 1; i < h.bin_edges.size(); ++i)
            EXPECT_LT(h.bin_edges[i - 1], h.bin_edges[i]);
        EXPECT_LE(h.bin_edges.front(), *std::min_element(x.begin(), x.end()));
        EXPECT_GE(h.bin_edges.back(), *std::max_element(x.begin(), x.end()));
    }
}

TEST(Histogram, ConstantSeriesSingleBin)
{
    const auto h = histogram(std::vector<double>(50, 0.25));
    ASSERT_EQ(h.bins(), 1u);
    EXPECT_EQ(h.counts[0], 50u);
    EXPECT_LT(h.bin_edges[0], 0.25);
    EXPECT_GT(h.bin_edges[1], 0.25);
    EXPECT_EQ(code_of([] { histogram(std::vector<double>{}); }), ErrorCode::EmptySeries);
}

TEST(Histogram, FdWidthMatchesOracle)
{
    const auto x = gaussian(10000, 8);
    const double iqr = oracle::quantile7(x, 0.75) - oracle::quantile7(x, 0.25);
    const double want = 2.0 * iqr * std::pow(10000.0, -1.0 / 3.0);
    const auto h = histogram(x);
    EXPECT_NEAR(h.bin_edges[1] - h.bin_edges[0], want, 1e-12 * want);
}

TEST(Histogram, ModeCountSeesTwoPeaks)
{
    EXPECT_EQ(histogram(mixture(18000, 2, {0.352, 0.368}, 0.002)).count_modes(), 2u);
    EXPECT_EQ(histogram(gaussian(18000, 2)).count_modes(), 1u);
}

// ---------------------------------------------------------------- Shapiro-Wilk

TEST(ShapiroWilk, MatchesReferenceImplementation)
{
    struct Case {
        std::vector<double> x;
        double w, p;
    };
    const std::vector<Case> cases{
        {{1.0, 2.0, 4.0}, 0.9642857142857142, 0.6368868450289689},
        {generated(20, [](double i) { return std::pow(i, 1.5); }), 0.9386387827100082, 0.22595959591595688},
        {generated(50, [](double i) { return std::sin(i) * std::sqrt(i); }), 0.9687666457450598, 0.20610668154092726},
        {generated(500, [](double i) { return std::exp(std::sin(i)); }), 0.8666744896020104, 3.0492439519035733e-20},
        {generated(5000, [](double i) { return std::sin(i) + std::cos(2.3 * i); }), 0.981444606442416,
         4.377727441160358e-25},
    };
    for (const auto& c : cases) {
        const auto r = shapiro_wilk(c.x);
        EXPECT_NEAR(r.statistic, c.w, 1e-6) << "n=" << c.x.size();
        EXPECT_NEAR(std::log(r.p_value), std::log(c.p), 1e-3) << "n=" << c.x.size();
        EXPECT_EQ(r.n_used, c.x.size());
    }
}

TEST(ShapiroWilk, Guards)
{
    EXPECT_EQ(code_of([] { shapiro_wilk(std::vector<double>{1, 2}); }), ErrorCode::TooFewSamples);
    EXPECT_EQ(code_of([] { shapiro_wilk(std::vector<double>(10, 1.0)); }), ErrorCode::ConstantInput);
}

TEST(ShapiroWilk, BimodalRejects)
{
    const auto r = shapiro_wilk(mixture(5000, 4, {-1, 1}, 0.01));
    EXPECT_LT(r.p_value, 1e-6);
    EXPECT_TRUE(r.reject);
}

TEST(ShapiroWilk, LargeInputUsesSeededSubsamples)
{
    const auto x = gaussian(18000, 12);
    const auto a = shapiro_wilk(x, 0.05, 3);
    const auto b = shapiro_wilk(x, 0.05, 3);
    ASSERT_EQ(a.subsamples.size(), kShapiroWilkSubsamples);
    EXPECT_EQ(a.n_used, kShapiroWilkMaxN);
    EXPECT_EQ(a.p_value, b.p_value);
    std::vector<double> ps;
    for (const auto& s : a.subsamples)
        ps.push_back(s.p_value);
    std::sort(ps.begin(), ps.end());
    EXPECT_EQ(a.p_value, ps[ps.size() / 2]);
    EXPECT_FALSE(a.note.empty());
}

// ---------------------------------------------------------------- K-S

TEST(KsGaussian, StatisticMatchesReference)
{
    const auto pow20 = generated(20, [](double i) { return std::pow(i, 1.5); });
    const auto e500 = generated(500, [](double i) { return std::exp(std::sin(i)); });
    const auto m5000 = generated(5000, [](double i) { return std::sin(i) + std::cos(2.3 * i); });
    EXPECT_NEAR(ks_gaussian(pow20).statistic, 0.10734327769794544, 1e-12);
    EXPECT_NEAR(ks_gaussian(e500).statistic, 0.1471665792146582, 1e-12);
    EXPECT_NEAR(ks_gaussian(m5000).statistic, 0.029904732709983284, 1e-12);

    // Asymptotic Kolmogorov p with the small-sample correction.
    EXPECT_NEAR(ks_gaussian(pow20, 0.05, KsPValueMethod::KolmogorovAsymptotic).p_value, 0.9667048127302569, 1e-9);
    EXPECT_NEAR(ks_gaussian(e500, 0.05, KsPValueMethod::KolmogorovAsymptotic).p_value, 6.161575706066208e-10, 1e-15);
    EXPECT_NEAR(ks_gaussian(m5000, 0.05, KsPValueMethod::KolmogorovAsymptotic).p_value, 0.00025339616283156043, 1e-12);

    // Dallal-Wilkinson branch of the Lilliefors approximation.
    EXPECT_NEAR(std::log(ks_gaussian(e500).p_value), std::log(2.7852943849291333e-29), 1e-6);
    EXPECT_NEAR(std::log(ks_gaussian(m5000).p_value), std::log(5.440647258489859e-11), 1e-6);
}

TEST(KsGaussian, QuantileConstructionFitsModel)
{
    const auto x = generated(999, [](double i) { return normal_quantile(i / 1000.0); });
    for (auto method : {KsPValueMethod::Lilliefors, KsPValueMethod::KolmogorovAsymptotic}) {
        const auto r = ks_gaussian(x, 0.05, method);
        EXPECT_LT(r.statistic, 0.01);
        EXPECT_FALSE(r.reject);
    }
}

TEST(KsGaussian, BimodalRejectsAndGuards)
{
    const auto r = ks_gaussian(mixture(5000, 4, {-1, 1}, 0.01));
    EXPECT_LT(r.p_value, 1e-6);
    EXPECT_TRUE(r.reject);
    EXPECT_FALSE(r.note.empty());
    EXPECT_EQ(code_of([] { ks_gaussian(std::vector<double>{1, 2, 3}); }), ErrorCode::TooFewSamples);
    EXPECT_EQ(code_of([] { ks_gaussian(std::vector<double>(8, 2.0)); }), ErrorCode::ConstantInput);
}

TEST(Normality, DecisionsAreAffineInvariant)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = seed % 2 ? gaussian(400, seed) : mixture(400, seed, {0, 1.2}, 0.5);
        std::vector<double> y;
        for (double v : x)
            y.push_back(-3.0 * v + 7.0);
        EXPECT_EQ(shapiro_wilk(x).reject, shapiro_wilk(y).reject);
        EXPECT_EQ(ks_gaussian(x).reject, ks_gaussian(y).reject);
        EXPECT_NEAR(shapiro_wilk(x).statistic, shapiro_wilk(y).statistic, 1e-10);
        EXPECT_NEAR(ks_gaussian(x).statistic, ks_gaussian(y).statistic, 1e-10);
    }
}

TEST(KsTwoSample, Examples)
{
    const auto a = gaussian(200, 1);
    EXPECT_EQ(ks_two_sample(a, a).statistic, 0.0);
    EXPECT_EQ(ks_two_sample(a, a).p_value, 1.0);

    std::vector<double> shifted;
    for (double v : a)
        shifted.push_back(v + 100.0);
    EXPECT_EQ(ks_two_sample(a, shifted).statistic, 1.0);

    const auto s1 = generated(300, [](double i) { return std::sin(i); });
    const auto s2 = generated(200, [](double i) { return std::sin(1.1 * i) + 0.1; });
    const auto r = ks_two_sample(s1, s2);
    EXPECT_NEAR(r.statistic, 0.14, 1e-12);
    EXPECT_NEAR(r.p_value, 0.016192619444054552, 1e-9);
    EXPECT_EQ(code_of([] { ks_two_sample(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 3, 4, 5}); }),
              ErrorCode::TooFewSamples);
}

TEST(KsTwoSample, SameDistributionRarelyFlagged)
{
    int ok = 0;
    for (std::uint64_t t = 0; t < 1000; ++t)
        ok += ks_two_sample(gaussian(5000, 2 * t + 1), gaussian(5000, 2 * t + 2)).p_value > 0.01;
    EXPECT_GE(ok, 950);
}

TEST(Kolmogorov, SurvivalKnownValues)
{
    EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
    EXPECT_NEAR(kolmogorov_survival(1.36), 0.0494, 1e-4);
    EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-12);
    EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-12);
}

// ---------------------------------------------------------------- GMM

TEST(Gmm, SingleComponentIsSampleMoments)
{
    const auto x = gaussian(2000, 5, 3.0, 2.0);
    const auto m = fit_gmm(x, 1, 0);
    const auto o = oracle::moments(x);
    ASSERT_EQ(m.components.size(), 1u);
    EXPECT_NEAR(m.components[0].mean, o.mean, 1e-12);
    const double pop_var = o.std_dev * o.std_dev * (2000.0 - 1.0) / 2000.0;
    EXPECT_NEAR(m.components[0].std_dev * m.components[0].std_dev, pop_var, 1e-10);
    EXPECT_EQ(m.components[0].weight, 1.0);
}

TEST(Gmm, TwoComponentRecovery)
{
    const auto m = fit_gmm(mixture(10000, 6, {-1, 1}, 0.01), 2, 1);
    ASSERT_EQ(m.k, 2u);
    EXPECT_NEAR(m.components[0].mean, -1.0, 0.05);
    EXPECT_NEAR(m.components[1].mean, 1.0, 0.05);
    EXPECT_NEAR(m.components[0].weight, 0.5, 0.03);
    EXPECT_NEAR(m.components[1].weight, 0.5, 0.03);
}

TEST(Gmm, FiveComponentRecovery)
{
    const auto m = fit_gmm(mixture(20000, 7, {-2, -1, 0, 1, 2}, 0.05), 5, 1);
    ASSERT_EQ(m.components.size(), 5u);
    for (int j = 0; j < 5; ++j)
        EXPECT_NEAR(m.components[j].mean, j - 2.0, 0.05);
}

TEST(Gmm, LikelihoodNeverDecreases)
{
    for (std::size_t k = 2; k <= 4; ++k) {
        const auto m = fit_gmm(mixture(3000, 10 + k, {-0.5, 0.0, 0.7}, 0.3), k, 2);
        ASSERT_GE(m.ll_trace.size(), 2u);
        for (std::size_t i = 1; i < m.ll_trace.size(); ++i)
            EXPECT_GE(m.ll_trace[i], m.ll_trace[i - 1] - 1e-9 * std::abs(m.ll_trace[i - 1])) << "k=" << k << " i=" << i;
    }
}

TEST(Gmm, InvariantsAndDeterminism)
{
    const auto x = mixture(4000, 9, {0, 3}, 0.5);
    const auto a = fit_gmm(x, 3, 17), b = fit_gmm(x, 3, 17);
    double wsum = 0;
    for (std::size_t j = 0; j < a.k; ++j) {
        EXPECT_GT(a.components[j].weight, 0.0);
        wsum += a.components[j].weight;
        EXPECT_EQ(a.components[j].mean, b.components[j].mean);
        if (j > 0) {
            EXPECT_LE(a.components[j - 1].mean, a.components[j].mean);
        }
    }
    EXPECT_NEAR(wsum, 1.0, 1e-9);
    EXPECT_EQ(a.log_likelihood, b.log_likelihood);
    EXPECT_NEAR(a.bic, -2 * a.log_likelihood + 8 * std::log(4000.0), 1e-9);
    EXPECT_EQ(code_of([&] { fit_gmm(std::span(x).first(29), 3, 0); }), ErrorCode::TooFewSamples);
    EXPECT_EQ(code_of([] { fit_gmm(std::vector<double>(100, 1.0), 2, 0); }), ErrorCode::ConstantInput);
}

TEST(GmmOrder, SelectsTrueOrder)
{
    int one = 0, two = 0, five = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        one += select_gmm_order(gaussian(2000, 900 + t), 5, t).k == 1;
        two += select_gmm_order(mixture(4000, 700 + t, {-1, 1}, 0.01), 4, t).k == 2;
        five += select_gmm_order(mixture(4000, 800 + t, {-2, -1, 0, 1, 2}, 0.05), 6, t).k == 5;
    }
    EXPECT_GE(one, 19);
    EXPECT_GE(two, 19);
    EXPECT_GE(five, 18);
}

TEST(GmmOrder, RecordsCandidateBic)
{
    const auto m = select_gmm_order(mixture(1000, 3, {-1, 1}, 0.1), 3, 0);
    ASSERT_EQ(m.candidate_bic.size(), 3u);
    EXPECT_EQ(m.bic, *std::min_element(m.candidate_bic.begin(), m.candidate_bic.end()));
}
