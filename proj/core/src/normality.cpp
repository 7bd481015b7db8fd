#include "synchrocal/error.hpp"
#include "synchrocal/random.hpp"
#include "synchrocal/stats.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <vector>

namespace synchrocal {

namespace {

constexpr std::uint64_t kSubsampleStream = 0x73776c6bULL;

// Royston (1995) polynomial approximations.
constexpr std::array<double, 6> kC1{0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
constexpr std::array<double, 6> kC2{0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr std::array<double, 4> kC3{0.5440, -0.39978, 0.025054, -6.714e-4};
constexpr std::array<double, 4> kC4{1.3822, -0.77857, 0.062767, -0.0020322};
constexpr std::array<double, 4> kC5{-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr std::array<double, 3> kC6{-0.4803, -0.082676, 0.0030302};
constexpr std::array<double, 2> kG{-2.273, 0.459};

template <std::size_t N>
double poly(const std::array<double, N>& c, double x)
{
    double result = c[0];
    if constexpr (N > 1) {
        double p = x * c[N - 1];
        for (std::size_t j = N - 2; j > 0; --j)
            p = (p + c[j]) * x;
        result += p;
    }
    return result;
}

// Half of the antisymmetric W coefficient vector, largest first.
std::vector<double> compute_sw_coefficients(std::size_t n)
{
    const std::size_t half = n / 2;
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
        return a;
    }
    const double an = static_cast<double>(n);
    const double an25 = an + 0.25;
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        a[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / an25);
        summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(kC1, rsn) - a[0] / ssumm2;

    std::size_t first_scaled;
    double fac;
    if (n > 5) {
        first_scaled = 2;
        const double a2 = -a[1] / ssumm2 + poly(kC2, rsn);
        fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[0] = a1;
        a[1] = a2;
    } else {
        first_scaled = 1;
        fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
        a[0] = a1;
    }
    for (std::size_t i = first_scaled; i < half; ++i)
        a[i] = -a[i] / fac;
    return a;
}

const std::vector<double>& sw_coefficients(std::size_t n)
{
    static std::mutex mutex;
    static std::map<std::size_t, std::vector<double>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, compute_sw_coefficients(n)).first;
    return it->second;
}

struct SwOutcome {
    double w = 1.0;
    double p = 1.0;
    bool constant = false;
};

SwOutcome sw_core(std::vector<double> x)
{
    const std::size_t n = x.size();
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range > 0.0) || range < 1e-300)
        return {0.0, 0.0, true};

    const std::vector<double>& a = sw_coefficients(n);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) {
        const double d = (v - mean) / range;
        ss += d * d;
    }
    double num = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        num += a[i] * (x[n - 1 - i] - x[i]) / range;
    const double w = std::min(1.0, num * num / ss);

    if (n == 3) {
        constexpr double pi6 = 6.0 / std::numbers::pi;
        constexpr double stqr = std::numbers::pi / 3.0;
        return {w, std::max(0.0, std::min(1.0, pi6 * (std::asin(std::sqrt(w)) - stqr)))};
    }

    const double w1 = 1.0 - w;
    if (w1 <= 0.0)
        return {w, 1.0};
    double y = std::log(w1);
    const double an = static_cast<double>(n);
    double m, s;
    if (n <= 11) {
        const double gamma = poly(kG, an);
        if (y >= gamma)
            return {w, 1e-99};
        y = -std::log(gamma - y);
        m = poly(kC3, an);
        s = std::exp(poly(kC4, an));
    } else {
        const double xx = std::log(an);
        m = poly(kC5, xx);
        s = std::exp(poly(kC6, xx));
    }
    return {w, normal_cdf(-(y - m) / s)};
}

} // namespace

std::string_view to_string(NormalityTest t) noexcept
{
    return t == NormalityTest::ShapiroWilk ? "SHAPIRO_WILK" : "KS_GAUSSIAN";
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
    static const boost::math::normal_distribution<double> standard(0.0, 1.0);
    return boost::math::quantile(standard, p);
}

NormalityResult shapiro_wilk_single(std::span<const double> x, double alpha)
{
    if (x.size() < 3)
        throw Error(ErrorCode::TooFewSamples, "Shapiro-Wilk needs n >= 3");
    if (x.size() > kShapiroWilkMaxN)
        throw Error(ErrorCode::TooFewSamples, "shapiro_wilk_single is limited to n <= 5000");
    const SwOutcome r = sw_core(std::vector<double>(x.begin(), x.end()));
    if (r.constant)
        throw Error(ErrorCode::ConstantInput, "Shapiro-Wilk on constant input");
    NormalityResult out;
    out.test = NormalityTest::ShapiroWilk;
    out.statistic = r.w;
    out.p_value = r.p;
    out.alpha = alpha;
    out.reject = r.p < alpha;
    out.n_used = x.size();
    out.p_value_method = "royston-as-r94";
    return out;
}

NormalityResult shapiro_wilk(std::span<const double> x, double alpha, std::uint64_t seed)
{
    if (x.size() <= kShapiroWilkMaxN)
        return shapiro_wilk_single(x, alpha);

    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (*mn == *mx)
        throw Error(ErrorCode::ConstantInput, "Shapiro-Wilk on constant input");

    std::vector<SubsampleResult> subs;
    std::vector<double> pool(x.begin(), x.end());
    std::vector<double> sample(kShapiroWilkMaxN);
    for (std::size_t s = 0; s < kShapiroWilkSubsamples; ++s) {
        const std::uint64_t sub_seed = derive_seed(seed, kSubsampleStream, s);
        SplitMix64 rng(sub_seed);
        // Partial Fisher-Yates: the first kShapiroWilkMaxN slots become the subsample.
        for (std::size_t i = 0; i < kShapiroWilkMaxN; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
            std::swap(pool[i], pool[j]);
            sample[i] = pool[i];
        }
        const SwOutcome r = sw_core(sample);
        subs.push_back({sub_seed, r.constant ? std::numeric_limits<double>::quiet_NaN() : r.w, r.p});
    }

    std::vector<std::size_t> order(subs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return subs[i].p_value < subs[j].p_value || (subs[i].p_value == subs[j].p_value && i < j);
    });
    const SubsampleResult& median = subs[order[order.size() / 2]];

    NormalityResult out;
    out.test = NormalityTest::ShapiroWilk;
    out.statistic = median.statistic;
    out.p_value = median.p_value;
    out.alpha = alpha;
    out.reject = out.p_value < alpha;
    out.n_used = kShapiroWilkMaxN;
    out.p_value_method = "royston-as-r94, median of 11 subsamples of 5000";
    out.note = "input of " + std::to_string(x.size()) + " samples exceeds the n <= 5000 validity range";
    out.subsamples = std::move(subs);
    return out;
}

double kolmogorov_survival(double lambda)
{
    if (!(lambda > 0.0))
        return 1.0;
    if (lambda < 1.18) {
        // Jacobi theta form converges fast for small lambda.
        const double l2 = lambda * lambda;
        const double c = std::numbers::pi * std::numbers::pi / (8.0 * l2);
        double sum = 0.0;
        for (int k = 1; k <= 7; ++k) {
            const double odd = 2.0 * k - 1.0;
            sum += std::exp(-odd * odd * c);
        }
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-300)
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double lilliefors_p_value(double d, std::size_t n)
{
    const double dn = static_cast<double>(n);
    double kd = d;
    double nd = dn;
    if (n > 100) {
        kd = d * std::pow(dn / 100.0, 0.49);
        nd = 100.0;
    }
    double p = std::exp(-7.01256 * kd * kd * (nd + 2.78019) + 2.99587 * kd * std::sqrt(nd + 2.78019) - 0.122119 +
                        0.974598 / std::sqrt(nd) + 1.67997 / nd);
    if (p > 0.1) {
        const double kk = (std::sqrt(dn) - 0.01 + 0.85 / std::sqrt(dn)) * d;
        if (kk <= 0.302)
            p = 1.0;
        else if (kk <= 0.5)
            p = 2.76773 - 19.828315 * kk + 80.709644 * kk * kk - 138.55152 * kk * kk * kk + 81.218052 * std::pow(kk, 4);
        else if (kk <= 0.9)
            p = -4.901232 + 40.662806 * kk - 97.490286 * kk * kk + 94.029866 * kk * kk * kk - 32.355711 * std::pow(kk, 4);
        else if (kk <= 1.31)
            p = 6.198765 - 19.734581 * kk + 23.186922 * kk * kk - 12.139633 * kk * kk * kk + 2.378365 * std::pow(kk, 4);
        else
            p = 1.0;
    }
    return std::clamp(p, 0.0, 1.0);
}

NormalityResult ks_gaussian(std::span<const double> x, double alpha, KsPValueMethod method)
{
    const std::size_t n = x.size();
    if (n < 5)
        throw Error(ErrorCode::TooFewSamples, "K-S normality test needs n >= 5");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double dn = static_cast<double>(n);
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / dn;
    double ss = 0.0;
    for (double v : sorted)
        ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (dn - 1.0));
    if (!(sd > 0.0) || sorted.front() == sorted.back())
        throw Error(ErrorCode::ConstantInput, "K-S normality test on constant input");

    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = normal_cdf((sorted[i] - mean) / sd);
        d = std::max({d, static_cast<double>(i + 1) / dn - f, f - static_cast<double>(i) / dn});
    }

    NormalityResult out;
    out.test = NormalityTest::KsGaussian;
    out.statistic = d;
    out.alpha = alpha;
    out.n_used = n;
    out.note = "mean and std estimated from the data";
    if (method == KsPValueMethod::Lilliefors) {
        out.p_value = lilliefors_p_value(d, n);
        out.p_value_method = "lilliefors (dallal-wilkinson)";
    } else {
        const double sn = std::sqrt(dn);
        out.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
        out.p_value_method = "kolmogorov asymptotic (parameters treated as known; conservative)";
    }
    out.reject = out.p_value < alpha;
    return out;
}

TwoSampleKs ks_two_sample(std::span<const double> a, std::span<const double> b)
{
    if (a.size() < 5 || b.size() < 5)
        throw Error(ErrorCode::TooFewSamples, "two-sample K-S needs n >= 5 in both samples");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());

    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == v)
            ++i;
        while (j < sb.size() && sb[j] == v)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sn = std::sqrt(ne);
    return {d, d == 0.0 ? 1.0 : kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

} // namespace synchrocal
