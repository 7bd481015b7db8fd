#include "synchrocal/error.hpp"
#include "synchrocal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace synchrocal {

double sorted_quantile(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw Error(ErrorCode::EmptySeries, "quantile of empty series");
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

MomentSummary moments(std::span<const double> x)
{
    const std::size_t n = x.size();
    if (n < 2)
        throw Error(ErrorCode::TooFewSamples, "moments need at least 2 samples");

    MomentSummary s;
    s.n = n;
    const double dn = static_cast<double>(n);
    s.mean = std::accumulate(x.begin(), x.end(), 0.0) / dn;
    // Refine with the mean residual; an error d in the mean moves g1 by about 3d/sd.
    s.mean += std::accumulate(x.begin(), x.end(), 0.0, [&](double acc, double v) { return acc + (v - s.mean); }) / dn;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0, peak = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        peak = std::max(peak, std::abs(v));
    }
    m2 /= dn;
    m3 /= dn;
    m4 /= dn;
    s.std_dev = std::sqrt(m2 * dn / (dn - 1.0));

    std::vector<double> sorted(x.begin(), x.end());
    const std::size_t mid = n / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
    if (n % 2 == 1) {
        s.median = sorted[mid];
    } else {
        const double upper = sorted[mid];
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
        s.median = 0.5 * (lower + upper);
    }

    // Zero spread up to rounding of the mean.
    if (std::sqrt(m2) <= 1e-13 * peak || m2 == 0.0) {
        s.shape_defined = false;
        s.skewness = std::numeric_limits<double>::quiet_NaN();
        s.excess_kurtosis = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    s.skewness = m3 / std::pow(m2, 1.5);
    s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return s;
}

} // namespace synchrocal
