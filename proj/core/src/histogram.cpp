#include "synchrocal/error.hpp"
#include "synchrocal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace synchrocal {

namespace {

Histogram fill(std::span<const double> x, double lo, double width, std::size_t bins)
{
    Histogram h;
    h.n_total = x.size();
    h.counts.assign(bins, 0);
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        h.bin_edges[i] = lo + static_cast<double>(i) * width;
    for (double v : x) {
        const double pos = std::floor((v - lo) / width + 1e-9);
        const auto idx = pos <= 0.0 ? std::size_t{0} : std::min(static_cast<std::size_t>(pos), bins - 1);
        ++h.counts[idx];
    }
    return h;
}

} // namespace

std::size_t Histogram::count_modes(double threshold_fraction) const
{
    if (counts.empty())
        return 0;
    const double limit = threshold_fraction * static_cast<double>(*std::max_element(counts.begin(), counts.end()));
    std::size_t runs = 0;
    bool inside = false;
    for (std::size_t c : counts) {
        const bool above = c > 0 && static_cast<double>(c) >= limit;
        if (above && !inside)
            ++runs;
        inside = above;
    }
    return runs;
}

Histogram histogram(std::span<const double> x, BinRule rule)
{
    if (x.empty())
        throw Error(ErrorCode::EmptySeries, "histogram of empty series");
    const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
    const double mn = *mn_it;
    const double mx = *mx_it;

    if (rule.kind == BinRule::Kind::Fixed) {
        if (!(rule.width > 0.0))
            throw Error(ErrorCode::ValueOutOfRange, "fixed bin width must be positive");
        const double lo = std::floor(mn / rule.width) * rule.width;
        const auto bins = static_cast<std::size_t>(std::floor((mx - lo) / rule.width + 1e-9)) + 1;
        if (bins > kMaxHistogramBins)
            throw Error(ErrorCode::ValueOutOfRange, "fixed bin width yields too many bins");
        return fill(x, lo, rule.width, bins);
    }

    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
    double width = 2.0 * iqr * std::pow(static_cast<double>(x.size()), -1.0 / 3.0);
    if (!(width > 0.0) || mx == mn) {
        const double eps = std::max(1e-12, 1e-9 * std::max(std::abs(mn), std::abs(mx)));
        Histogram h;
        h.n_total = x.size();
        h.bin_edges = {mn - eps, mx + eps};
        h.counts = {x.size()};
        return h;
    }
    auto bins = static_cast<std::size_t>(std::ceil((mx - mn) / width));
    bins = std::max<std::size_t>(bins, 1);
    if (bins > kMaxHistogramBins) {
        bins = kMaxHistogramBins;
        width = (mx - mn) / static_cast<double>(bins);
    }
    return fill(x, mn, width, bins);
}

} // namespace synchrocal
