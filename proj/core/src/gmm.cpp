#include "synchrocal/error.hpp"
#include "synchrocal/random.hpp"
#include "synchrocal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

namespace synchrocal {

namespace {

constexpr std::uint64_t kRestartStream = 0x676d6dULL;
constexpr double kMinWeight = 1e-300;
constexpr double kNegligibleLog = -40.0;

struct EmState {
    std::vector<double> weight;
    std::vector<double> mean;
    std::vector<double> var;
};

struct EmRun {
    EmState state;
    double log_likelihood = -std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> trace;
};

EmRun run_em(std::span<const double> x, EmState state, double var_floor, const GmmOptions& opt)
{
    const std::size_t n = x.size();
    const std::size_t k = state.mean.size();
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    std::vector<double> resp(n * k);
    std::vector<double> log_const(k), inv_sd(k);

    EmRun run;
    double previous = 0.0;
    for (std::size_t it = 0;; ++it) {
        // E-step: responsibilities and the log-likelihood of the current parameters.
        for (std::size_t j = 0; j < k; ++j) {
            inv_sd[j] = 1.0 / std::sqrt(state.var[j]);
            log_const[j] = std::log(state.weight[j]) + std::log(inv_sd[j]) - half_log_2pi;
        }
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double* r = &resp[i * k];
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                const double z = (x[i] - state.mean[j]) * inv_sd[j];
                r[j] = log_const[j] - 0.5 * z * z;
                top = std::max(top, r[j]);
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                // Terms below e^-40 cannot move a sum that already holds 1.
                const double d = r[j] - top;
                r[j] = d < kNegligibleLog ? 0.0 : std::exp(d);
                sum += r[j];
            }
            const double inv = 1.0 / sum;
            for (std::size_t j = 0; j < k; ++j)
                r[j] *= inv;
            ll += top + std::log(sum);
        }
        run.trace.push_back(ll);
        run.log_likelihood = ll;
        run.iterations = it;

        if (it > 0 && std::abs(ll - previous) < opt.tolerance * std::abs(previous)) {
            run.converged = true;
            break;
        }
        if (it >= opt.max_iterations)
            break;
        previous = ll;

        // M-step.
        // Sums are taken about the previous means; the shift to the new mean
        // is applied afterwards, so one pass suffices.
        std::vector<double> nk(k, 0.0), sd(k, 0.0), sv(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* r = &resp[i * k];
            for (std::size_t j = 0; j < k; ++j) {
                const double d = x[i] - state.mean[j];
                nk[j] += r[j];
                sd[j] += r[j] * d;
                sv[j] += r[j] * d * d;
            }
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (nk[j] > 0.0) {
                const double shift = sd[j] / nk[j];
                state.mean[j] += shift;
                sv[j] = std::max(sv[j] - nk[j] * shift * shift, 0.0);
            }
        }
        double wsum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            state.weight[j] = std::max(nk[j] / static_cast<double>(n), kMinWeight);
            wsum += state.weight[j];
            if (nk[j] > 0.0)
                state.var[j] = std::max(sv[j] / nk[j], var_floor);
        }
        for (double& w : state.weight)
            w /= wsum;
    }
    run.state = std::move(state);
    return run;
}

} // namespace

GmmModel fit_gmm(std::span<const double> x, std::size_t k, std::uint64_t seed, const GmmOptions& options)
{
    const std::size_t n = x.size();
    if (k == 0 || n < 10 * k)
        throw Error(ErrorCode::TooFewSamples, "GMM with k = " + std::to_string(k) + " needs at least " +
                                                  std::to_string(10 * k) + " samples");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double dn = static_cast<double>(n);
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / dn;
    double ss = 0.0;
    for (double v : sorted)
        ss += (v - mean) * (v - mean);
    const double pop_var = ss / dn;
    const double sample_sd = std::sqrt(ss / (dn - 1.0));
    if (!(pop_var > 0.0))
        throw Error(ErrorCode::ConstantInput, "GMM fit on constant input");
    const double var_floor = 1e-12 * pop_var;

    EmState base;
    const double init_sd = sample_sd / static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) {
        base.weight.push_back(1.0 / static_cast<double>(k));
        base.mean.push_back(sorted_quantile(sorted, (static_cast<double>(j) + 0.5) / static_cast<double>(k)));
        base.var.push_back(std::max(init_sd * init_sd, var_floor));
    }

    EmRun best;
    const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
    for (std::size_t r = 0; r < restarts; ++r) {
        EmState start = base;
        if (r > 0) {
            SplitMix64 rng(derive_seed(seed, kRestartStream, r));
            std::normal_distribution<double> z(0.0, 1.0);
            for (double& m : start.mean)
                m += 0.5 * init_sd * z(rng);
            std::sort(start.mean.begin(), start.mean.end());
        }
        EmRun run = run_em(sorted, std::move(start), var_floor, options);
        if (r == 0 || run.log_likelihood > best.log_likelihood)
            best = std::move(run);
    }

    GmmModel model;
    model.k = k;
    for (std::size_t j = 0; j < k; ++j)
        model.components.push_back({best.state.weight[j], best.state.mean[j], std::sqrt(best.state.var[j])});
    std::sort(model.components.begin(), model.components.end(),
              [](const GaussianComponent& a, const GaussianComponent& b) { return a.mean < b.mean; });
    model.log_likelihood = best.log_likelihood;
    model.bic = -2.0 * best.log_likelihood + static_cast<double>(3 * k - 1) * std::log(dn);
    model.iterations = best.iterations;
    model.converged = best.converged;
    model.ll_trace = std::move(best.trace);
    return model;
}

GmmModel select_gmm_order(std::span<const double> x, std::size_t k_max, std::uint64_t seed, const GmmOptions& options)
{
    if (k_max < 1)
        throw Error(ErrorCode::TooFewSamples, "k_max must be at least 1");
    std::vector<double> bics;
    GmmModel best;
    for (std::size_t k = 1; k <= k_max; ++k) {
        GmmModel m = fit_gmm(x, k, seed, options);
        bics.push_back(m.bic);
        if (k == 1 || m.bic < best.bic)
            best = std::move(m);
    }
    best.candidate_bic = std::move(bics);
    return best;
}

} // namespace synchrocal
