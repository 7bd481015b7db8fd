#include "synchrocal/noise.hpp"

#include "synchrocal/angle.hpp"
#include "synchrocal/error.hpp"
#include "synchrocal/random.hpp"

#include <cmath>
#include <random>

namespace synchrocal {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;

void validate_mixture(const std::vector<MixtureComponent>& comps)
{
    if (comps.empty())
        return;
    double total = 0.0;
    for (const auto& c : comps) {
        if (!(c.weight > 0.0) || !(c.std_dev >= 0.0) || !std::isfinite(c.mean))
            throw Error(ErrorCode::InvalidModel, "mixture components need weight > 0, std >= 0, finite mean");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidModel, "mixture weights must sum to 1");
}

double draw_mixture(const std::vector<MixtureComponent>& comps, SplitMix64& rng)
{
    if (comps.empty())
        return 0.0;
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    const double u = pick(rng);
    double acc = 0.0;
    const MixtureComponent* chosen = &comps.back();
    for (const auto& c : comps) {
        acc += c.weight;
        if (u < acc) {
            chosen = &c;
            break;
        }
    }
    std::normal_distribution<double> z(0.0, 1.0);
    return chosen->mean + chosen->std_dev * z(rng);
}

double snap(double value, double quantum)
{
    return quantum > 0.0 ? quantum * std::round(value / quantum) : value;
}

void apply(const NoiseModel& model, SplitMix64& rng, ErrorDraw& e)
{
    switch (model.kind) {
    case NoiseKind::None: break;
    case NoiseKind::Bias:
        e.mag_rel += model.bias_mag_rel;
        e.angle_deg += model.bias_angle_deg;
        break;
    case NoiseKind::Gaussian: {
        std::normal_distribution<double> z(0.0, 1.0);
        const double zm = z(rng);
        const double za = z(rng);
        e.mag_rel += model.sigma_mag_rel * zm;
        e.angle_deg += model.sigma_angle_deg * za;
        break;
    }
    case NoiseKind::Gmm:
        e.mag_rel += draw_mixture(model.gmm_mag, rng);
        e.angle_deg += draw_mixture(model.gmm_angle, rng);
        break;
    case NoiseKind::Quantize:
        e.mag_rel = snap(e.mag_rel, model.quantum_mag_rel);
        e.angle_deg = snap(e.angle_deg, model.quantum_angle_deg);
        break;
    case NoiseKind::Composite:
        for (const auto& child : model.children)
            apply(child, rng, e);
        break;
    }
}

} // namespace

std::string_view to_string(NoiseKind k) noexcept
{
    switch (k) {
    case NoiseKind::None: return "NONE";
    case NoiseKind::Bias: return "BIAS";
    case NoiseKind::Gaussian: return "GAUSSIAN";
    case NoiseKind::Gmm: return "GMM";
    case NoiseKind::Quantize: return "QUANTIZE";
    case NoiseKind::Composite: return "COMPOSITE";
    }
    return "?";
}

NoiseModel NoiseModel::bias(double mag_rel, double angle_deg)
{
    NoiseModel m;
    m.kind = NoiseKind::Bias;
    m.bias_mag_rel = mag_rel;
    m.bias_angle_deg = angle_deg;
    return m;
}

NoiseModel NoiseModel::gaussian(double sigma_mag_rel, double sigma_angle_deg)
{
    NoiseModel m;
    m.kind = NoiseKind::Gaussian;
    m.sigma_mag_rel = sigma_mag_rel;
    m.sigma_angle_deg = sigma_angle_deg;
    return m;
}

NoiseModel NoiseModel::gmm(std::vector<MixtureComponent> mag, std::vector<MixtureComponent> angle)
{
    NoiseModel m;
    m.kind = NoiseKind::Gmm;
    m.gmm_mag = std::move(mag);
    m.gmm_angle = std::move(angle);
    return m;
}

NoiseModel NoiseModel::quantize(double quantum_mag_rel, double quantum_angle_deg)
{
    NoiseModel m;
    m.kind = NoiseKind::Quantize;
    m.quantum_mag_rel = quantum_mag_rel;
    m.quantum_angle_deg = quantum_angle_deg;
    return m;
}

NoiseModel NoiseModel::composite(std::vector<NoiseModel> children)
{
    NoiseModel m;
    m.kind = NoiseKind::Composite;
    m.children = std::move(children);
    return m;
}

void NoiseModel::validate() const
{
    for (double v : {bias_mag_rel, bias_angle_deg, sigma_mag_rel, sigma_angle_deg, quantum_mag_rel, quantum_angle_deg})
        if (!std::isfinite(v))
            throw Error(ErrorCode::InvalidModel, "non-finite noise parameter");
    switch (kind) {
    case NoiseKind::None:
    case NoiseKind::Bias: break;
    case NoiseKind::Gaussian:
        if (sigma_mag_rel < 0.0 || sigma_angle_deg < 0.0)
            throw Error(ErrorCode::InvalidModel, "sigmas must be non-negative");
        break;
    case NoiseKind::Gmm:
        if (gmm_mag.empty() && gmm_angle.empty())
            throw Error(ErrorCode::InvalidModel, "GMM model has no components");
        validate_mixture(gmm_mag);
        validate_mixture(gmm_angle);
        break;
    case NoiseKind::Quantize:
        if (quantum_mag_rel < 0.0 || quantum_angle_deg < 0.0 || (quantum_mag_rel == 0.0 && quantum_angle_deg == 0.0))
            throw Error(ErrorCode::InvalidModel, "QUANTIZE needs a positive quantum");
        break;
    case NoiseKind::Composite:
        for (const auto& c : children)
            c.validate();
        break;
    }
}

ErrorDraw draw_error(const NoiseModel& model, std::uint64_t seed, std::int64_t n)
{
    SplitMix64 rng(derive_seed(seed, kNoiseStream, static_cast<std::uint64_t>(n)));
    ErrorDraw e;
    apply(model, rng, e);
    return e;
}

std::vector<TimeTaggedPhasor> inject_errors(std::span<const TimeTaggedPhasor> series, const NoiseModel& model,
                                            std::uint64_t seed)
{
    model.validate();
    std::vector<TimeTaggedPhasor> out(series.begin(), series.end());
    if (model.kind == NoiseKind::None)
        return out;
    for (auto& p : out) {
        const ErrorDraw e = draw_error(model, seed, p.n);
        p.magnitude *= 1.0 - e.mag_rel;
        p.angle_deg = wrap_degrees(p.angle_deg - e.angle_deg);
    }
    return out;
}

} // namespace synchrocal
