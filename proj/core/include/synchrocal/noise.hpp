#pragma once

#include "synchrocal/signals.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace synchrocal {

enum class NoiseKind { None, Bias, Gaussian, Gmm, Quantize, Composite };

std::string_view to_string(NoiseKind k) noexcept;

struct MixtureComponent {
    double weight = 1.0;
    double mean = 0.0;
    double std_dev = 0.0;

    bool operator==(const MixtureComponent&) const = default;
};

/// Phasor-level error model. Every parameter describes the error as the
/// metrics report it (true minus measured): a relative magnitude error e_mag
/// (unitless, RME = 100 * e_mag) and an angle error e_ang in degrees.
/// COMPOSITE applies its children in order to the running error draw, so a
/// trailing QUANTIZE snaps everything accumulated before it.
struct NoiseModel {
    NoiseKind kind = NoiseKind::None;
    double bias_mag_rel = 0.0;
    double bias_angle_deg = 0.0;
    double sigma_mag_rel = 0.0;
    double sigma_angle_deg = 0.0;
    std::vector<MixtureComponent> gmm_mag;
    std::vector<MixtureComponent> gmm_angle;
    double quantum_mag_rel = 0.0;
    double quantum_angle_deg = 0.0;
    std::vector<NoiseModel> children;

    static NoiseModel none() { return {}; }
    static NoiseModel bias(double mag_rel, double angle_deg);
    static NoiseModel gaussian(double sigma_mag_rel, double sigma_angle_deg);
    static NoiseModel gmm(std::vector<MixtureComponent> mag, std::vector<MixtureComponent> angle);
    static NoiseModel quantize(double quantum_mag_rel, double quantum_angle_deg);
    static NoiseModel composite(std::vector<NoiseModel> children);

    /// Throws Error(InvalidModel).
    void validate() const;

    bool operator==(const NoiseModel&) const = default;
};

struct ErrorDraw {
    double mag_rel = 0.0;
    double angle_deg = 0.0;
};

/// Error drawn for report index n. Depends only on (model, seed, n).
ErrorDraw draw_error(const NoiseModel& model, std::uint64_t seed, std::int64_t n);

/// measured.magnitude = true.magnitude * (1 - e_mag); measured.angle = wrap(true.angle - e_ang).
std::vector<TimeTaggedPhasor> inject_errors(std::span<const TimeTaggedPhasor> series, const NoiseModel& model,
                                            std::uint64_t seed);

} // namespace synchrocal
