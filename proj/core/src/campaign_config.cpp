#include "synchrocal/campaign.hpp"
#include "synchrocal/config_file.hpp"
#include "synchrocal/error.hpp"

#include <sstream>

namespace synchrocal {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<Enum, N>& values, std::string_view key)
{
    for (Enum v : values)
        if (to_string(v) == text)
            return v;
    throw Error(ErrorCode::InvalidConfig, "unknown value '" + std::string(text) + "' for " + std::string(key));
}

constexpr std::array kTests{TestType::AM, TestType::PM, TestType::FrUp, TestType::FrDown, TestType::Steady};
constexpr std::array kClasses{PmuClass::P, PmuClass::M};
constexpr std::array kProfiles{ProfileClass::P, ProfileClass::M, ProfileClass::Ideal};
constexpr std::array kShapes{WindowShape::Rectangular, WindowShape::Triangular, WindowShape::Hann};
constexpr std::array kKinds{NoiseKind::None,     NoiseKind::Bias,     NoiseKind::Gaussian,
                            NoiseKind::Gmm,      NoiseKind::Quantize, NoiseKind::Composite};

std::vector<MixtureComponent> parse_mixture(std::string_view text, const std::string& key)
{
    std::vector<MixtureComponent> out;
    if (trim(text).empty())
        return out;
    for (auto item : split(text, ',')) {
        const auto parts = split(trim(item), ':');
        if (parts.size() != 3)
            throw Error(ErrorCode::InvalidConfig, key + ": components are weight:mean:std");
        out.push_back({parse_double(parts[0], key), parse_double(parts[1], key), parse_double(parts[2], key)});
    }
    return out;
}

std::string format_mixture(const std::vector<MixtureComponent>& comps)
{
    std::string out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i)
            out += ", ";
        out += format_double(comps[i].weight) + ':' + format_double(comps[i].mean) + ':' +
               format_double(comps[i].std_dev);
    }
    return out;
}

NoiseModel read_noise(const KeyValueFile& kv, const std::string& prefix)
{
    NoiseModel m;
    if (auto k = kv.get(prefix + ".kind"))
        m.kind = parse_enum(*k, kKinds, prefix + ".kind");
    m.bias_mag_rel = kv.get_double(prefix + ".bias_mag_rel", 0.0);
    m.bias_angle_deg = kv.get_double(prefix + ".bias_angle_deg", 0.0);
    m.sigma_mag_rel = kv.get_double(prefix + ".sigma_mag_rel", 0.0);
    m.sigma_angle_deg = kv.get_double(prefix + ".sigma_angle_deg", 0.0);
    if (auto g = kv.get(prefix + ".gmm_mag"))
        m.gmm_mag = parse_mixture(*g, prefix + ".gmm_mag");
    if (auto g = kv.get(prefix + ".gmm_angle"))
        m.gmm_angle = parse_mixture(*g, prefix + ".gmm_angle");
    m.quantum_mag_rel = kv.get_double(prefix + ".quantum_mag_rel", 0.0);
    m.quantum_angle_deg = kv.get_double(prefix + ".quantum_angle_deg", 0.0);
    for (std::size_t i = 0;; ++i) {
        const std::string child = prefix + ".children." + std::to_string(i);
        if (!kv.contains(child + ".kind"))
            break;
        m.children.push_back(read_noise(kv, child));
    }
    return m;
}

void write_noise(std::ostringstream& out, const NoiseModel& m, const std::string& prefix)
{
    out << prefix << ".kind = " << to_string(m.kind) << '\n';
    auto num = [&](const char* key, double v) {
        if (v != 0.0)
            out << prefix << '.' << key << " = " << format_double(v) << '\n';
    };
    num("bias_mag_rel", m.bias_mag_rel);
    num("bias_angle_deg", m.bias_angle_deg);
    num("sigma_mag_rel", m.sigma_mag_rel);
    num("sigma_angle_deg", m.sigma_angle_deg);
    if (!m.gmm_mag.empty())
        out << prefix << ".gmm_mag = " << format_mixture(m.gmm_mag) << '\n';
    if (!m.gmm_angle.empty())
        out << prefix << ".gmm_angle = " << format_mixture(m.gmm_angle) << '\n';
    num("quantum_mag_rel", m.quantum_mag_rel);
    num("quantum_angle_deg", m.quantum_angle_deg);
    for (std::size_t i = 0; i < m.children.size(); ++i)
        write_noise(out, m.children[i], prefix + ".children." + std::to_string(i));
}

} // namespace

void CampaignConfig::validate() const
{
    if (repeats < 1)
        throw Error(ErrorCode::InvalidConfig, "repeats must be at least 1");
    if (target_samples == 0 || target_samples % repeats != 0)
        throw Error(ErrorCode::InvalidConfig, "target_samples must be a positive multiple of repeats");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
    if (gmm_k_max < 1)
        throw Error(ErrorCode::InvalidConfig, "gmm_k_max must be at least 1");
    TestSignalSpec s = spec;
    s.duration_s = static_cast<double>(reports_per_repeat()) / spec.report_rate;
    s.validate();
    profile.validate(spec.sample_rate);
    if (profile.pmu_class != ProfileClass::Ideal && profile.reference_frequency != spec.f0)
        throw Error(ErrorCode::InvalidProfile, "estimator reference frequency must equal f0");
    noise.validate();
}

std::string CampaignConfig::to_text() const
{
    std::ostringstream out;
    out << "# synchrocal campaign configuration\n";
    out << "test = " << to_string(spec.test) << '\n';
    out << "pmu_class = " << to_string(spec.pmu_class) << '\n';
    out << "x_m = " << format_double(spec.x_m) << '\n';
    out << "f0 = " << format_double(spec.f0) << '\n';
    out << "k_x = " << format_double(spec.k_x) << '\n';
    out << "k_a = " << format_double(spec.k_a) << '\n';
    out << "f_mod = " << format_double(spec.f_mod) << '\n';
    out << "r_f = " << format_double(spec.r_f) << '\n';
    out << "report_rate = " << format_double(spec.report_rate) << '\n';
    out << "sample_rate = " << format_double(spec.sample_rate) << '\n';
    out << "profile.class = " << to_string(profile.pmu_class) << '\n';
    out << "profile.window_cycles = " << format_double(profile.window_cycles) << '\n';
    out << "profile.window_shape = " << to_string(profile.window_shape) << '\n';
    write_noise(out, noise, "noise");
    out << "repeats = " << repeats << '\n';
    out << "target_samples = " << target_samples << '\n';
    out << "alpha = " << format_double(alpha) << '\n';
    out << "gmm_k_max = " << gmm_k_max << '\n';
    if (!output_dir.empty())
        out << "output_dir = " << output_dir << '\n';
    out << "seed = " << seed << '\n';
    out << "consistency.min_p_value = " << format_double(consistency.min_p_value) << '\n';
    out << "consistency.min_range_overlap = " << format_double(consistency.min_range_overlap) << '\n';
    return out.str();
}

CampaignConfig CampaignConfig::from_text(std::string_view text)
{
    const KeyValueFile kv = KeyValueFile::parse(text);
    CampaignConfig c;

    const TestType test = parse_enum(kv.get_string("test", "STEADY"), kTests, "test");
    const PmuClass cls = parse_enum(kv.get_string("pmu_class", "P"), kClasses, "pmu_class");
    TestSignalSpec s = TestSignalSpec::for_test(test, cls);
    s.x_m = kv.get_double("x_m", s.x_m);
    s.f0 = kv.get_double("f0", s.f0);
    s.k_x = kv.get_double("k_x", s.k_x);
    s.k_a = kv.get_double("k_a", s.k_a);
    s.f_mod = kv.get_double("f_mod", s.f_mod);
    s.r_f = kv.get_double("r_f", s.r_f);
    s.report_rate = kv.get_double("report_rate", s.report_rate);
    s.sample_rate = kv.get_double("sample_rate", s.sample_rate);

    // Profile defaults to the reference filter of the declared PMU class.
    const ProfileClass pc =
        parse_enum(kv.get_string("profile.class", std::string(to_string(cls))), kProfiles, "profile.class");
    c.profile = EstimatorProfile::for_class(pc, s.f0);
    c.profile.window_cycles = kv.get_double("profile.window_cycles", c.profile.window_cycles);
    if (auto w = kv.get("profile.window_shape"))
        c.profile.window_shape = parse_enum(*w, kShapes, "profile.window_shape");

    c.noise = read_noise(kv, "noise");
    c.repeats = static_cast<std::size_t>(kv.get_uint("repeats", c.repeats));
    c.target_samples = static_cast<std::size_t>(kv.get_uint("target_samples", c.target_samples));
    c.alpha = kv.get_double("alpha", c.alpha);
    c.gmm_k_max = static_cast<std::size_t>(kv.get_uint("gmm_k_max", c.gmm_k_max));
    c.output_dir = kv.get_string("output_dir", "");
    c.seed = kv.get_uint("seed", 0);
    c.consistency.min_p_value = kv.get_double("consistency.min_p_value", c.consistency.min_p_value);
    c.consistency.min_range_overlap = kv.get_double("consistency.min_range_overlap", c.consistency.min_range_overlap);

    if (const auto unused = kv.unused_keys(); !unused.empty())
        throw Error(ErrorCode::InvalidConfig, "unknown configuration key " + unused.front());
    if (c.repeats == 0)
        throw Error(ErrorCode::InvalidConfig, "repeats must be at least 1");

    s.seed = c.seed;
    s.duration_s = static_cast<double>(c.target_samples / c.repeats) / s.report_rate;
    c.spec = s;
    c.validate();
    return c;
}

CampaignConfig CampaignConfig::load(const std::filesystem::path& path)
{
    return from_text(read_text_file(path));
}

} // namespace synchrocal
