#include "synchrocal/angle.hpp"
#include "synchrocal/config_file.hpp"
#include "synchrocal/error.hpp"
#include "synchrocal/ingest.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace synchrocal {

namespace {

constexpr std::uint8_t kSyncLead = 0xAA;
constexpr std::uint8_t kDataFrameSync = 0x01; // frame type 000, version 1
constexpr std::uint8_t kFrameTypeMask = 0x70;
constexpr std::size_t kHeaderBytes = 16;      // SYNC .. STAT
constexpr double kAngleLsbPerRad = 1e4;

class Writer {
public:
    explicit Writer(std::size_t reserve) { bytes_.reserve(reserve); }

    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v)
    {
        bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
        bytes_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }
    void u32(std::uint32_t v)
    {
        u16(static_cast<std::uint16_t>(v >> 16));
        u16(static_cast<std::uint16_t>(v & 0xFFFF));
    }
    void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

    std::vector<std::uint8_t>& bytes() { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint16_t u16()
    {
        const auto v = static_cast<std::uint16_t>((bytes_[pos_] << 8) | bytes_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32()
    {
        const std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }
    std::int16_t i16() { return static_cast<std::int16_t>(u16()); }
    float f32() { return std::bit_cast<float>(u32()); }
    void skip(std::size_t n) { pos_ += n; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::int16_t to_i16(double v, const char* what)
{
    const double r = std::round(v);
    if (!std::isfinite(r) || r < std::numeric_limits<std::int16_t>::min() || r > std::numeric_limits<std::int16_t>::max())
        throw Error(ErrorCode::ValueOutOfRange, std::string(what) + " does not fit a 16-bit signed field");
    return static_cast<std::int16_t>(r);
}

std::uint16_t to_u16(double v, const char* what)
{
    const double r = std::round(v);
    if (!std::isfinite(r) || r < 0.0 || r > std::numeric_limits<std::uint16_t>::max())
        throw Error(ErrorCode::ValueOutOfRange, std::string(what) + " does not fit a 16-bit unsigned field");
    return static_cast<std::uint16_t>(r);
}

float to_f32(double v, const char* what)
{
    if (!std::isfinite(v) || std::abs(v) > std::numeric_limits<float>::max())
        throw Error(ErrorCode::ValueOutOfRange, std::string(what) + " does not fit a float32 field");
    return static_cast<float>(v);
}

std::size_t phasor_bytes(PhasorFormat f)
{
    return (f == PhasorFormat::RectInt16 || f == PhasorFormat::PolarInt16) ? 4 : 8;
}

std::size_t number_bytes(NumberFormat f)
{
    return f == NumberFormat::Int16 ? 2 : 4;
}

PhasorFormat parse_phasor_format(std::string_view s)
{
    if (s == "RECT_INT16")
        return PhasorFormat::RectInt16;
    if (s == "POLAR_INT16")
        return PhasorFormat::PolarInt16;
    if (s == "RECT_FLOAT32")
        return PhasorFormat::RectFloat32;
    if (s == "POLAR_FLOAT32")
        return PhasorFormat::PolarFloat32;
    throw Error(ErrorCode::InvalidConfig, "unknown phasor_format " + std::string(s));
}

NumberFormat parse_number_format(std::string_view s)
{
    if (s == "INT16")
        return NumberFormat::Int16;
    if (s == "FLOAT32")
        return NumberFormat::Float32;
    throw Error(ErrorCode::InvalidConfig, "unknown number format " + std::string(s));
}

} // namespace

std::string_view to_string(PhasorFormat f) noexcept
{
    switch (f) {
    case PhasorFormat::RectInt16: return "RECT_INT16";
    case PhasorFormat::PolarInt16: return "POLAR_INT16";
    case PhasorFormat::RectFloat32: return "RECT_FLOAT32";
    case PhasorFormat::PolarFloat32: return "POLAR_FLOAT32";
    }
    return "?";
}

std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes) noexcept
{
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t b : bytes) {
        std::uint16_t t = static_cast<std::uint16_t>((crc >> 8) ^ b);
        t ^= static_cast<std::uint16_t>(t >> 4);
        crc = static_cast<std::uint16_t>((crc << 8) ^ (t << 12) ^ (t << 5) ^ t);
    }
    return crc;
}

double FrameConfig::scale_for(std::size_t phasor) const
{
    if (phasor_scale.empty())
        return 1.0;
    return phasor_scale.size() == 1 ? phasor_scale.front() : phasor_scale.at(phasor);
}

std::size_t FrameConfig::frame_size() const
{
    return kHeaderBytes + num_phasors * phasor_bytes(phasor_format) + 2 * number_bytes(freq_format) +
           num_analogs * number_bytes(analog_format) + num_digitals * 2 + 2;
}

void FrameConfig::validate() const
{
    if (phasor_scale.size() > 1 && phasor_scale.size() != num_phasors)
        throw Error(ErrorCode::InvalidConfig, "phasor_scale needs one value or one per phasor");
    if (phasor_format == PhasorFormat::RectInt16 || phasor_format == PhasorFormat::PolarInt16)
        for (double s : phasor_scale)
            if (!(s > 0.0))
                throw Error(ErrorCode::InvalidConfig, "integer phasor formats need positive scale factors");
    if (time_base == 0 || time_base > 0xFFFFFF)
        throw Error(ErrorCode::InvalidConfig, "time_base must be in 1 .. 2^24 - 1");
    if (frame_size() > 0xFFFF)
        throw Error(ErrorCode::InvalidConfig, "frame too large");
    if (!(data_rate > 0.0) || !(nominal_frequency > 0.0))
        throw Error(ErrorCode::InvalidConfig, "data_rate and nominal_frequency must be positive");
}

FrameConfig FrameConfig::from_text(std::string_view text)
{
    const KeyValueFile kv = KeyValueFile::parse(text);
    FrameConfig c;
    const auto id = kv.get_uint("id_code", c.id_code);
    if (id > 0xFFFF)
        throw Error(ErrorCode::InvalidConfig, "id_code must fit 16 bits");
    c.id_code = static_cast<std::uint16_t>(id);
    c.num_phasors = kv.get_uint("num_phasors", c.num_phasors);
    if (auto f = kv.get("phasor_format"))
        c.phasor_format = parse_phasor_format(*f);
    if (auto s = kv.get("phasor_scale")) {
        c.phasor_scale.clear();
        for (auto part : split(*s, ','))
            c.phasor_scale.push_back(parse_double(part, "phasor_scale"));
    }
    if (auto f = kv.get("freq_format"))
        c.freq_format = parse_number_format(*f);
    c.num_analogs = kv.get_uint("num_analogs", c.num_analogs);
    if (auto f = kv.get("analog_format"))
        c.analog_format = parse_number_format(*f);
    c.num_digitals = kv.get_uint("num_digitals", c.num_digitals);
    c.nominal_frequency = kv.get_double("nominal_frequency", c.nominal_frequency);
    c.time_base = static_cast<std::uint32_t>(kv.get_uint("time_base", c.time_base));
    c.data_rate = kv.get_double("data_rate", c.data_rate);
    if (const auto unused = kv.unused_keys(); !unused.empty())
        throw Error(ErrorCode::InvalidConfig, "unknown frame config key " + unused.front());
    c.validate();
    return c;
}

FrameConfig FrameConfig::load(const std::filesystem::path& path)
{
    return from_text(read_text_file(path));
}

std::vector<std::uint8_t> encode_data_frame(const DataFrame& frame, const FrameConfig& config)
{
    config.validate();
    if (frame.phasors.size() != config.num_phasors || frame.analogs.size() != config.num_analogs ||
        frame.digitals.size() != config.num_digitals)
        throw Error(ErrorCode::ValueOutOfRange, "frame field counts do not match the configuration");
    if (frame.fracsec > 0xFFFFFF)
        throw Error(ErrorCode::ValueOutOfRange, "fraction of second exceeds 24 bits");

    const std::size_t size = config.frame_size();
    Writer w(size);
    w.u8(kSyncLead);
    w.u8(kDataFrameSync);
    w.u16(static_cast<std::uint16_t>(size));
    w.u16(config.id_code);
    w.u32(frame.soc);
    w.u32((static_cast<std::uint32_t>(frame.time_quality) << 24) | frame.fracsec);
    w.u16(frame.stat);

    for (std::size_t i = 0; i < frame.phasors.size(); ++i) {
        const PhasorValue& p = frame.phasors[i];
        const double rad = deg_to_rad(p.angle_deg);
        const double scale = config.scale_for(i);
        switch (config.phasor_format) {
        case PhasorFormat::RectInt16:
            w.i16(to_i16(p.magnitude * std::cos(rad) / scale, "phasor real part"));
            w.i16(to_i16(p.magnitude * std::sin(rad) / scale, "phasor imaginary part"));
            break;
        case PhasorFormat::PolarInt16:
            w.u16(to_u16(p.magnitude / scale, "phasor magnitude"));
            w.i16(to_i16(rad * kAngleLsbPerRad, "phasor angle"));
            break;
        case PhasorFormat::RectFloat32:
            w.f32(to_f32(p.magnitude * std::cos(rad), "phasor real part"));
            w.f32(to_f32(p.magnitude * std::sin(rad), "phasor imaginary part"));
            break;
        case PhasorFormat::PolarFloat32:
            w.f32(to_f32(p.magnitude, "phasor magnitude"));
            w.f32(to_f32(rad, "phasor angle"));
            break;
        }
    }

    if (config.freq_format == NumberFormat::Int16) {
        w.i16(to_i16((frame.freq - config.nominal_frequency) * 1000.0, "frequency deviation"));
        w.i16(to_i16(frame.dfreq * 100.0, "ROCOF"));
    } else {
        w.f32(to_f32(frame.freq, "frequency"));
        w.f32(to_f32(frame.dfreq, "ROCOF"));
    }
    for (double a : frame.analogs) {
        if (config.analog_format == NumberFormat::Int16)
            w.i16(to_i16(a, "analog value"));
        else
            w.f32(to_f32(a, "analog value"));
    }
    for (std::uint16_t d : frame.digitals)
        w.u16(d);

    w.u16(crc16_ccitt(w.bytes()));
    return std::move(w.bytes());
}

DataFrame decode_data_frame(std::span<const std::uint8_t> bytes, const FrameConfig& config)
{
    if (bytes.size() < 2)
        throw Error(ErrorCode::BadLength, "frame shorter than the sync word");
    if (bytes[0] != kSyncLead || (bytes[1] & kFrameTypeMask) != 0)
        throw Error(ErrorCode::BadSync, "not a data frame sync word");
    if (bytes.size() < kHeaderBytes + 2)
        throw Error(ErrorCode::BadLength, "frame shorter than the fixed header");
    const auto declared = static_cast<std::size_t>((bytes[2] << 8) | bytes[3]);
    if (declared != bytes.size() || declared != config.frame_size())
        throw Error(ErrorCode::BadLength, "FRAMESIZE " + std::to_string(declared) + ", have " +
                                              std::to_string(bytes.size()) + " bytes, configuration expects " +
                                              std::to_string(config.frame_size()));
    const auto stored_crc = static_cast<std::uint16_t>((bytes[declared - 2] << 8) | bytes[declared - 1]);
    if (crc16_ccitt(bytes.first(declared - 2)) != stored_crc)
        throw Error(ErrorCode::BadCrc, "checksum mismatch");

    Reader r(bytes);
    r.skip(4);
    DataFrame f;
    f.crc_ok = true;
    f.id_code = r.u16();
    if (f.id_code != config.id_code)
        throw Error(ErrorCode::IdCodeMismatch, "IDCODE " + std::to_string(f.id_code) + " but configuration has " +
                                                   std::to_string(config.id_code));
    f.soc = r.u32();
    const std::uint32_t frac = r.u32();
    f.time_quality = static_cast<std::uint8_t>(frac >> 24);
    f.fracsec = frac & 0xFFFFFF;
    f.stat = r.u16();

    f.phasors.reserve(config.num_phasors);
    for (std::size_t i = 0; i < config.num_phasors; ++i) {
        const double scale = config.scale_for(i);
        double mag = 0.0, rad = 0.0;
        switch (config.phasor_format) {
        case PhasorFormat::RectInt16: {
            const double re = r.i16() * scale;
            const double im = r.i16() * scale;
            mag = std::hypot(re, im);
            rad = std::atan2(im, re);
            break;
        }
        case PhasorFormat::PolarInt16:
            mag = r.u16() * scale;
            rad = r.i16() / kAngleLsbPerRad;
            break;
        case PhasorFormat::RectFloat32: {
            const double re = r.f32();
            const double im = r.f32();
            mag = std::hypot(re, im);
            rad = std::atan2(im, re);
            break;
        }
        case PhasorFormat::PolarFloat32:
            mag = r.f32();
            rad = r.f32();
            break;
        }
        f.phasors.push_back({mag, wrap_degrees(rad_to_deg(rad))});
    }

    if (config.freq_format == NumberFormat::Int16) {
        f.freq = config.nominal_frequency + r.i16() / 1000.0;
        f.dfreq = r.i16() / 100.0;
    } else {
        f.freq = r.f32();
        f.dfreq = r.f32();
    }
    for (std::size_t i = 0; i < config.num_analogs; ++i)
        f.analogs.push_back(config.analog_format == NumberFormat::Int16 ? static_cast<double>(r.i16())
                                                                        : static_cast<double>(r.f32()));
    for (std::size_t i = 0; i < config.num_digitals; ++i)
        f.digitals.push_back(r.u16());
    return f;
}

std::vector<DataFrame> decode_frame_stream(std::span<const std::uint8_t> bytes, const FrameConfig& config)
{
    std::vector<DataFrame> frames;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const auto rest = bytes.subspan(pos);
        if (rest.size() < 4)
            throw Error(ErrorCode::BadLength, "truncated frame at byte " + std::to_string(pos));
        const auto declared = static_cast<std::size_t>((rest[2] << 8) | rest[3]);
        if (declared < kHeaderBytes + 2 || declared > rest.size())
            throw Error(ErrorCode::BadLength, "bad FRAMESIZE at byte " + std::to_string(pos));
        frames.push_back(decode_data_frame(rest.first(declared), config));
        pos += declared;
    }
    return frames;
}

} // namespace synchrocal
