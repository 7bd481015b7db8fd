#pragma once

#include "synchrocal/metrics.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synchrocal {

// ---------------------------------------------------------------- calibrator CSV
//
// Canonical header: n,true_mag,meas_mag,true_ang_deg,meas_ang_deg[,rel_err_pct,ang_err_deg]
// Lines starting with '#' are comments; extra columns are ignored.

struct CalibratorRecord {
    std::int64_t n = 0;
    double true_mag = 0.0;
    double meas_mag = 0.0;
    double true_ang_deg = 0.0;
    double meas_ang_deg = 0.0;
    std::optional<double> rel_err_pct;
    std::optional<double> ang_err_deg;
};

/// Canonical column name -> header text used in the file.
using ColumnMap = std::map<std::string, std::string>;

/// Tolerance of the precomputed-error consistency gate.
inline constexpr double kConsistencyGateTolerance = 1e-6;

/// Throws MissingColumn, MalformedRow(line) and InconsistentErrorColumns(line).
std::vector<CalibratorRecord> parse_calibrator_csv(std::string_view text, const ColumnMap& columns = {});

/// Parses `canonical=header` mapping options.
ColumnMap parse_column_map(std::span<const std::string> options);

struct ErrorTable {
    std::optional<ErrorSeries> rme;
    std::optional<ErrorSeries> pe;
};

/// Recomputes RME and PE from the raw true/measured columns.
ErrorTable error_table_from_records(std::span<const CalibratorRecord> records, const std::string& test_id = {});

/// ErrorSeries CSV: n,rel_err_pct,ang_err_deg (either error column may be absent).
std::string write_error_series_csv(const ErrorTable& table);
ErrorTable parse_error_series_csv(std::string_view text, const std::string& test_id = {});

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

// ---------------------------------------------------------------- data frames
//
// Big-endian layout: SYNC(2) FRAMESIZE(2) IDCODE(2) SOC(4) FRACSEC(4) STAT(2)
// PHASORS FREQ DFREQ ANALOG DIGITAL CHK(2). SYNC is 0xAA then a byte whose
// bits 6-4 are 000 (data frame). CHK is crc16_ccitt over every preceding byte.

enum class PhasorFormat { RectInt16, PolarInt16, RectFloat32, PolarFloat32 };
enum class NumberFormat { Int16, Float32 };

std::string_view to_string(PhasorFormat f) noexcept;

struct FrameConfig {
    std::uint16_t id_code = 1;
    std::size_t num_phasors = 1;
    PhasorFormat phasor_format = PhasorFormat::PolarFloat32;
    /// Per-phasor magnitude per LSB for integer formats (one value applies to all).
    std::vector<double> phasor_scale{1.0};
    NumberFormat freq_format = NumberFormat::Float32;
    std::size_t num_analogs = 0;
    NumberFormat analog_format = NumberFormat::Float32;
    std::size_t num_digitals = 0;
    double nominal_frequency = 60.0;
    std::uint32_t time_base = 1'000'000;
    double data_rate = 30.0;

    double scale_for(std::size_t phasor) const;
    std::size_t frame_size() const;
    void validate() const;

    /// Keys: id_code, num_phasors, phasor_format, phasor_scale (comma list),
    /// freq_format, num_analogs, analog_format, num_digitals,
    /// nominal_frequency, time_base, data_rate.
    static FrameConfig from_text(std::string_view text);
    static FrameConfig load(const std::filesystem::path& path);
};

struct PhasorValue {
    double magnitude = 0.0; ///< RMS
    double angle_deg = 0.0;
};

struct DataFrame {
    std::uint16_t id_code = 0;
    std::uint32_t soc = 0;
    std::uint32_t fracsec = 0;     ///< 24-bit fraction of a second in time_base units
    std::uint8_t time_quality = 0; ///< top byte of the FRACSEC word
    std::uint16_t stat = 0;
    std::vector<PhasorValue> phasors;
    double freq = 0.0;  ///< Hz
    double dfreq = 0.0; ///< Hz/s
    std::vector<double> analogs;
    std::vector<std::uint16_t> digitals;
    bool crc_ok = false;

    double timestamp(std::uint32_t time_base) const
    {
        return static_cast<double>(soc) + static_cast<double>(fracsec) / static_cast<double>(time_base);
    }
};

/// CRC-CCITT: polynomial 0x1021, initial value 0xFFFF, no reflection, no final XOR.
std::uint16_t crc16_ccitt(std::span<const std::uint8_t> bytes) noexcept;

/// Throws ValueOutOfRange when a field does not fit the configured format.
std::vector<std::uint8_t> encode_data_frame(const DataFrame& frame, const FrameConfig& config);

/// Throws BadSync, BadLength, BadCrc, IdCodeMismatch.
DataFrame decode_data_frame(std::span<const std::uint8_t> bytes, const FrameConfig& config);

/// Decodes back-to-back frames (a capture file).
std::vector<DataFrame> decode_frame_stream(std::span<const std::uint8_t> bytes, const FrameConfig& config);

} // namespace synchrocal
