#include "synchrocal/angle.hpp"
#include "synchrocal/config_file.hpp"
#include "synchrocal/error.hpp"
#include "synchrocal/ingest.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace synchrocal {

namespace {

constexpr std::array<std::string_view, 5> kRequired{"n", "true_mag", "meas_mag", "true_ang_deg", "meas_ang_deg"};

double cell_double(std::string_view cell, std::size_t line)
{
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+')
        cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": bad number '" + std::string(cell) + "'",
                    line);
    return v;
}

std::int64_t cell_int(std::string_view cell, std::size_t line)
{
    cell = trim(cell);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line) + ": bad index '" + std::string(cell) + "'",
                    line);
    return v;
}

struct Header {
    std::size_t columns = 0;
    std::map<std::string, std::size_t> index;
};

Header read_header(std::string_view line)
{
    Header h;
    const auto cells = split(line, ',');
    h.columns = cells.size();
    for (std::size_t i = 0; i < cells.size(); ++i)
        h.index.emplace(std::string(trim(cells[i])), i);
    return h;
}

std::optional<std::size_t> locate(const Header& h, const ColumnMap& map, std::string_view canonical)
{
    const auto mapped = map.find(std::string(canonical));
    const std::string name = mapped != map.end() ? mapped->second : std::string(canonical);
    const auto it = h.index.find(name);
    if (it == h.index.end())
        return std::nullopt;
    return it->second;
}

// Yields (line number, trimmed line) for every non-comment, non-blank line.
template <typename Fn>
void for_each_data_line(std::string_view text, Fn&& fn)
{
    std::size_t line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        fn(line_no, line);
    }
}

} // namespace

std::vector<CalibratorRecord> parse_calibrator_csv(std::string_view text, const ColumnMap& columns)
{
    if (text.starts_with("\xEF\xBB\xBF"))
        text.remove_prefix(3);

    std::optional<Header> header;
    std::array<std::size_t, 5> col{};
    std::optional<std::size_t> rel_col, ang_col;
    std::vector<CalibratorRecord> out;

    for_each_data_line(text, [&](std::size_t line_no, std::string_view line) {
        if (!header) {
            header = read_header(line);
            for (std::size_t i = 0; i < kRequired.size(); ++i) {
                const auto c = locate(*header, columns, kRequired[i]);
                if (!c)
                    throw Error(ErrorCode::MissingColumn, "missing column " + std::string(kRequired[i]));
                col[i] = *c;
            }
            rel_col = locate(*header, columns, "rel_err_pct");
            ang_col = locate(*header, columns, "ang_err_deg");
            return;
        }
        const auto cells = split(line, ',');
        if (cells.size() != header->columns)
            throw Error(ErrorCode::MalformedRow,
                        "line " + std::to_string(line_no) + ": expected " + std::to_string(header->columns) +
                            " fields, found " + std::to_string(cells.size()),
                        line_no);
        CalibratorRecord r;
        r.n = cell_int(cells[col[0]], line_no);
        r.true_mag = cell_double(cells[col[1]], line_no);
        r.meas_mag = cell_double(cells[col[2]], line_no);
        r.true_ang_deg = cell_double(cells[col[3]], line_no);
        r.meas_ang_deg = cell_double(cells[col[4]], line_no);
        if (rel_col)
            r.rel_err_pct = cell_double(cells[*rel_col], line_no);
        if (ang_col)
            r.ang_err_deg = cell_double(cells[*ang_col], line_no);

        TimeTaggedPhasor truth, meas;
        truth.magnitude = r.true_mag;
        truth.angle_deg = r.true_ang_deg;
        meas.magnitude = r.meas_mag;
        meas.angle_deg = r.meas_ang_deg;
        if (r.rel_err_pct) {
            double recomputed;
            try {
                recomputed = rme(truth, meas);
            } catch (const Error&) {
                throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": zero true magnitude",
                            line_no);
            }
            if (std::abs(recomputed - *r.rel_err_pct) > kConsistencyGateTolerance)
                throw Error(ErrorCode::InconsistentErrorColumns,
                            "line " + std::to_string(line_no) + ": rel_err_pct disagrees with magnitudes", line_no);
        }
        if (r.ang_err_deg) {
            const double diff = std::abs(wrap_degrees(phase_error(truth, meas) - *r.ang_err_deg));
            if (diff > kConsistencyGateTolerance)
                throw Error(ErrorCode::InconsistentErrorColumns,
                            "line " + std::to_string(line_no) + ": ang_err_deg disagrees with angles", line_no);
        }
        out.push_back(r);
    });

    if (!header)
        throw Error(ErrorCode::MissingColumn, "no header row");
    return out;
}

ColumnMap parse_column_map(std::span<const std::string> options)
{
    ColumnMap map;
    for (const std::string& opt : options) {
        const auto eq = opt.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == opt.size())
            throw Error(ErrorCode::InvalidConfig, "column mapping must look like canonical=header: " + opt);
        map[std::string(trim(std::string_view(opt).substr(0, eq)))] =
            std::string(trim(std::string_view(opt).substr(eq + 1)));
    }
    return map;
}

ErrorTable error_table_from_records(std::span<const CalibratorRecord> records, const std::string& test_id)
{
    std::vector<TimeTaggedPhasor> truth, meas;
    truth.reserve(records.size());
    meas.reserve(records.size());
    for (const auto& r : records) {
        TimeTaggedPhasor t, m;
        t.n = m.n = r.n;
        t.magnitude = r.true_mag;
        t.angle_deg = r.true_ang_deg;
        m.magnitude = r.meas_mag;
        m.angle_deg = r.meas_ang_deg;
        truth.push_back(t);
        meas.push_back(m);
    }
    ErrorTable table;
    table.rme = build_error_series(truth, meas, ErrorChannel::RME, test_id);
    table.pe = build_error_series(truth, meas, ErrorChannel::PE, test_id);
    return table;
}

std::string write_error_series_csv(const ErrorTable& table)
{
    const ErrorSeries* lead = table.pe ? &*table.pe : (table.rme ? &*table.rme : nullptr);
    std::string out = "n";
    if (table.rme)
        out += ",rel_err_pct";
    if (table.pe)
        out += ",ang_err_deg";
    out += '\n';
    if (!lead)
        return out;
    if (table.rme && table.pe && table.rme->size() != table.pe->size())
        throw Error(ErrorCode::TimestampMismatch, "RME and PE series differ in length");
    for (std::size_t i = 0; i < lead->size(); ++i) {
        out += std::to_string(lead->values[i].n);
        if (table.rme) {
            if (table.rme->values[i].n != lead->values[i].n)
                throw Error(ErrorCode::TimestampMismatch, "RME and PE series are not aligned");
            out += ',' + format_double(table.rme->values[i].value);
        }
        if (table.pe)
            out += ',' + format_double(table.pe->values[i].value);
        out += '\n';
    }
    return out;
}

ErrorTable parse_error_series_csv(std::string_view text, const std::string& test_id)
{
    std::optional<Header> header;
    std::optional<std::size_t> n_col, rel_col, ang_col;
    ErrorTable table;
    for_each_data_line(text, [&](std::size_t line_no, std::string_view line) {
        if (!header) {
            header = read_header(line);
            n_col = locate(*header, {}, "n");
            rel_col = locate(*header, {}, "rel_err_pct");
            ang_col = locate(*header, {}, "ang_err_deg");
            if (!n_col)
                throw Error(ErrorCode::MissingColumn, "missing column n");
            if (!rel_col && !ang_col)
                throw Error(ErrorCode::MissingColumn, "need rel_err_pct and/or ang_err_deg");
            if (rel_col)
                table.rme = ErrorSeries{test_id, ErrorChannel::RME, {}, {}};
            if (ang_col)
                table.pe = ErrorSeries{test_id, ErrorChannel::PE, {}, {}};
            return;
        }
        const auto cells = split(line, ',');
        if (cells.size() != header->columns)
            throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": wrong field count", line_no);
        const std::int64_t n = cell_int(cells[*n_col], line_no);
        auto push = [&](std::optional<ErrorSeries>& s, std::size_t c) {
            if (!s->values.empty() && n <= s->values.back().n)
                throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": n must increase", line_no);
            s->values.push_back({n, cell_double(cells[c], line_no)});
        };
        if (rel_col)
            push(table.rme, *rel_col);
        if (ang_col)
            push(table.pe, *ang_col);
    });
    if (!header)
        throw Error(ErrorCode::MissingColumn, "no header row");
    return table;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace synchrocal
