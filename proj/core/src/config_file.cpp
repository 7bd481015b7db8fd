#include "synchrocal/config_file.hpp"

#include "synchrocal/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace synchrocal {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(std::string_view text, std::string_view what)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw Error(ErrorCode::InvalidConfig, "expected a number for " + std::string(what) + ", got '" +
                                                  std::string(text) + "'");
    return v;
}

std::int64_t parse_int(std::string_view text, std::string_view what)
{
    text = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw Error(ErrorCode::InvalidConfig, "expected an integer for " + std::string(what) + ", got '" +
                                                  std::string(text) + "'");
    return v;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

KeyValueFile KeyValueFile::parse(std::string_view text)
{
    KeyValueFile file;
    std::size_t line_no = 0;
    for (std::string_view raw : split(text, '\n')) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value", line_no);
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": empty key", line_no);
        if (!file.entries_.emplace(key, value).second)
            throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": duplicate key " + key, line_no);
    }
    return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end())
        return std::nullopt;
    used_.insert(key);
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const
{
    return get(key).value_or(fallback);
}

double KeyValueFile::get_double(const std::string& key, double fallback) const
{
    const auto v = get(key);
    return v ? parse_double(*v, key) : fallback;
}

std::int64_t KeyValueFile::get_int(const std::string& key, std::int64_t fallback) const
{
    const auto v = get(key);
    return v ? parse_int(*v, key) : fallback;
}

std::uint64_t KeyValueFile::get_uint(const std::string& key, std::uint64_t fallback) const
{
    const auto v = get(key);
    if (!v)
        return fallback;
    const std::string_view t = trim(*v);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw Error(ErrorCode::InvalidConfig, "expected an unsigned integer for " + key);
    return out;
}

std::vector<std::string> KeyValueFile::keys_with_prefix(std::string_view prefix) const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (std::string_view(k).starts_with(prefix))
            out.push_back(k);
    return out;
}

std::vector<std::string> KeyValueFile::unused_keys() const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (!used_.contains(k))
            out.push_back(k);
    return out;
}

} // namespace synchrocal
