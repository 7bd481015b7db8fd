#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace synchrocal {

/// Flat `key = value` file. `#` starts a comment line, blank lines are
/// skipped, keys are unique. Lookups remember which keys were read so
/// callers can reject typos via unused_keys().
class KeyValueFile {
public:
    static KeyValueFile parse(std::string_view text);
    static KeyValueFile load(const std::filesystem::path& path);

    bool contains(const std::string& key) const { return entries_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;

    /// Keys starting with `prefix`, in lexical order.
    std::vector<std::string> keys_with_prefix(std::string_view prefix) const;
    std::vector<std::string> unused_keys() const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> used_;
};

double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

} // namespace synchrocal
