#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace plg {

/// INI-style key=value configuration. Keys inside a `[section]` are stored as
/// "section.key"; dotted keys may also be written directly at top level.
/// Lines starting with '#' or ';' are comments, as is the rest of a line after
/// whitespace followed by either character.
class Config {
public:
    static Config parse(std::string_view text);
    static Config load(const std::filesystem::path& path);

    bool has(std::string_view key) const;
    void set(std::string key, std::string value);

    std::string get_string(std::string_view key, std::string_view fallback) const;
    double get_double(std::string_view key, double fallback) const;
    int get_int(std::string_view key, int fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;

    const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return values_; }

    /// Sorted "key=value" lines; stable input for hashing.
    std::string canonical() const;

private:
    std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace plg
