#include "plg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "plg/error.hpp"
#include "plg/imageio.hpp"

namespace plg {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Config Config::parse(std::string_view text) {
    Config cfg;
    std::string section;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("config line " + std::to_string(line_no) + ": unterminated section");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        std::string_view value = line.substr(eq + 1);
        for (std::size_t i = 1; i < value.size(); ++i)
            if ((value[i] == '#' || value[i] == ';') && std::isspace(static_cast<unsigned char>(value[i - 1]))) {
                value = value.substr(0, i);
                break;
            }
        cfg.set(std::move(key), std::string(trim(value)));
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    try {
        return parse(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

bool Config::has(std::string_view key) const { return values_.find(key) != values_.end(); }

void Config::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

std::string Config::get_string(std::string_view key, std::string_view fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? std::string(fallback) : it->second;
}

double Config::get_double(std::string_view key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0;
    const auto& s = it->second;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError("config key '" + std::string(key) + "': '" + s + "' is not a number");
    return v;
}

int Config::get_int(std::string_view key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    int v = 0;
    const auto& s = it->second;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError("config key '" + std::string(key) + "': '" + s + "' is not an integer");
    return v;
}

bool Config::get_bool(std::string_view key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string s = it->second;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ParseError("config key '" + std::string(key) + "': '" + it->second + "' is not a boolean");
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

}  // namespace plg
