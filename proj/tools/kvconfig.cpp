#include "kvconfig.hpp"

#include <charconv>
#include <fstream>

namespace polyart::cli {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

}  // namespace

KvConfig KvConfig::parse(const std::filesystem::path& path,
                         const std::set<std::string>& allowed_keys) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    KvConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!allowed_keys.contains(key)) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        }
        if (!cfg.entries_.emplace(key, value).second) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        }
    }
    return cfg;
}

bool KvConfig::has(const std::string& key) const {
    return entries_.contains(key);
}

std::string KvConfig::get_string(const std::string& key,
                                 const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(it->second.data(),
                        it->second.data() + it->second.size(), v);
    if (ec != std::errc{} || ptr != it->second.data() + it->second.size()) {
        throw ConfigError("config key '" + key + "': '" + it->second +
                          "' is not a number");
    }
    return v;
}

int KvConfig::get_int(const std::string& key, int fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    int v = 0;
    const auto [ptr, ec] =
        std::from_chars(it->second.data(),
                        it->second.data() + it->second.size(), v);
    if (ec != std::errc{} || ptr != it->second.data() + it->second.size()) {
        throw ConfigError("config key '" + key + "': '" + it->second +
                          "' is not an integer");
    }
    return v;
}

std::uint64_t KvConfig::get_u64(const std::string& key,
                                std::uint64_t fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::uint64_t v = 0;
    const auto [ptr, ec] =
        std::from_chars(it->second.data(),
                        it->second.data() + it->second.size(), v);
    if (ec != std::errc{} || ptr != it->second.data() + it->second.size()) {
        throw ConfigError("config key '" + key + "': '" + it->second +
                          "' is not an unsigned integer");
    }
    return v;
}

std::optional<double> KvConfig::get_optional_double(
    const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_double(key, 0.0);
}

}  // namespace polyart::cli
