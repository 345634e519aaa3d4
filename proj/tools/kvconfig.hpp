#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

#include <polyart/errors.hpp>

namespace polyart::cli {

/// Minimal `key = value` config file: one pair per line, '#' comments,
/// blank lines ignored. Keys must come from the allowed set handed to
/// `parse` (typos fail loudly).
class KvConfig {
  public:
    static KvConfig parse(const std::filesystem::path& path,
                          const std::set<std::string>& allowed_keys);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key,
                          std::uint64_t fallback) const;
    std::optional<double> get_optional_double(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const {
        return entries_;
    }

  private:
    std::map<std::string, std::string> entries_;
};

}  // namespace polyart::cli
