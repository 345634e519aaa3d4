#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace polyart::cli {

/// Provenance record written alongside every report artifact: the
/// command, its resolved configuration, content digests of the inputs,
/// the seed and the tool version. Contains nothing time-dependent, so
/// repeated runs produce byte-identical manifests.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::map<std::string, std::string> input_digests;  // path -> sha256:<hex>
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
};

std::string sha256_file(const std::filesystem::path& path);

void add_input(RunManifest& m, const std::filesystem::path& path);

std::string manifest_to_json(const RunManifest& m);

/// Writes `<report_path>.manifest.json` (or `path` verbatim when it
/// already ends in .manifest.json).
void write_manifest(const RunManifest& m, const std::filesystem::path& path);

}  // namespace polyart::cli
