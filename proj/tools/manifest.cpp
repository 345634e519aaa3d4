#include "manifest.hpp"

#include <array>
#include <fstream>

#include <json.hpp>
#include <openssl/evp.h>

#include <polyart/errors.hpp>
#include <polyart/version.hpp>

namespace polyart::cli {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for hashing");
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 init failed");
    }
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0) {
            EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got));
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest.data(), &len);
    EVP_MD_CTX_free(ctx);

    static constexpr char hex[] = "0123456789abcdef";
    std::string out = "sha256:";
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

void add_input(RunManifest& m, const std::filesystem::path& path) {
    m.input_digests[path.string()] = sha256_file(path);
}

std::string manifest_to_json(const RunManifest& m) {
    nlohmann::json root;
    root["command"] = m.command;
    root["config"] = m.config;
    root["inputs"] = m.input_digests;
    root["outputs"] = m.outputs;
    root["seed"] = m.seed;
    root["version"] = kVersion;
    return root.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    std::filesystem::path target = path;
    if (path.string().find(".manifest.json") == std::string::npos) {
        target += ".manifest.json";
    }
    std::ofstream out(target, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + target.string() + "' for writing");
    }
    out << manifest_to_json(m);
    if (!out) throw IoError("write failure on '" + target.string() + "'");
}

}  // namespace polyart::cli
