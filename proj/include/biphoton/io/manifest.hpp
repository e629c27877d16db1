#pragma once

// Run manifest: the config (echoed verbatim), its hash, seed and tool
// version — enough to reproduce every output byte.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "biphoton/io/config.hpp"
#include "biphoton/io/csv.hpp"
#include "biphoton/version.hpp"

namespace biphoton::io {

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char byte : data) {
        hash ^= byte;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

inline std::string config_hash(const json& config) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(config.dump())));
    return buf;
}

inline void write_manifest(const std::filesystem::path& dir, const std::string& command,
                           const CampaignConfig& config) {
    const json cfg = to_json(config);
    json manifest;
    manifest["schema"] = 1;
    manifest["tool"] = kToolName;
    manifest["tool_version"] = kVersion;
    manifest["command"] = command;
    manifest["seed"] = config.seed;
    manifest["config_hash"] = config_hash(cfg);
    manifest["config"] = cfg;
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace biphoton::io
