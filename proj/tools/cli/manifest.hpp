#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace alphacross::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Record of one command invocation; enough to re-run it bit for bit.
struct RunManifest {
    std::string command;          // subcommand path, e.g. "analytic turnover"
    nlohmann::json parameters;    // long option name -> string value, or true for flags
    std::optional<std::uint64_t> seed;
    std::string artifact_version = kVersion;
    std::string timestamp;        // ISO-8601 UTC

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);

    /// Argument vector that reproduces the run (without the program name).
    std::vector<std::string> to_args() const;
};

std::string utc_timestamp();

void write_manifest(const RunManifest& m, const std::filesystem::path& path);
RunManifest read_manifest(const std::filesystem::path& path);

} // namespace alphacross::cli
