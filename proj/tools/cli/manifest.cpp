#include "manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "alphacross/error.hpp"

namespace alphacross::cli {

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["parameters"] = parameters.is_null() ? nlohmann::json::object() : parameters;
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    j["artifact_version"] = artifact_version;
    j["timestamp"] = timestamp;
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.parameters = j.at("parameters");
        if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
        m.artifact_version = j.at("artifact_version").get<std::string>();
        m.timestamp = j.value("timestamp", "");
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("manifest: ") + e.what());
    }
    if (!m.parameters.is_object()) throw InputError("manifest: parameters must be an object");
    return m;
}

std::vector<std::string> RunManifest::to_args() const {
    std::vector<std::string> args;
    std::istringstream words(command);
    for (std::string w; words >> w;) args.push_back(w);
    for (const auto& [name, value] : parameters.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + name);
            continue;
        }
        args.push_back("--" + name);
        args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
    return args;
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write manifest '" + path.string() + "'");
    out << m.to_json().dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open manifest '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("manifest '" + path.string() + "': " + e.what());
    }
    return RunManifest::from_json(j);
}

} // namespace alphacross::cli
