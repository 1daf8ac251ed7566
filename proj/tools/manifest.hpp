#ifndef ALC_TOOLS_MANIFEST_HPP
#define ALC_TOOLS_MANIFEST_HPP

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "alc/alc.hpp"

namespace alc::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* seed_env = "ALC_SEED";
inline constexpr std::uint64_t fallback_seed = 42;

/**
 * Seed used when --seed is absent: $ALC_SEED if set, else 42.
 */
inline std::uint64_t default_seed() {
    if (const char* env = std::getenv(seed_env)) {
        const std::string text(env);
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw InputError(std::string(seed_env) + " must be an unsigned integer, got '" + text + "'");
        }
        return value;
    }
    return fallback_seed;
}

/**
 * Record of one invocation. `args` holds every option with defaults filled
 * in, so `alc rerun` can replay the command exactly.
 */
struct RunManifest {
    std::string command;
    std::vector<std::string> args;
    Json config = Json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double wall_time = 0;

    Json to_json() const {
        Json j;
        j["schema_version"] = 1;
        j["tool"] = "alc";
        j["tool_version"] = alc::version;
        j["command"] = command;
        j["args"] = args;
        j["config"] = config;
        j["seed"] = seed;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["wall_time_seconds"] = wall_time;
        return j;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw InputError("cannot open '" + path + "' for writing");
        }
        out << to_json().dump(2) << '\n';
    }
};

inline std::string manifest_path(const std::string& primary_output) {
    return primary_output + ".manifest.json";
}

/**
 * Command name and argument list stored in a manifest, ready to re-dispatch.
 */
inline std::vector<std::string> load_manifest_args(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open manifest '" + path + "'");
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError("manifest '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.contains("command") || !j.contains("args") || !j["args"].is_array()) {
        throw InputError("manifest '" + path + "' lacks 'command' or 'args'");
    }
    std::vector<std::string> out{j["command"].get<std::string>()};
    for (const auto& a : j["args"]) {
        out.push_back(a.get<std::string>());
    }
    return out;
}

}

#endif
