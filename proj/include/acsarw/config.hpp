#pragma once

// JSON ingestion: run configuration and dropout schedules. Key sets are
// closed — unknown keys are rejected so that typos ("X_Delta") fail loudly
// instead of silently running with defaults.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "acsarw/params.hpp"

namespace acsarw {

namespace detail {

inline std::uint64_t get_uint(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number_unsigned())
        throw ConfigError("config key \"" + key + "\" must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::uint32_t get_u32(const nlohmann::json& j, const std::string& key) {
    std::uint64_t v = get_uint(j, key);
    if (v > UINT32_MAX)
        throw ConfigError("config key \"" + key + "\" is out of range: " + std::to_string(v));
    return static_cast<std::uint32_t>(v);
}

inline nlohmann::json parse_json(const std::string& text, const char* what) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError(std::string("malformed JSON in ") + what);
    return j;
}

} // namespace detail

// Accepted keys: {"N","K","X","T","X_delta","K_c","xi","q","seed"}; the last
// three are optional. Anything else is an error.
inline RawConfig parse_config(const std::string& text) {
    nlohmann::json j = detail::parse_json(text, "config");
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> required = {"N", "K", "X", "T", "X_delta", "K_c"};
    static const std::vector<std::string> optional = {"xi", "q", "seed"};
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        bool known = std::find(required.begin(), required.end(), k) != required.end() ||
                     std::find(optional.begin(), optional.end(), k) != optional.end();
        if (!known) throw ConfigError("unknown config key \"" + k + "\"");
    }
    for (const auto& k : required)
        if (!j.contains(k)) throw ConfigError("config is missing key \"" + k + "\"");

    RawConfig c;
    c.servers = detail::get_u32(j, "N");
    c.submodels = detail::get_u32(j, "K");
    c.storage_security = detail::get_u32(j, "X");
    c.privacy = detail::get_u32(j, "T");
    c.increment_security = detail::get_u32(j, "X_delta");
    c.partitions = detail::get_u32(j, "K_c");
    c.scale = j.contains("xi") ? detail::get_u32(j, "xi") : 1;
    c.modulus = j.contains("q") ? detail::get_uint(j, "q") : 0;
    c.seed = j.contains("seed") ? detail::get_uint(j, "seed") : 0;
    return c;
}

inline RawConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// Schedule file: JSON array of {"read_dropouts":[...],"write_dropouts":[...]}.
inline std::vector<RoundDropouts> parse_schedule(const std::string& text) {
    nlohmann::json j = detail::parse_json(text, "schedule");
    if (!j.is_array()) throw ConfigError("schedule must be a JSON array");
    std::vector<RoundDropouts> out;
    out.reserve(j.size());
    for (const auto& entry : j) {
        if (!entry.is_object())
            throw ConfigError("schedule entry " + std::to_string(out.size() + 1) +
                              " must be an object");
        RoundDropouts rd;
        for (const auto& item : entry.items()) {
            const std::string& k = item.key();
            if (k != "read_dropouts" && k != "write_dropouts")
                throw ConfigError("unknown schedule key \"" + k + "\"");
            if (!item.value().is_array())
                throw ConfigError("schedule key \"" + k + "\" must be an array");
            std::vector<std::uint32_t>& dst = (k == "read_dropouts") ? rd.read : rd.write;
            for (const auto& v : item.value()) {
                if (!v.is_number_unsigned())
                    throw ConfigError("schedule dropout indices must be non-negative integers");
                dst.push_back(v.get<std::uint32_t>());
            }
        }
        out.push_back(std::move(rd));
    }
    return out;
}

inline std::vector<RoundDropouts> load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schedule file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_schedule(ss.str());
}

} // namespace acsarw
