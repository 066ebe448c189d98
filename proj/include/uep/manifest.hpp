#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace uep {

// Provenance record written next to every command's outputs, including on
// partial failure.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::string version;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
    std::string error;  // empty on success

    nlohmann::json to_json() const;
    void write(const std::string& path) const;
};

std::string tool_version();

}  // namespace uep
