#include "uep/manifest.hpp"

#include <fstream>
#include <stdexcept>

namespace uep {

std::string tool_version() {
#ifdef UEPMM_VERSION
    return std::string("uepmm-") + UEPMM_VERSION;
#else
    return "uepmm-dev";
#endif
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    j["version"] = version.empty() ? tool_version() : version;
    j["wall_seconds"] = wall_seconds;
    j["outputs"] = outputs;
    if (!error.empty()) j["error"] = error;
    return j;
}

void RunManifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_json().dump(2) << "\n";
}

}  // namespace uep
