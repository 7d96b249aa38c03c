#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace rbmkit {

// Every CLI run writes one of these next to its artifacts: the resolved
// configuration is complete enough to reproduce the run.
struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t rng_seed = 0;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> artifacts;

    void write(const std::string& path) const;
};

std::string timestamp_utc();

} // namespace rbmkit
