#include "rbmkit/manifest.hpp"

#include <chrono>
#include <ctime>

#include "rbmkit/checkpoint.hpp"

namespace rbmkit {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

void RunManifest::write(const std::string& path) const {
    nlohmann::json doc;
    doc["command"] = command;
    doc["config"] = config;
    doc["rng_seed"] = rng_seed;
    doc["started_at"] = started_at;
    doc["finished_at"] = finished_at;
    doc["artifacts"] = artifacts;
    write_file_atomic(path, doc.dump(2) + "\n");
}

} // namespace rbmkit
