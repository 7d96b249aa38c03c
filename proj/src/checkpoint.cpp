#include "rbmkit/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rbmkit {

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void save_checkpoint(const std::string& path, const RbmModel& m) {
    m.validate();
    nlohmann::json doc;
    doc["version"] = kCheckpointVersion;
    doc["n_visible"] = m.n_visible();
    doc["n_hidden"] = m.n_hidden();
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(m.n_visible()) * static_cast<std::size_t>(m.n_hidden()));
    for (int i = 0; i < m.n_hidden(); ++i)
        for (int j = 0; j < m.n_visible(); ++j) w.push_back(m.weights(i, j));
    doc["weights"] = std::move(w);
    doc["visible_bias"] = std::vector<double>(m.visible_bias.data(), m.visible_bias.data() + m.n_visible());
    doc["hidden_bias"] = std::vector<double>(m.hidden_bias.data(), m.hidden_bias.data() + m.n_hidden());
    doc["temperature"] = m.temperature;
    write_file_atomic(path, doc.dump(2) + "\n");
}

RbmModel load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
    }
    if (!doc.contains("version") || doc["version"].get<int>() != kCheckpointVersion)
        throw std::runtime_error("checkpoint " + path + ": unsupported version");

    const int nv = doc.at("n_visible").get<int>();
    const int nh = doc.at("n_hidden").get<int>();
    auto w = doc.at("weights").get<std::vector<double>>();
    auto vb = doc.at("visible_bias").get<std::vector<double>>();
    auto hb = doc.at("hidden_bias").get<std::vector<double>>();
    if (static_cast<int>(w.size()) != nv * nh || static_cast<int>(vb.size()) != nv ||
        static_cast<int>(hb.size()) != nh)
        throw std::runtime_error("checkpoint " + path + ": array sizes inconsistent with layer sizes");

    RbmModel m = make_zero_model(nv, nh, doc.at("temperature").get<double>());
    for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nv; ++j) m.weights(i, j) = w[static_cast<std::size_t>(i) * nv + j];
    for (int j = 0; j < nv; ++j) m.visible_bias(j) = vb[static_cast<std::size_t>(j)];
    for (int i = 0; i < nh; ++i) m.hidden_bias(i) = hb[static_cast<std::size_t>(i)];
    m.validate();
    return m;
}

} // namespace rbmkit
