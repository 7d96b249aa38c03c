#include "rbmkit/valleys.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace rbmkit {

std::string to_string(SourceTag tag) {
    switch (tag) {
        case SourceTag::annealer: return "annealer";
        case SourceTag::tp: return "tp";
        case SourceTag::mcmc: return "mcmc";
    }
    return "?";
}

std::vector<JointState> dedupe_lms(const std::vector<JointState>& states) {
    std::vector<JointState> out;
    std::unordered_set<JointState, JointStateHash> seen;
    for (const JointState& s : states)
        if (seen.insert(s).second) out.push_back(s);
    return out;
}

JointState complete_tp(const RbmModel& m, const BinaryVector& v) {
    JointState s{v, BinaryVector(static_cast<std::size_t>(m.n_hidden()), 0)};
    Eigen::VectorXd act = hidden_activation(m, v);
    for (int i = 0; i < m.n_hidden(); ++i)
        s.h[static_cast<std::size_t>(i)] = act(i) > 0.0 ? 1 : 0;
    return s;
}

std::vector<LocalValleyRecord> assign_to_valleys(const RbmModel& m, const std::vector<JointState>& population,
                                                 SourceTag tag) {
    std::vector<LocalValleyRecord> records;
    std::unordered_map<JointState, std::size_t, JointStateHash> index;
    for (const JointState& s : population) {
        JointState lm = relax_to_lm(m, s);
        auto [it, inserted] = index.try_emplace(lm, records.size());
        if (inserted) {
            records.push_back({lm, energy(m, lm), 1, tag});
        } else {
            ++records[it->second].members;
        }
    }
    return records;
}

EnergyHistogram valley_histogram(const std::vector<LocalValleyRecord>& records, double bin_width) {
    if (records.empty()) throw std::invalid_argument("valley_histogram: no records");
    if (bin_width <= 0.0) throw std::invalid_argument("valley_histogram: bin_width must be > 0");

    double lo = records.front().lm_energy;
    double hi = lo;
    for (const LocalValleyRecord& r : records) {
        lo = std::min(lo, r.lm_energy);
        hi = std::max(hi, r.lm_energy);
    }
    const int n_bins = std::max(1, static_cast<int>(std::ceil((hi - lo) / bin_width - 1e-12)));

    EnergyHistogram h;
    h.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int b = 0; b <= n_bins; ++b) h.bin_edges[static_cast<std::size_t>(b)] = lo + b * bin_width;
    h.lv_count.assign(static_cast<std::size_t>(n_bins), 0);
    std::vector<long> member_sum(static_cast<std::size_t>(n_bins), 0);
    for (const LocalValleyRecord& r : records) {
        int b = static_cast<int>((r.lm_energy - lo) / bin_width);
        b = std::clamp(b, 0, n_bins - 1);
        ++h.lv_count[static_cast<std::size_t>(b)];
        member_sum[static_cast<std::size_t>(b)] += r.members;
    }
    h.avg_members_per_lv.assign(static_cast<std::size_t>(n_bins), 0.0);
    for (int b = 0; b < n_bins; ++b)
        if (h.lv_count[static_cast<std::size_t>(b)] > 0)
            h.avg_members_per_lv[static_cast<std::size_t>(b)] =
                static_cast<double>(member_sum[static_cast<std::size_t>(b)]) /
                static_cast<double>(h.lv_count[static_cast<std::size_t>(b)]);
    return h;
}

void write_histogram_csv(const std::string& path, const EnergyHistogram& h, SourceTag tag) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "bin_lo,bin_hi,lv_count,avg_members,source_tag\n";
    out.precision(12);
    for (std::size_t b = 0; b + 1 < h.bin_edges.size(); ++b) {
        out << h.bin_edges[b] << "," << h.bin_edges[b + 1] << "," << h.lv_count[b] << ","
            << h.avg_members_per_lv[b] << "," << to_string(tag) << "\n";
    }
}

} // namespace rbmkit
