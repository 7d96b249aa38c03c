#pragma once

#include <string>
#include <vector>

#include "rbmkit/gibbs.hpp"
#include "rbmkit/rbm.hpp"
#include "rbmkit/types.hpp"

namespace rbmkit {

enum class SourceTag { annealer, tp, mcmc };

std::string to_string(SourceTag tag);

// A distinct local minimum together with the number of population members
// whose T=0 relaxation ended in it.
struct LocalValleyRecord {
    JointState lm_state;
    double lm_energy = 0.0;
    long members = 0;
    SourceTag source = SourceTag::annealer;
};

struct EnergyHistogram {
    std::vector<double> bin_edges;          // ascending, length bins+1
    std::vector<double> avg_members_per_lv; // per bin; 0 for empty bins
    std::vector<long> lv_count;
};

// Keeps the first occurrence of each distinct (v,h) bit pattern, order
// preserved.
std::vector<JointState> dedupe_lms(const std::vector<JointState>& states);

// Relaxes every population member to its local minimum and aggregates members
// by LM bit pattern; records appear in order of first discovery.
std::vector<LocalValleyRecord> assign_to_valleys(const RbmModel& m, const std::vector<JointState>& population,
                                                 SourceTag tag);

// Completes a hidden-less training pattern to a full state with one
// deterministic T=0 h-inference step.
JointState complete_tp(const RbmModel& m, const BinaryVector& v);

// Bins span [min lm_energy, max lm_energy]; per bin the average member count
// over the LVs that fall in it.
EnergyHistogram valley_histogram(const std::vector<LocalValleyRecord>& records, double bin_width);

// One row per bin: bin_lo,bin_hi,lv_count,avg_members,source_tag
void write_histogram_csv(const std::string& path, const EnergyHistogram& h, SourceTag tag);

} // namespace rbmkit
