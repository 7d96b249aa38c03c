#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rbmkit/dataset.hpp"
#include "rbmkit/rbm.hpp"
#include "rbmkit/rng.hpp"
#include "rbmkit/types.hpp"

namespace rbmkit {

enum class SeedKind { classical_tp, annealer_lm, hybrid };

// How negative-phase chain seeds are drawn: classical training patterns,
// annealer-found local minima, or a mix.
struct SeedStrategy {
    SeedKind kind = SeedKind::classical_tp;
    double mix_fraction = 0.0; // fraction of seeds taken from annealer LMs

    static SeedStrategy classical() { return {SeedKind::classical_tp, 0.0}; }
    static SeedStrategy annealer() { return {SeedKind::annealer_lm, 1.0}; }
    static SeedStrategy hybrid(double mix = 0.5) { return {SeedKind::hybrid, mix}; }
};

struct ChainConfig {
    int k_steps = 1;
    double temperature = 1.0;
    std::uint64_t rng_seed = 0;
};

// One block update: h' ~ p(h|v) then v' ~ p(v|h'), all units of a layer drawn
// independently.
JointState gibbs_step(const RbmModel& m, const JointState& s, double temperature, Rng& rng);

// k-step chain started from a visible seed; the first half-step fills the
// hidden layer.
JointState run_chain(const RbmModel& m, const BinaryVector& seed_v, const ChainConfig& cfg);

// Deterministic T=0 relaxation: h then v block updates where each unit takes 1
// iff its activation input is > 0, 0 iff < 0, and keeps its current value at
// exactly 0. Stops at the first full sweep that changes nothing. Throws after
// `max_sweeps` sweeps without convergence.
JointState relax_to_lm(const RbmModel& m, JointState s, int max_sweeps = 10000);

// Draws n_target chain seeds. The classical portion picks training patterns
// uniformly with replacement and fills the hidden layer with one conditional
// draw; the annealer portion picks LMs with Boltzmann weights exp(-E) at T=1,
// with replacement when fewer LMs than the quota exist and without replacement
// otherwise. The annealer quota is round(mix_fraction * n_target).
std::vector<JointState> select_seeds(const std::vector<BinaryVector>& tps,
                                     const std::vector<JointState>& lms, const RbmModel& m,
                                     int n_target, const SeedStrategy& strategy, Rng& rng);

// Independent k-step chain from each seed's visible part; chain i uses
// substream i of cfg.rng_seed so results do not depend on execution order.
std::vector<JointState> negative_phase_sample(const RbmModel& m, const std::vector<JointState>& seeds,
                                              const ChainConfig& cfg);

struct ClassifyOptions {
    int burn_in = 50;
    int vote_steps = 50;
};

// Label reconstruction: pixels clamped, label bits free. After burn_in steps
// the per-label-bit set frequencies are tallied over vote_steps steps and the
// argmax is returned (ties to the lowest class). When `allowed` is nonempty
// the argmax is restricted to those classes.
int classify(const RbmModel& m, const BinaryVector& pixels, const ClassifyOptions& opts, Rng& rng,
             std::span<const int> allowed = {});

// Misclassified fraction of `data` under per-pattern rng substreams of `seed`.
double classification_error(const RbmModel& m, const Dataset& data, const ClassifyOptions& opts,
                            std::uint64_t seed, std::span<const int> allowed = {});

// Clamped-label generation: each run seeds a chain with random pixels and the
// label bits fixed to one-hot(class_id), never resampled; the final pixels are
// returned tagged with class_id. Duplicates allowed.
std::vector<LabeledPattern> generate_memories_mcmc(const RbmModel& m, int class_id, int n_runs,
                                                   int k_steps, std::uint64_t rng_seed);

} // namespace rbmkit
