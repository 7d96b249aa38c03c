#include "rbmkit/training.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "rbmkit/valleys.hpp"

namespace rbmkit {

namespace {

struct SeedSplit {
    int classical = 0;
    int annealer = 0;
};

SeedSplit quota_for(const SeedStrategy& strategy, int n_target) {
    double mix = strategy.mix_fraction;
    if (strategy.kind == SeedKind::classical_tp) mix = 0.0;
    if (strategy.kind == SeedKind::annealer_lm) mix = 1.0;
    const int annealer = static_cast<int>(std::lround(mix * n_target));
    return {n_target - annealer, annealer};
}

// One epoch's negative-phase states; fills the LM/seed counters.
std::vector<JointState> negative_phase_for_epoch(const RbmModel& m,
                                                 const std::vector<BinaryVector>& encoded,
                                                 const TrainOptions& opts, const SamplerBackend* backend,
                                                 std::uint64_t epoch_seed, EpochMetrics& info) {
    const int n_target = opts.n_samples > 0 ? opts.n_samples : static_cast<int>(encoded.size());
    ChainConfig chain{opts.k_steps, opts.temperature, substream_seed(epoch_seed, 1)};

    if (opts.strategy.kind == SeedKind::classical_tp) {
        info.n_seeds_classical = n_target;
        if (n_target == static_cast<int>(encoded.size())) {
            // canonical CD-k: one chain per training pattern
            std::vector<JointState> seeds;
            seeds.reserve(encoded.size());
            for (const BinaryVector& v : encoded)
                seeds.push_back({v, BinaryVector(static_cast<std::size_t>(m.n_hidden()), 0)});
            return negative_phase_sample(m, seeds, chain);
        }
        Rng rng = substream(epoch_seed, 2);
        std::vector<JointState> seeds = select_seeds(encoded, {}, m, n_target, opts.strategy, rng);
        return negative_phase_sample(m, seeds, chain);
    }

    if (backend == nullptr)
        throw std::invalid_argument("train: annealer and hybrid seed strategies require a sampler backend");

    auto [qubo, sf] = rbm_to_qubo(m, opts.target_weight);
    SampleSet ss = backend->sample(qubo, opts.n_reads, substream_seed(epoch_seed, 3));

    std::vector<JointState> solutions;
    solutions.reserve(ss.states.size());
    for (const BinaryVector& x : ss.states) solutions.push_back(split_qubo_state(x, m.n_visible(), m.n_hidden()));
    solutions = dedupe_lms(solutions);

    std::vector<JointState> lms;
    lms.reserve(solutions.size());
    for (const JointState& s : solutions) lms.push_back(relax_to_lm(m, s));
    lms = dedupe_lms(lms);
    info.n_lms = static_cast<int>(lms.size());

    const SeedSplit split = quota_for(opts.strategy, n_target);
    info.n_seeds_classical = split.classical;
    info.n_seeds_annealer = split.annealer;

    Rng rng = substream(epoch_seed, 2);
    std::vector<JointState> seeds = select_seeds(encoded, lms, m, n_target, opts.strategy, rng);
    return negative_phase_sample(m, seeds, chain);
}

} // namespace

void train_epochs(RbmModel& m, const std::vector<BinaryVector>& encoded, const TrainOptions& opts,
                  const SamplerBackend* backend, std::uint64_t epoch_seed_base) {
    if (encoded.empty()) throw std::invalid_argument("train_epochs: no training patterns");
    GradientSet velocity = GradientSet::zeros(m.n_visible(), m.n_hidden());
    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        EpochMetrics scratch;
        std::vector<JointState> negative =
            negative_phase_for_epoch(m, encoded, opts, backend, substream_seed(epoch_seed_base, epoch), scratch);
        GradientSet g = loglik_gradient(m, encoded, negative);
        apply_update(m, g, opts.learning_rate, opts.l2, opts.momentum, velocity);
    }
}

TrainResult train_rbm(const Dataset& train, const Dataset* test, const TrainOptions& opts,
                      const SamplerBackend* backend,
                      const std::function<void(const EpochMetrics&, const RbmModel&)>& on_epoch) {
    if (train.patterns.empty()) throw std::invalid_argument("train_rbm: empty training set");

    std::vector<BinaryVector> encoded;
    encoded.reserve(train.patterns.size());
    for (const LabeledPattern& p : train.patterns) encoded.push_back(encode_visible(p));

    TrainResult result;
    result.model = make_random_model(kNumVisible, opts.n_hidden, opts.init_sigma,
                                     substream_seed(opts.rng_seed, 0), opts.temperature);
    GradientSet velocity = GradientSet::zeros(kNumVisible, opts.n_hidden);

    const char* strategy_name = opts.strategy.kind == SeedKind::classical_tp  ? "cd"
                                : opts.strategy.kind == SeedKind::annealer_lm ? "dw"
                                                                              : "hybrid";

    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        EpochMetrics me;
        me.epoch = epoch;
        me.seed_strategy = strategy_name;

        std::vector<JointState> negative =
            negative_phase_for_epoch(result.model, encoded, opts, backend, substream_seed(opts.rng_seed, epoch), me);
        GradientSet g = loglik_gradient(result.model, encoded, negative);
        apply_update(result.model, g, opts.learning_rate, opts.l2, opts.momentum, velocity);

        const bool last = epoch == opts.epochs;
        if (test != nullptr && opts.eval_interval > 0 && (epoch % opts.eval_interval == 0 || last)) {
            me.classification_error = classification_error(result.model, *test, opts.classify,
                                                           substream_seed(opts.rng_seed, 0xe0a1u + epoch));
        }
        if (opts.ais_interval > 0 && (epoch % opts.ais_interval == 0 || last)) {
            AisConfig ais = opts.ais;
            ais.rng_seed = substream_seed(opts.rng_seed, 0xa15u + epoch);
            me.log_likelihood = log_likelihood(result.model, train, ais_log_z(result.model, ais).log_z);
        }
        me.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        result.metrics.push_back(me);
        if (on_epoch) on_epoch(me, result.model);
        if (me.classification_error && opts.stop_below_error >= 0.0 &&
            *me.classification_error < opts.stop_below_error)
            break;
    }
    return result;
}

} // namespace rbmkit
