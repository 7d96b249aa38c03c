#pragma once

#include <functional>
#include <optional>

#include "rbmkit/ais.hpp"
#include "rbmkit/dataset.hpp"
#include "rbmkit/gibbs.hpp"
#include "rbmkit/samplers.hpp"

namespace rbmkit {

struct TrainOptions {
    int epochs = 500;
    double learning_rate = 0.05;
    double momentum = 0.5;
    double l2 = 1e-3;
    int k_steps = 1;
    double temperature = 1.0;
    int n_hidden = 74;
    double init_sigma = 0.01;
    SeedStrategy strategy = SeedStrategy::classical();
    int n_samples = 0;      // negative-phase sample count; 0 = one chain per TP
    int n_reads = 1000;     // backend reads per epoch for dw/hybrid strategies
    double target_weight = 1.0;
    std::uint64_t rng_seed = 1;

    int eval_interval = 10; // classification-error cadence; 0 disables
    int ais_interval = 0;   // log-likelihood cadence; 0 disables
    AisConfig ais;
    ClassifyOptions classify;
    double stop_below_error = -1.0; // early stop once the eval error drops below; <0 disables
};

struct EpochMetrics {
    int epoch = 0;
    std::optional<double> classification_error;
    std::optional<double> log_likelihood;
    std::string seed_strategy;
    long wall_time_ms = 0;
    int n_lms = 0; // distinct LMs found this epoch (dw/hybrid only)
    int n_seeds_annealer = 0;
    int n_seeds_classical = 0;
};

struct TrainResult {
    RbmModel model;
    std::vector<EpochMetrics> metrics;
};

// One epoch = one full-batch update. For the classical strategy every TP seeds
// one CD chain; for annealer/hybrid strategies the epoch first draws n_reads
// backend samples, relaxes them to LMs, dedupes, and Boltzmann-selects seeds.
// `test` enables periodic classification-error evaluation; `backend` is
// required for non-classical strategies. `on_epoch` fires after each epoch
// that recorded metrics.
TrainResult train_rbm(const Dataset& train, const Dataset* test, const TrainOptions& opts,
                      const SamplerBackend* backend = nullptr,
                      const std::function<void(const EpochMetrics&, const RbmModel&)>& on_epoch = {});

// Continues training an existing model in place; used by the continual
// learning driver. Training patterns are given pre-encoded.
void train_epochs(RbmModel& m, const std::vector<BinaryVector>& encoded, const TrainOptions& opts,
                  const SamplerBackend* backend, std::uint64_t epoch_seed_base);

} // namespace rbmkit
