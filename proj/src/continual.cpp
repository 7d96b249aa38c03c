#include "rbmkit/continual.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <stdexcept>

namespace rbmkit {

std::string to_string(ReplayMode mode) {
    switch (mode) {
        case ReplayMode::none: return "none";
        case ReplayMode::mcmc: return "mcmc";
        case ReplayMode::annealer: return "annealer";
    }
    return "?";
}

std::string to_string(MemorySelector sel) {
    return sel == MemorySelector::lowest_energy ? "lowest-energy" : "random-correct";
}

TaskSchedule TaskSchedule::default_pairs() {
    return {{{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}}};
}

void TaskSchedule::validate() const {
    if (tasks.empty()) throw std::invalid_argument("task schedule must be nonempty");
    std::set<int> seen;
    for (auto [a, b] : tasks) {
        for (int c : {a, b}) {
            if (c < 0 || c >= kNumClasses)
                throw std::invalid_argument("task schedule: class " + std::to_string(c) + " out of range 0..9");
            if (!seen.insert(c).second)
                throw std::invalid_argument("task schedule: class " + std::to_string(c) + " appears twice");
        }
    }
}

std::vector<LabeledPattern> generate_memories_annealer(const RbmModel& m, int class_id,
                                                       const SamplerBackend& backend, int n_reads,
                                                       double clamp_strength, std::uint64_t rng_seed,
                                                       double target_weight) {
    if (class_id < 0 || class_id >= kNumClasses)
        throw std::invalid_argument("generate_memories_annealer: class_id out of range 0..9");
    const int n_pixels = m.n_visible() - kNumClasses;
    if (n_pixels < 1) throw std::invalid_argument("generate_memories_annealer: model carries no pixel bits");

    auto [qubo, sf] = rbm_to_qubo(m, target_weight);
    std::map<int, Bit> labels;
    for (int c = 0; c < kNumClasses; ++c) labels[n_pixels + c] = (c == class_id) ? 1 : 0;
    QuboProblem clamped = clamp_vars(qubo, labels, clamp_strength);

    SampleSet ss = backend.sample(clamped, n_reads, rng_seed);
    std::vector<LabeledPattern> out;
    out.reserve(ss.states.size());
    for (std::size_t i = 0; i < ss.states.size(); ++i) {
        for (long k = 0; k < ss.multiplicities[i]; ++k) {
            LabeledPattern p;
            p.pixels.assign(ss.states[i].begin(), ss.states[i].begin() + n_pixels);
            p.label = class_id;
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<LabeledPattern> select_memories(const std::vector<LabeledPattern>& candidates, const RbmModel& m,
                                            MemorySelector selector, int k_mem,
                                            const std::function<int(const BinaryVector&)>& classify_fn,
                                            Rng& rng, bool* shortfall) {
    if (candidates.empty()) throw std::invalid_argument("select_memories: no candidates");
    if (k_mem < 1) throw std::invalid_argument("select_memories: k_mem must be >= 1");
    if (shortfall) *shortfall = false;

    std::vector<std::size_t> correct;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (classify_fn(candidates[i].pixels) == candidates[i].label) correct.push_back(i);
    if (correct.empty())
        throw std::runtime_error("select_memories: no correctly classified candidates for class " +
                                 std::to_string(candidates.front().label));

    auto take = [&](const std::vector<std::size_t>& idx) {
        std::vector<LabeledPattern> out;
        out.reserve(idx.size());
        for (std::size_t i : idx) out.push_back(candidates[i]);
        return out;
    };

    if (static_cast<int>(correct.size()) <= k_mem) {
        if (shortfall && static_cast<int>(correct.size()) < k_mem) *shortfall = true;
        return take(correct);
    }

    if (selector == MemorySelector::lowest_energy) {
        // free energy F(v) = -ln sum_h exp(-E/T); lower F = more probable
        std::vector<double> fe(correct.size());
        for (std::size_t k = 0; k < correct.size(); ++k)
            fe[k] = -free_energy_term(m, encode_visible(candidates[correct[k]]));
        std::vector<std::size_t> order(correct.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fe[a] < fe[b]; });
        std::vector<std::size_t> chosen;
        for (int k = 0; k < k_mem; ++k) chosen.push_back(correct[order[static_cast<std::size_t>(k)]]);
        return take(chosen);
    }

    std::vector<std::size_t> sampled;
    std::sample(correct.begin(), correct.end(), std::back_inserter(sampled), k_mem, rng);
    return take(sampled);
}

std::vector<double> evaluate_forgetting(const RbmModel& m, const Dataset& test,
                                        const std::vector<std::pair<int, int>>& pairs,
                                        const ClassifyOptions& opts, bool restricted_decoding,
                                        std::uint64_t rng_seed) {
    if (pairs.empty()) throw std::invalid_argument("evaluate_forgetting: no pairs");
    std::vector<double> errors;
    errors.reserve(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        auto [a, b] = pairs[p];
        Dataset subset = filter_classes(test, {a, b}); // throws when the pair is absent
        std::array<int, 2> allowed{a, b};
        errors.push_back(classification_error(m, subset, opts, substream_seed(rng_seed, p),
                                              restricted_decoding ? std::span<const int>(allowed)
                                                                  : std::span<const int>()));
    }
    return errors;
}

ForgettingReport run_schedule(const TaskSchedule& schedule, const ReplayConfig& replay, const CfOptions& opts,
                              const Dataset& train, const Dataset& test, const SamplerBackend* backend,
                              std::vector<MemoryRecord>* memory_log) {
    schedule.validate();
    if (replay.mode == ReplayMode::annealer && backend == nullptr)
        throw std::invalid_argument("run_schedule: annealer replay requires a sampler backend");
    if (replay.k_mem > replay.generator_reads)
        throw std::invalid_argument("run_schedule: k_mem cannot exceed generator_reads");

    // Pattern generation with auto-scale off keeps small weights above the
    // emulated hardware sensitivity floor.
    std::unique_ptr<SamplerBackend> descaled;
    const SamplerBackend* gen_backend = backend;
    if (replay.mode == ReplayMode::annealer) {
        if (auto* sa = dynamic_cast<const SimulatedAnnealingSampler*>(backend)) {
            if (sa->params().auto_scale) {
                SaParams p = sa->params();
                p.auto_scale = false;
                descaled = std::make_unique<SimulatedAnnealingSampler>(p);
                gen_backend = descaled.get();
            }
        }
    }

    RbmModel model = make_random_model(kNumVisible, opts.train.n_hidden, opts.train.init_sigma,
                                       substream_seed(opts.rng_seed, 0), opts.train.temperature);

    std::vector<MemoryRecord> memories;
    ForgettingReport report;
    report.pairs = schedule.tasks;
    const int n_tasks = static_cast<int>(schedule.tasks.size());

    for (int task = 0; task < n_tasks; ++task) {
        auto [a, b] = schedule.tasks[static_cast<std::size_t>(task)];
        Dataset task_data = filter_classes(train, {a, b});

        std::vector<BinaryVector> encoded;
        encoded.reserve(task_data.size() + memories.size());
        for (const LabeledPattern& p : task_data.patterns) encoded.push_back(encode_visible(p));
        if (replay.mode != ReplayMode::none)
            for (const MemoryRecord& r : memories) encoded.push_back(encode_visible(r.pattern));

        try {
            train_epochs(model, encoded, opts.train, nullptr, substream_seed(opts.rng_seed, 100 + task));
        } catch (const std::exception& e) {
            throw std::runtime_error("run_schedule: training failed in task " + std::to_string(task + 1) +
                                     ": " + e.what());
        }

        if (replay.mode != ReplayMode::none && task + 1 < n_tasks) {
            for (int which = 0; which < 2; ++which) {
                const int cls = which == 0 ? a : b;
                const std::uint64_t gen_seed = substream_seed(opts.rng_seed, 200 + 10 * task + which);
                std::vector<LabeledPattern> candidates;
                try {
                    candidates = replay.mode == ReplayMode::mcmc
                                     ? generate_memories_mcmc(model, cls, replay.generator_reads,
                                                              replay.generator_k_steps, gen_seed)
                                     : generate_memories_annealer(model, cls, *gen_backend,
                                                                  replay.generator_reads, replay.clamp_strength,
                                                                  gen_seed, replay.target_weight);
                } catch (const std::exception& e) {
                    throw std::runtime_error("run_schedule: memory generation failed in task " +
                                             std::to_string(task + 1) + ": " + e.what());
                }

                // filter by restricted classification between the pair's classes
                std::array<int, 2> pair_classes{a, b};
                std::size_t call_idx = 0;
                auto classify_fn = [&](const BinaryVector& pixels) {
                    Rng r = substream(substream_seed(gen_seed, 0xc1a55), call_idx++);
                    return classify(model, pixels, opts.classify, r, pair_classes);
                };
                Rng sel_rng = substream(gen_seed, 0x5e1);
                std::vector<LabeledPattern> kept =
                    select_memories(candidates, model, replay.selector, replay.k_mem, classify_fn, sel_rng);
                for (LabeledPattern& p : kept) memories.push_back({std::move(p), task});
            }
        }

        report.error_matrix.push_back(evaluate_forgetting(model, test, schedule.tasks, opts.classify,
                                                          opts.restricted_decoding,
                                                          substream_seed(opts.rng_seed, 300 + task)));
    }
    if (memory_log) *memory_log = memories;
    return report;
}

} // namespace rbmkit
