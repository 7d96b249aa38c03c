#pragma once

#include <utility>
#include <vector>

#include "rbmkit/training.hpp"

namespace rbmkit {

enum class ReplayMode { none, mcmc, annealer };
enum class MemorySelector { lowest_energy, random_correct };

std::string to_string(ReplayMode mode);
std::string to_string(MemorySelector sel);

struct TaskSchedule {
    std::vector<std::pair<int, int>> tasks;

    static TaskSchedule default_pairs(); // (0,1),(2,3),(4,5),(6,7),(8,9)
    void validate() const;               // pairs disjoint, classes in 0..9
};

struct ReplayConfig {
    ReplayMode mode = ReplayMode::none;
    int k_mem = 100; // memories kept per class
    MemorySelector selector = MemorySelector::lowest_energy;
    int generator_reads = 1000;
    int generator_k_steps = 200; // chain length per MCMC generation run
    double clamp_strength = 4.0;
    double target_weight = 1.0;
};

// A replayed memory and the task whose end-of-task model generated it.
struct MemoryRecord {
    LabeledPattern pattern;
    int task_stamp = -1;
};

struct ForgettingReport {
    std::vector<std::pair<int, int>> pairs;
    // error_matrix[t][p] = classification error on pair p after task t
    std::vector<std::vector<double>> error_matrix;
};

struct CfOptions {
    TrainOptions train;       // per-task training; classical CD unless a backend is wired in
    ClassifyOptions classify; // used for evaluation and memory filtering
    bool restricted_decoding = true; // argmax over the tested pair only
    std::uint64_t rng_seed = 1;
};

// Builds the QUBO of the trained model, clamps the 10 label variables to
// one-hot(class_id) at clamp_strength, draws n_reads backend samples and
// returns their pixel parts tagged with class_id.
std::vector<LabeledPattern> generate_memories_annealer(const RbmModel& m, int class_id,
                                                       const SamplerBackend& backend, int n_reads,
                                                       double clamp_strength, std::uint64_t rng_seed,
                                                       double target_weight = 1.0);

// Filters candidates to those classifying to their tagged class under
// classify_fn, then keeps k_mem of them: the lowest-free-energy ones or a
// uniform draw without replacement. Returns all correct candidates (setting
// *shortfall) when fewer than k_mem exist; throws when none are correct.
std::vector<LabeledPattern> select_memories(const std::vector<LabeledPattern>& candidates, const RbmModel& m,
                                            MemorySelector selector, int k_mem,
                                            const std::function<int(const BinaryVector&)>& classify_fn,
                                            Rng& rng, bool* shortfall = nullptr);

// Per-pair misclassified fraction on the test split. Throws when a pair has
// no test patterns.
std::vector<double> evaluate_forgetting(const RbmModel& m, const Dataset& test,
                                        const std::vector<std::pair<int, int>>& pairs,
                                        const ClassifyOptions& opts, bool restricted_decoding,
                                        std::uint64_t rng_seed);

// Task-IL driver. Task 1 trains a fresh model on its pair; every later task
// starts from the previous model and trains on its pair's patterns plus all
// accumulated memories. Memories for a pair are generated exactly once, from
// the model as it stood at the end of that pair's task. After every task the
// full pair list is evaluated. `memory_log` (optional) receives every stored
// memory with its task stamp.
ForgettingReport run_schedule(const TaskSchedule& schedule, const ReplayConfig& replay, const CfOptions& opts,
                              const Dataset& train, const Dataset& test, const SamplerBackend* backend,
                              std::vector<MemoryRecord>* memory_log = nullptr);

} // namespace rbmkit
