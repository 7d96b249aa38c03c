// Experiment CLI: train / classify / valleys / ais / cf / gen-data.
// Every run writes a manifest.json with the fully resolved configuration;
// a JSON config file can pre-set any flag, explicit flags win.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbmkit/checkpoint.hpp"
#include "rbmkit/continual.hpp"
#include "rbmkit/manifest.hpp"
#include "rbmkit/training.hpp"
#include "rbmkit/valleys.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rbmkit;

namespace {

template <class T>
void from_config(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json read_config_arg(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) throw CLI::ValidationError("--config", std::string("cannot open ") + argv[i + 1]);
            json j;
            in >> j;
            return j;
        }
    }
    return json::object();
}

std::string default_out_dir() { return "runs/" + timestamp_utc(); }

struct SamplerArgs {
    std::string backend = "sa";
    std::string remote_url;
    int n_reads = 1000;
    int sa_sweeps = 1000;
    double sa_beta_min = 0.1;
    double sa_beta_max = 10.0;
    bool auto_scale = true;
    bool soft_clamp = false;
    double target_weight = 1.0;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--backend", backend, "Sampler backend: exact, sa or remote")
            ->check(CLI::IsMember({"exact", "sa", "remote"}));
        cmd->add_option("--remote-url", remote_url, "host[:port] of a remote sampler");
        cmd->add_option("--n-reads", n_reads, "Backend reads per call");
        cmd->add_option("--sa-sweeps", sa_sweeps, "SA sweeps per read");
        cmd->add_option("--sa-beta-min", sa_beta_min);
        cmd->add_option("--sa-beta-max", sa_beta_max);
        cmd->add_flag("--auto-scale,!--no-auto-scale", auto_scale, "Rescale coefficients to [-1,1] before sampling");
        cmd->add_flag("--soft-clamp", soft_clamp, "Bias-only clamping, no hard variable fixing");
        cmd->add_option("--target-weight", target_weight, "Dynamic scale factor target");
    }

    void load(const json& j) {
        from_config(j, "backend", backend);
        from_config(j, "remote-url", remote_url);
        from_config(j, "n-reads", n_reads);
        from_config(j, "sa-sweeps", sa_sweeps);
        from_config(j, "sa-beta-min", sa_beta_min);
        from_config(j, "sa-beta-max", sa_beta_max);
        from_config(j, "auto-scale", auto_scale);
        from_config(j, "soft-clamp", soft_clamp);
        from_config(j, "target-weight", target_weight);
    }

    json resolved() const {
        return {{"backend", backend},       {"remote-url", remote_url},   {"n-reads", n_reads},
                {"sa-sweeps", sa_sweeps},   {"sa-beta-min", sa_beta_min}, {"sa-beta-max", sa_beta_max},
                {"auto-scale", auto_scale}, {"soft-clamp", soft_clamp},   {"target-weight", target_weight}};
    }

    std::unique_ptr<SamplerBackend> make() const {
        SaParams sa{sa_beta_min, sa_beta_max, sa_sweeps, auto_scale, soft_clamp};
        RemoteParams remote;
        remote.auto_scale = auto_scale;
        remote.soft_clamp = soft_clamp;
        return make_backend(backend, sa, remote_url, remote);
    }
};

SeedStrategy parse_strategy(const std::string& name, double mix) {
    if (name == "cd") return SeedStrategy::classical();
    if (name == "dw") return SeedStrategy::annealer();
    if (name == "hybrid") return SeedStrategy::hybrid(mix);
    throw CLI::ValidationError("--seed-strategy", "expected cd, dw or hybrid");
}

std::string metrics_csv_row(const EpochMetrics& m) {
    std::ostringstream row;
    row.precision(10);
    row << m.epoch << ",";
    if (m.classification_error) row << *m.classification_error;
    row << ",";
    if (m.log_likelihood) row << *m.log_likelihood;
    row << "," << m.seed_strategy << "," << m.wall_time_ms << "," << m.n_lms << "," << m.n_seeds_classical
        << "," << m.n_seeds_annealer << "\n";
    return row.str();
}

constexpr const char* kMetricsHeader =
    "epoch,classification_error,log_likelihood,seed_strategy,wall_time_ms,n_lms,n_seeds_classical,n_seeds_annealer\n";

void write_metrics_csv(const std::string& path, const std::vector<EpochMetrics>& metrics) {
    std::string out = kMetricsHeader;
    for (const EpochMetrics& m : metrics) out += metrics_csv_row(m);
    write_file_atomic(path, out);
}

// ---------------------------------------------------------------- train ----

struct TrainArgs {
    std::string train_file, test_file, out_dir;
    double binarize_threshold = 0.5;
    int epochs = 500;
    double learning_rate = 0.05, momentum = 0.5, l2 = 1e-3, temperature = 1.0;
    int n_hidden = 74, k_steps = 1, n_samples = 0;
    std::string seed_strategy = "cd";
    double mix_fraction = 0.5;
    int burn_in = 50, vote_steps = 50;
    std::uint64_t rng_seed = 1;
    int eval_interval = 10, ais_interval = 0, checkpoint_interval = 0;
    int ais_temps = 1000, ais_chains = 100;
    int repeats = 1;
    double stop_below_error = -1.0;
    SamplerArgs sampler;

    json resolved() const {
        json j = {{"train-file", train_file},
                  {"test-file", test_file},
                  {"out-dir", out_dir},
                  {"binarize-threshold", binarize_threshold},
                  {"epochs", epochs},
                  {"learning-rate", learning_rate},
                  {"momentum", momentum},
                  {"l2", l2},
                  {"temperature", temperature},
                  {"n-hidden", n_hidden},
                  {"k-steps", k_steps},
                  {"n-samples", n_samples},
                  {"seed-strategy", seed_strategy},
                  {"mix-fraction", mix_fraction},
                  {"burn-in", burn_in},
                  {"vote-steps", vote_steps},
                  {"rng-seed", rng_seed},
                  {"eval-interval", eval_interval},
                  {"ais-interval", ais_interval},
                  {"checkpoint-interval", checkpoint_interval},
                  {"ais-temps", ais_temps},
                  {"ais-chains", ais_chains},
                  {"repeats", repeats},
                  {"stop-below-error", stop_below_error}};
        j.update(sampler.resolved());
        return j;
    }
};

int cmd_train(const TrainArgs& a) {
    RunManifest manifest;
    manifest.command = "train";
    manifest.config = a.resolved();
    manifest.rng_seed = a.rng_seed;
    manifest.started_at = timestamp_utc();

    Dataset train = load_digits(a.train_file, a.binarize_threshold, SplitTag::train);
    std::optional<Dataset> test;
    if (!a.test_file.empty()) test = load_digits(a.test_file, a.binarize_threshold, SplitTag::test);

    TrainOptions opts;
    opts.epochs = a.epochs;
    opts.learning_rate = a.learning_rate;
    opts.momentum = a.momentum;
    opts.l2 = a.l2;
    opts.k_steps = a.k_steps;
    opts.temperature = a.temperature;
    opts.n_hidden = a.n_hidden;
    opts.strategy = parse_strategy(a.seed_strategy, a.mix_fraction);
    opts.n_samples = a.n_samples;
    opts.n_reads = a.sampler.n_reads;
    opts.target_weight = a.sampler.target_weight;
    opts.eval_interval = a.eval_interval;
    opts.ais_interval = a.ais_interval;
    opts.ais.n_temps = a.ais_temps;
    opts.ais.n_chains = a.ais_chains;
    opts.classify = {a.burn_in, a.vote_steps};
    opts.stop_below_error = a.stop_below_error;

    std::unique_ptr<SamplerBackend> backend;
    if (opts.strategy.kind != SeedKind::classical_tp) backend = a.sampler.make();

    std::vector<std::vector<EpochMetrics>> all_metrics;
    for (int r = 0; r < a.repeats; ++r) {
        opts.rng_seed = a.rng_seed + static_cast<std::uint64_t>(r);
        const std::string suffix = a.repeats > 1 ? "_run" + std::to_string(r) : "";
        const fs::path ckpt_dir = fs::path(a.out_dir) / ("checkpoints" + suffix);

        auto on_epoch = [&](const EpochMetrics& m, const RbmModel& model) {
            if (a.checkpoint_interval > 0 && m.epoch % a.checkpoint_interval == 0)
                save_checkpoint((ckpt_dir / ("epoch_" + std::to_string(m.epoch) + ".json")).string(), model);
            if (m.classification_error)
                std::cout << "epoch " << m.epoch << " error " << *m.classification_error
                          << (m.log_likelihood ? " loglik " + std::to_string(*m.log_likelihood) : "") << "\n";
        };

        TrainResult result = train_rbm(train, test ? &*test : nullptr, opts, backend.get(), on_epoch);
        const std::string final_ckpt = (ckpt_dir / "final.json").string();
        save_checkpoint(final_ckpt, result.model);
        const std::string metrics_path = (fs::path(a.out_dir) / ("metrics" + suffix + ".csv")).string();
        write_metrics_csv(metrics_path, result.metrics);
        manifest.artifacts.push_back(final_ckpt);
        manifest.artifacts.push_back(metrics_path);
        all_metrics.push_back(std::move(result.metrics));
    }

    if (a.repeats > 1) {
        // median classification error per epoch over the runs that evaluated it
        std::map<int, std::vector<double>> by_epoch;
        for (const auto& run : all_metrics)
            for (const EpochMetrics& m : run)
                if (m.classification_error) by_epoch[m.epoch].push_back(*m.classification_error);
        std::string out = "epoch,median_classification_error,n_runs\n";
        for (auto& [epoch, errs] : by_epoch) {
            std::sort(errs.begin(), errs.end());
            out += std::to_string(epoch) + "," + std::to_string(errs[errs.size() / 2]) + "," +
                   std::to_string(errs.size()) + "\n";
        }
        const std::string agg = (fs::path(a.out_dir) / "metrics.csv").string();
        write_file_atomic(agg, out);
        manifest.artifacts.push_back(agg);
    }

    manifest.finished_at = timestamp_utc();
    manifest.write((fs::path(a.out_dir) / "manifest.json").string());
    return 0;
}

// ------------------------------------------------------------- classify ----

struct ClassifyArgs {
    std::string checkpoint, test_file, out_dir;
    double binarize_threshold = 0.5;
    int burn_in = 50, vote_steps = 50;
    std::uint64_t rng_seed = 1;

    json resolved() const {
        return {{"checkpoint", checkpoint}, {"test-file", test_file},   {"out-dir", out_dir},
                {"binarize-threshold", binarize_threshold},
                {"burn-in", burn_in},       {"vote-steps", vote_steps}, {"rng-seed", rng_seed}};
    }
};

int cmd_classify(const ClassifyArgs& a) {
    RunManifest manifest;
    manifest.command = "classify";
    manifest.config = a.resolved();
    manifest.rng_seed = a.rng_seed;
    manifest.started_at = timestamp_utc();

    RbmModel m = load_checkpoint(a.checkpoint);
    Dataset test = load_digits(a.test_file, a.binarize_threshold, SplitTag::test);
    ClassifyOptions opts{a.burn_in, a.vote_steps};

    std::array<long, kNumClasses> predicted{};
    long wrong = 0;
    for (std::size_t i = 0; i < test.patterns.size(); ++i) {
        Rng rng = substream(a.rng_seed, i);
        int pred = classify(m, test.patterns[i].pixels, opts, rng);
        ++predicted[static_cast<std::size_t>(pred)];
        if (pred != test.patterns[i].label) ++wrong;
    }
    const double error = static_cast<double>(wrong) / static_cast<double>(test.size());

    json out;
    out["error"] = error;
    out["n_patterns"] = test.size();
    for (int c = 0; c < kNumClasses; ++c)
        out["predicted_frequency"][std::to_string(c)] =
            static_cast<double>(predicted[static_cast<std::size_t>(c)]) / static_cast<double>(test.size());
    const std::string path = (fs::path(a.out_dir) / "classify.json").string();
    write_file_atomic(path, out.dump(2) + "\n");
    std::cout << "classification error " << error << " over " << test.size() << " patterns\n";

    manifest.artifacts.push_back(path);
    manifest.finished_at = timestamp_utc();
    manifest.write((fs::path(a.out_dir) / "manifest.json").string());
    return 0;
}

// -------------------------------------------------------------- valleys ----

struct ValleysArgs {
    std::string checkpoint, train_file, out_dir;
    double binarize_threshold = 0.5;
    std::vector<int> sample_sizes{1000, 10000};
    double bin_width = 0.0; // 0 = (max-min)/20
    std::uint64_t rng_seed = 1;
    SamplerArgs sampler;

    json resolved() const {
        json j = {{"checkpoint", checkpoint},
                  {"train-file", train_file},
                  {"out-dir", out_dir},
                  {"binarize-threshold", binarize_threshold},
                  {"sample-sizes", sample_sizes},
                  {"bin-width", bin_width},
                  {"rng-seed", rng_seed}};
        j.update(sampler.resolved());
        return j;
    }
};

double auto_bin_width(const std::vector<LocalValleyRecord>& records, double requested) {
    if (requested > 0.0) return requested;
    double lo = records.front().lm_energy, hi = lo;
    for (const auto& r : records) {
        lo = std::min(lo, r.lm_energy);
        hi = std::max(hi, r.lm_energy);
    }
    return hi > lo ? (hi - lo) / 20.0 : 1.0;
}

int cmd_valleys(const ValleysArgs& a) {
    RunManifest manifest;
    manifest.command = "valleys";
    manifest.config = a.resolved();
    manifest.rng_seed = a.rng_seed;
    manifest.started_at = timestamp_utc();

    RbmModel m = load_checkpoint(a.checkpoint);
    std::unique_ptr<SamplerBackend> backend = a.sampler.make();
    auto [qubo, sf] = rbm_to_qubo(m, a.sampler.target_weight);

    std::optional<Dataset> train;
    if (!a.train_file.empty()) train = load_digits(a.train_file, a.binarize_threshold, SplitTag::train);

    for (std::size_t k = 0; k < a.sample_sizes.size(); ++k) {
        const int n = a.sample_sizes[k];
        SampleSet ss = backend->sample(qubo, n, substream_seed(a.rng_seed, k));
        std::vector<JointState> population;
        population.reserve(ss.states.size());
        for (const BinaryVector& x : ss.states) population.push_back(split_qubo_state(x, m.n_visible(), m.n_hidden()));
        auto records = assign_to_valleys(m, population, SourceTag::annealer);
        EnergyHistogram h = valley_histogram(records, auto_bin_width(records, a.bin_width));
        const std::string path = (fs::path(a.out_dir) / "valleys" / ("annealer_" + std::to_string(n) + ".csv")).string();
        fs::create_directories(fs::path(path).parent_path());
        write_histogram_csv(path, h, SourceTag::annealer);
        manifest.artifacts.push_back(path);
        std::cout << "annealer n=" << n << ": " << records.size() << " valleys\n";

        if (train) {
            std::vector<JointState> tp_population;
            for (std::size_t i = 0; i < train->patterns.size() && static_cast<int>(i) < n; ++i)
                tp_population.push_back(complete_tp(m, encode_visible(train->patterns[i])));
            auto tp_records = assign_to_valleys(m, tp_population, SourceTag::tp);
            EnergyHistogram th = valley_histogram(tp_records, auto_bin_width(tp_records, a.bin_width));
            const std::string tp_path = (fs::path(a.out_dir) / "valleys" / ("tp_" + std::to_string(n) + ".csv")).string();
            write_histogram_csv(tp_path, th, SourceTag::tp);
            manifest.artifacts.push_back(tp_path);
            std::cout << "tp n=" << tp_population.size() << ": " << tp_records.size() << " valleys\n";
        }
    }

    manifest.finished_at = timestamp_utc();
    manifest.write((fs::path(a.out_dir) / "manifest.json").string());
    return 0;
}

// ------------------------------------------------------------------ ais ----

struct AisArgs {
    std::string checkpoint, train_file, out_dir, append_metrics;
    double binarize_threshold = 0.5;
    int n_temps = 1000, n_chains = 100, epoch = 0;
    std::string schedule = "linear";
    std::uint64_t rng_seed = 1;
    bool verify_exact = false;

    json resolved() const {
        return {{"checkpoint", checkpoint}, {"train-file", train_file},
                {"out-dir", out_dir},       {"append-metrics", append_metrics},
                {"binarize-threshold", binarize_threshold},
                {"n-temps", n_temps},       {"n-chains", n_chains},
                {"epoch", epoch},           {"schedule", schedule},
                {"rng-seed", rng_seed},     {"verify-exact", verify_exact}};
    }
};

int cmd_ais(const AisArgs& a) {
    RunManifest manifest;
    manifest.command = "ais";
    manifest.config = a.resolved();
    manifest.rng_seed = a.rng_seed;
    manifest.started_at = timestamp_utc();

    RbmModel m = load_checkpoint(a.checkpoint);
    AisConfig cfg;
    cfg.n_temps = a.n_temps;
    cfg.n_chains = a.n_chains;
    cfg.schedule = a.schedule == "geometric" ? AisSchedule::geometric : AisSchedule::linear;
    cfg.rng_seed = a.rng_seed;
    LogZEstimate est = ais_log_z(m, cfg);

    json out;
    out["log_z"] = est.log_z;
    out["std_err"] = est.std_err;
    out["n_chains"] = est.n_chains;
    std::cout << "log_z " << est.log_z << " +- " << est.std_err << "\n";

    if (a.verify_exact) {
        const double exact = exact_log_partition(m);
        out["exact_log_z"] = exact;
        out["gap"] = est.log_z - exact;
        std::cout << "exact " << exact << " gap " << est.log_z - exact << "\n";
    }

    if (!a.train_file.empty()) {
        Dataset train = load_digits(a.train_file, a.binarize_threshold, SplitTag::train);
        const double ll = log_likelihood(m, train, est.log_z);
        out["log_likelihood"] = ll;
        std::cout << "log_likelihood " << ll << "\n";
        if (!a.append_metrics.empty()) {
            std::ofstream app(a.append_metrics, std::ios::app);
            if (!app) throw std::runtime_error("cannot append to " + a.append_metrics);
            app << a.epoch << ",," << ll << ",,,,,\n";
        }
    }

    const std::string path = (fs::path(a.out_dir) / "ais.json").string();
    write_file_atomic(path, out.dump(2) + "\n");
    manifest.artifacts.push_back(path);
    manifest.finished_at = timestamp_utc();
    manifest.write((fs::path(a.out_dir) / "manifest.json").string());
    return 0;
}

// ------------------------------------------------------------------- cf ----

struct CfArgs {
    std::string train_file, test_file, out_dir;
    double binarize_threshold = 0.5;
    std::string mode = "none", selector = "lowest-energy";
    int k_mem = 100, generator_reads = 1000, generator_k_steps = 200;
    double clamp_strength = 4.0;
    int epochs_per_task = 150;
    double learning_rate = 0.5, momentum = 0.5, l2 = 1e-3;
    int n_hidden = 74, k_steps = 1, burn_in = 50, vote_steps = 50;
    bool full_decoding = false;
    std::uint64_t rng_seed = 1;
    SamplerArgs sampler;

    json resolved() const {
        json j = {{"train-file", train_file},
                  {"test-file", test_file},
                  {"out-dir", out_dir},
                  {"binarize-threshold", binarize_threshold},
                  {"mode", mode},
                  {"selector", selector},
                  {"k-mem", k_mem},
                  {"generator-reads", generator_reads},
                  {"generator-k-steps", generator_k_steps},
                  {"clamp-strength", clamp_strength},
                  {"epochs-per-task", epochs_per_task},
                  {"learning-rate", learning_rate},
                  {"momentum", momentum},
                  {"l2", l2},
                  {"n-hidden", n_hidden},
                  {"k-steps", k_steps},
                  {"burn-in", burn_in},
                  {"vote-steps", vote_steps},
                  {"full-decoding", full_decoding},
                  {"rng-seed", rng_seed}};
        j.update(sampler.resolved());
        return j;
    }
};

int cmd_cf(const CfArgs& a) {
    RunManifest manifest;
    manifest.command = "cf";
    manifest.config = a.resolved();
    manifest.rng_seed = a.rng_seed;
    manifest.started_at = timestamp_utc();

    Dataset train = load_digits(a.train_file, a.binarize_threshold, SplitTag::train);
    Dataset test = load_digits(a.test_file, a.binarize_threshold, SplitTag::test);

    ReplayConfig replay;
    replay.mode = a.mode == "none" ? ReplayMode::none : a.mode == "mcmc" ? ReplayMode::mcmc : ReplayMode::annealer;
    replay.selector =
        a.selector == "random-correct" ? MemorySelector::random_correct : MemorySelector::lowest_energy;
    replay.k_mem = a.k_mem;
    replay.generator_reads = a.generator_reads;
    replay.generator_k_steps = a.generator_k_steps;
    replay.clamp_strength = a.clamp_strength;
    replay.target_weight = a.sampler.target_weight;

    CfOptions opts;
    opts.train.epochs = a.epochs_per_task;
    opts.train.learning_rate = a.learning_rate;
    opts.train.momentum = a.momentum;
    opts.train.l2 = a.l2;
    opts.train.k_steps = a.k_steps;
    opts.train.n_hidden = a.n_hidden;
    opts.classify = {a.burn_in, a.vote_steps};
    opts.restricted_decoding = !a.full_decoding;
    opts.rng_seed = a.rng_seed;

    std::unique_ptr<SamplerBackend> backend;
    if (replay.mode == ReplayMode::annealer) backend = a.sampler.make();

    ForgettingReport report = run_schedule(TaskSchedule::default_pairs(), replay, opts, train, test, backend.get());

    std::ostringstream csv;
    csv << "task";
    for (auto [x, y] : report.pairs) csv << ",pair_" << x << "_" << y;
    csv << "\n";
    csv.precision(6);
    for (std::size_t t = 0; t < report.error_matrix.size(); ++t) {
        csv << (t + 1);
        for (double e : report.error_matrix[t]) csv << "," << e;
        csv << "\n";
    }
    const std::string path = (fs::path(a.out_dir) / "cf_matrix.csv").string();
    write_file_atomic(path, csv.str());
    std::cout << csv.str();

    manifest.artifacts.push_back(path);
    manifest.finished_at = timestamp_utc();
    manifest.write((fs::path(a.out_dir) / "manifest.json").string());
    return 0;
}

// ------------------------------------------------------------- gen-data ----

struct GenDataArgs {
    std::string out;
    int n_per_class = 50;
    std::vector<int> classes{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    double noise = 0.05;
    int max_intensity = 16;
    std::uint64_t rng_seed = 1;
    std::uint64_t prototype_seed = 42; // shared by train/test splits of one task

    json resolved() const {
        return {{"out", out},     {"n-per-class", n_per_class},       {"classes", classes},
                {"noise", noise}, {"max-intensity", max_intensity},   {"rng-seed", rng_seed},
                {"prototype-seed", prototype_seed}};
    }
};

int cmd_gen_data(const GenDataArgs& a) {
    if (a.out.empty()) throw CLI::ValidationError("--out", "output path required");
    Dataset d;
    // prototypes depend only on prototype-seed so different splits share them
    std::vector<BinaryVector> prototypes(kNumClasses);
    for (int c = 0; c < kNumClasses; ++c) {
        Rng rng = substream(a.prototype_seed, static_cast<std::uint64_t>(c));
        prototypes[static_cast<std::size_t>(c)].resize(kNumPixels);
        for (int j = 0; j < kNumPixels; ++j)
            prototypes[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] = bernoulli(rng, 0.5) ? 1 : 0;
    }
    std::uint64_t sample_idx = 0;
    for (int k = 0; k < a.n_per_class; ++k) {
        for (int c : a.classes) {
            if (c < 0 || c >= kNumClasses) throw CLI::ValidationError("--classes", "class out of range 0..9");
            Rng rng = substream(a.rng_seed, sample_idx++);
            LabeledPattern p;
            p.label = c;
            p.pixels = prototypes[static_cast<std::size_t>(c)];
            for (int j = 0; j < kNumPixels; ++j)
                if (bernoulli(rng, a.noise)) p.pixels[static_cast<std::size_t>(j)] ^= 1;
            d.patterns.push_back(std::move(p));
        }
    }
    fs::path out(a.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_digits_csv(a.out, d, a.max_intensity);
    std::cout << "wrote " << d.size() << " patterns to " << a.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RBM training with interchangeable negative-phase samplers, QUBO annealing backends,\n"
                 "local-valley statistics, AIS evaluation and a Task-IL forgetting harness"};
    app.require_subcommand(1);

    json config;
    try {
        config = read_config_arg(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::string config_path; // recognized (and consumed) on every subcommand

    TrainArgs train_args;
    train_args.out_dir = default_out_dir();
    {
        auto& a = train_args;
        from_config(config, "train-file", a.train_file);
        from_config(config, "test-file", a.test_file);
        from_config(config, "out-dir", a.out_dir);
        from_config(config, "binarize-threshold", a.binarize_threshold);
        from_config(config, "epochs", a.epochs);
        from_config(config, "learning-rate", a.learning_rate);
        from_config(config, "momentum", a.momentum);
        from_config(config, "l2", a.l2);
        from_config(config, "temperature", a.temperature);
        from_config(config, "n-hidden", a.n_hidden);
        from_config(config, "k-steps", a.k_steps);
        from_config(config, "n-samples", a.n_samples);
        from_config(config, "seed-strategy", a.seed_strategy);
        from_config(config, "mix-fraction", a.mix_fraction);
        from_config(config, "burn-in", a.burn_in);
        from_config(config, "vote-steps", a.vote_steps);
        from_config(config, "rng-seed", a.rng_seed);
        from_config(config, "eval-interval", a.eval_interval);
        from_config(config, "ais-interval", a.ais_interval);
        from_config(config, "checkpoint-interval", a.checkpoint_interval);
        from_config(config, "ais-temps", a.ais_temps);
        from_config(config, "ais-chains", a.ais_chains);
        from_config(config, "repeats", a.repeats);
        from_config(config, "stop-below-error", a.stop_below_error);
        a.sampler.load(config);
    }
    CLI::App* train_cmd = app.add_subcommand("train", "Train an RBM and emit metrics + checkpoints");
    train_cmd->add_option("--config", config_path, "JSON config file; flags override its values");
    train_cmd->add_option("--train-file", train_args.train_file)->required();
    train_cmd->add_option("--test-file", train_args.test_file);
    train_cmd->add_option("--out-dir", train_args.out_dir);
    train_cmd->add_option("--binarize-threshold", train_args.binarize_threshold);
    train_cmd->add_option("--epochs", train_args.epochs);
    train_cmd->add_option("--learning-rate", train_args.learning_rate);
    train_cmd->add_option("--momentum", train_args.momentum);
    train_cmd->add_option("--l2", train_args.l2);
    train_cmd->add_option("--temperature", train_args.temperature);
    train_cmd->add_option("--n-hidden", train_args.n_hidden);
    train_cmd->add_option("--k-steps", train_args.k_steps);
    train_cmd->add_option("--n-samples", train_args.n_samples, "Negative-phase chains per epoch; 0 = one per TP");
    train_cmd->add_option("--seed-strategy", train_args.seed_strategy)->check(CLI::IsMember({"cd", "dw", "hybrid"}));
    train_cmd->add_option("--mix-fraction", train_args.mix_fraction);
    train_cmd->add_option("--burn-in", train_args.burn_in);
    train_cmd->add_option("--vote-steps", train_args.vote_steps);
    train_cmd->add_option("--rng-seed", train_args.rng_seed);
    train_cmd->add_option("--eval-interval", train_args.eval_interval);
    train_cmd->add_option("--ais-interval", train_args.ais_interval);
    train_cmd->add_option("--checkpoint-interval", train_args.checkpoint_interval);
    train_cmd->add_option("--ais-temps", train_args.ais_temps);
    train_cmd->add_option("--ais-chains", train_args.ais_chains);
    train_cmd->add_option("--repeats", train_args.repeats);
    train_cmd->add_option("--stop-below-error", train_args.stop_below_error);
    train_args.sampler.add_flags(train_cmd);

    ClassifyArgs classify_args;
    classify_args.out_dir = default_out_dir();
    {
        auto& a = classify_args;
        from_config(config, "checkpoint", a.checkpoint);
        from_config(config, "test-file", a.test_file);
        from_config(config, "out-dir", a.out_dir);
        from_config(config, "binarize-threshold", a.binarize_threshold);
        from_config(config, "burn-in", a.burn_in);
        from_config(config, "vote-steps", a.vote_steps);
        from_config(config, "rng-seed", a.rng_seed);
    }
    CLI::App* classify_cmd = app.add_subcommand("classify", "Label-reconstruction classification of a test set");
    classify_cmd->add_option("--config", config_path);
    classify_cmd->add_option("--checkpoint", classify_args.checkpoint)->required();
    classify_cmd->add_option("--test-file", classify_args.test_file)->required();
    classify_cmd->add_option("--out-dir", classify_args.out_dir);
    classify_cmd->add_option("--binarize-threshold", classify_args.binarize_threshold);
    classify_cmd->add_option("--burn-in", classify_args.burn_in);
    classify_cmd->add_option("--vote-steps", classify_args.vote_steps);
    classify_cmd->add_option("--rng-seed", classify_args.rng_seed);

    ValleysArgs valleys_args;
    valleys_args.out_dir = default_out_dir();
    {
        auto& a = valleys_args;
        from_config(config, "checkpoint", a.checkpoint);
        from_config(config, "train-file", a.train_file);
        from_config(config, "out-dir", a.out_dir);
        from_config(config, "binarize-threshold", a.binarize_threshold);
        from_config(config, "sample-sizes", a.sample_sizes);
        from_config(config, "bin-width", a.bin_width);
        from_config(config, "rng-seed", a.rng_seed);
        a.sampler.load(config);
    }
    CLI::App* valleys_cmd = app.add_subcommand("valleys", "Seeds-per-LV energy histograms for a checkpoint");
    valleys_cmd->add_option("--config", config_path);
    valleys_cmd->add_option("--checkpoint", valleys_args.checkpoint)->required();
    valleys_cmd->add_option("--train-file", valleys_args.train_file, "Also histogram the TPs of this file");
    valleys_cmd->add_option("--out-dir", valleys_args.out_dir);
    valleys_cmd->add_option("--binarize-threshold", valleys_args.binarize_threshold);
    valleys_cmd->add_option("--sample-sizes", valleys_args.sample_sizes);
    valleys_cmd->add_option("--bin-width", valleys_args.bin_width, "0 selects (max-min)/20");
    valleys_cmd->add_option("--rng-seed", valleys_args.rng_seed);
    valleys_args.sampler.add_flags(valleys_cmd);

    AisArgs ais_args;
    ais_args.out_dir = default_out_dir();
    {
        auto& a = ais_args;
        from_config(config, "checkpoint", a.checkpoint);
        from_config(config, "train-file", a.train_file);
        from_config(config, "out-dir", a.out_dir);
        from_config(config, "append-metrics", a.append_metrics);
        from_config(config, "binarize-threshold", a.binarize_threshold);
        from_config(config, "n-temps", a.n_temps);
        from_config(config, "n-chains", a.n_chains);
        from_config(config, "epoch", a.epoch);
        from_config(config, "schedule", a.schedule);
        from_config(config, "rng-seed", a.rng_seed);
        from_config(config, "verify-exact", a.verify_exact);
    }
    CLI::App* ais_cmd = app.add_subcommand("ais", "AIS estimate of ln Z (and log-likelihood of a dataset)");
    ais_cmd->add_option("--config", config_path);
    ais_cmd->add_option("--checkpoint", ais_args.checkpoint)->required();
    ais_cmd->add_option("--train-file", ais_args.train_file);
    ais_cmd->add_option("--out-dir", ais_args.out_dir);
    ais_cmd->add_option("--append-metrics", ais_args.append_metrics, "metrics.csv to append a log-likelihood row to");
    ais_cmd->add_option("--binarize-threshold", ais_args.binarize_threshold);
    ais_cmd->add_option("--n-temps", ais_args.n_temps);
    ais_cmd->add_option("--n-chains", ais_args.n_chains);
    ais_cmd->add_option("--epoch", ais_args.epoch, "Epoch column for --append-metrics");
    ais_cmd->add_option("--schedule", ais_args.schedule)->check(CLI::IsMember({"linear", "geometric"}));
    ais_cmd->add_option("--rng-seed", ais_args.rng_seed);
    ais_cmd->add_flag("--verify-exact", ais_args.verify_exact, "Also print the exact ln Z (small models only)");

    CfArgs cf_args;
    cf_args.out_dir = default_out_dir();
    {
        auto& a = cf_args;
        from_config(config, "train-file", a.train_file);
        from_config(config, "test-file", a.test_file);
        from_config(config, "out-dir", a.out_dir);
        from_config(config, "binarize-threshold", a.binarize_threshold);
        from_config(config, "mode", a.mode);
        from_config(config, "selector", a.selector);
        from_config(config, "k-mem", a.k_mem);
        from_config(config, "generator-reads", a.generator_reads);
        from_config(config, "generator-k-steps", a.generator_k_steps);
        from_config(config, "clamp-strength", a.clamp_strength);
        from_config(config, "epochs-per-task", a.epochs_per_task);
        from_config(config, "learning-rate", a.learning_rate);
        from_config(config, "momentum", a.momentum);
        from_config(config, "l2", a.l2);
        from_config(config, "n-hidden", a.n_hidden);
        from_config(config, "k-steps", a.k_steps);
        from_config(config, "burn-in", a.burn_in);
        from_config(config, "vote-steps", a.vote_steps);
        from_config(config, "full-decoding", a.full_decoding);
        from_config(config, "rng-seed", a.rng_seed);
        a.sampler.load(config);
    }
    CLI::App* cf_cmd = app.add_subcommand("cf", "Task-IL schedule with optional generative-replay mitigation");
    cf_cmd->add_option("--config", config_path);
    cf_cmd->add_option("--train-file", cf_args.train_file)->required();
    cf_cmd->add_option("--test-file", cf_args.test_file)->required();
    cf_cmd->add_option("--out-dir", cf_args.out_dir);
    cf_cmd->add_option("--binarize-threshold", cf_args.binarize_threshold);
    cf_cmd->add_option("--mode", cf_args.mode)->check(CLI::IsMember({"none", "mcmc", "annealer"}));
    cf_cmd->add_option("--selector", cf_args.selector)->check(CLI::IsMember({"lowest-energy", "random-correct"}));
    cf_cmd->add_option("--k-mem", cf_args.k_mem);
    cf_cmd->add_option("--generator-reads", cf_args.generator_reads);
    cf_cmd->add_option("--generator-k-steps", cf_args.generator_k_steps);
    cf_cmd->add_option("--clamp-strength", cf_args.clamp_strength);
    cf_cmd->add_option("--epochs-per-task", cf_args.epochs_per_task);
    cf_cmd->add_option("--learning-rate", cf_args.learning_rate);
    cf_cmd->add_option("--momentum", cf_args.momentum);
    cf_cmd->add_option("--l2", cf_args.l2);
    cf_cmd->add_option("--n-hidden", cf_args.n_hidden);
    cf_cmd->add_option("--k-steps", cf_args.k_steps);
    cf_cmd->add_option("--burn-in", cf_args.burn_in);
    cf_cmd->add_option("--vote-steps", cf_args.vote_steps);
    cf_cmd->add_flag("--full-decoding", cf_args.full_decoding, "10-way argmax instead of pair-restricted");
    cf_cmd->add_option("--rng-seed", cf_args.rng_seed);
    cf_args.sampler.add_flags(cf_cmd);

    GenDataArgs gen_args;
    {
        auto& a = gen_args;
        from_config(config, "out", a.out);
        from_config(config, "n-per-class", a.n_per_class);
        from_config(config, "classes", a.classes);
        from_config(config, "noise", a.noise);
        from_config(config, "max-intensity", a.max_intensity);
        from_config(config, "rng-seed", a.rng_seed);
        from_config(config, "prototype-seed", a.prototype_seed);
    }
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "Synthetic prototype-plus-noise toy dataset");
    gen_cmd->add_option("--config", config_path);
    gen_cmd->add_option("--out", gen_args.out)->required();
    gen_cmd->add_option("--n-per-class", gen_args.n_per_class);
    gen_cmd->add_option("--classes", gen_args.classes);
    gen_cmd->add_option("--noise", gen_args.noise);
    gen_cmd->add_option("--max-intensity", gen_args.max_intensity);
    gen_cmd->add_option("--rng-seed", gen_args.rng_seed);
    gen_cmd->add_option("--prototype-seed", gen_args.prototype_seed, "Class prototypes; keep equal across splits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // 0 for --help, 1 for any usage error
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (classify_cmd->parsed()) return cmd_classify(classify_args);
        if (valleys_cmd->parsed()) return cmd_valleys(valleys_args);
        if (ais_cmd->parsed()) return cmd_ais(ais_args);
        if (cf_cmd->parsed()) return cmd_cf(cf_args);
        if (gen_cmd->parsed()) return cmd_gen_data(gen_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
