#include "rbmkit/gibbs.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rbmkit {

namespace {

// Visible update restricted to bits [lo, hi); other bits stay clamped.
void update_visible_range(const RbmModel& m, JointState& s, double T, Rng& rng, int lo, int hi) {
    for (int j = lo; j < hi; ++j) {
        double act = m.visible_bias(j);
        for (int i = 0; i < m.n_hidden(); ++i)
            if (s.h[static_cast<std::size_t>(i)]) act += m.weights(i, j);
        s.v[static_cast<std::size_t>(j)] = bernoulli(rng, sigmoid(act / T)) ? 1 : 0;
    }
}

void update_hidden(const RbmModel& m, JointState& s, double T, Rng& rng) {
    Eigen::VectorXd act = hidden_activation(m, s.v);
    for (int i = 0; i < m.n_hidden(); ++i)
        s.h[static_cast<std::size_t>(i)] = bernoulli(rng, sigmoid(act(i) / T)) ? 1 : 0;
}

int label_offset(const RbmModel& m) {
    if (m.n_visible() <= kNumClasses)
        throw std::invalid_argument("model visible layer too small to carry label bits");
    return m.n_visible() - kNumClasses;
}

} // namespace

JointState gibbs_step(const RbmModel& m, const JointState& s, double temperature, Rng& rng) {
    if (temperature <= 0.0) throw std::invalid_argument("gibbs_step: temperature must be > 0");
    JointState next = s;
    update_hidden(m, next, temperature, rng);
    Eigen::VectorXd act = visible_activation(m, next.h);
    for (int j = 0; j < m.n_visible(); ++j)
        next.v[static_cast<std::size_t>(j)] = bernoulli(rng, sigmoid(act(j) / temperature)) ? 1 : 0;
    return next;
}

JointState run_chain(const RbmModel& m, const BinaryVector& seed_v, const ChainConfig& cfg) {
    if (cfg.temperature <= 0.0) throw std::invalid_argument("run_chain: temperature must be > 0");
    if (cfg.k_steps < 1) throw std::invalid_argument("run_chain: k_steps must be >= 1");
    Rng rng(cfg.rng_seed);
    JointState s{seed_v, BinaryVector(static_cast<std::size_t>(m.n_hidden()), 0)};
    for (int k = 0; k < cfg.k_steps; ++k) s = gibbs_step(m, s, cfg.temperature, rng);
    return s;
}

JointState relax_to_lm(const RbmModel& m, JointState s, int max_sweeps) {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool changed = false;
        Eigen::VectorXd act_h = hidden_activation(m, s.v);
        for (int i = 0; i < m.n_hidden(); ++i) {
            Bit next = act_h(i) > 0.0 ? 1 : (act_h(i) < 0.0 ? 0 : s.h[static_cast<std::size_t>(i)]);
            if (next != s.h[static_cast<std::size_t>(i)]) {
                s.h[static_cast<std::size_t>(i)] = next;
                changed = true;
            }
        }
        Eigen::VectorXd act_v = visible_activation(m, s.h);
        for (int j = 0; j < m.n_visible(); ++j) {
            Bit next = act_v(j) > 0.0 ? 1 : (act_v(j) < 0.0 ? 0 : s.v[static_cast<std::size_t>(j)]);
            if (next != s.v[static_cast<std::size_t>(j)]) {
                s.v[static_cast<std::size_t>(j)] = next;
                changed = true;
            }
        }
        if (!changed) return s;
    }
    throw std::runtime_error("relax_to_lm: no fixpoint within " + std::to_string(max_sweeps) + " sweeps");
}

std::vector<JointState> select_seeds(const std::vector<BinaryVector>& tps,
                                     const std::vector<JointState>& lms, const RbmModel& m,
                                     int n_target, const SeedStrategy& strategy, Rng& rng) {
    if (n_target <= 0) throw std::invalid_argument("select_seeds: n_target must be > 0");

    double mix = strategy.mix_fraction;
    if (strategy.kind == SeedKind::classical_tp) mix = 0.0;
    if (strategy.kind == SeedKind::annealer_lm) mix = 1.0;
    if (mix < 0.0 || mix > 1.0) throw std::invalid_argument("select_seeds: mix_fraction must be in [0,1]");

    const int annealer_quota = static_cast<int>(std::lround(mix * n_target));
    const int classical_quota = n_target - annealer_quota;
    if (classical_quota > 0 && tps.empty())
        throw std::invalid_argument("select_seeds: classical portion requested but no training patterns given");
    if (annealer_quota > 0 && lms.empty())
        throw std::invalid_argument("select_seeds: annealer portion requested but no local minima given");

    std::vector<JointState> seeds;
    seeds.reserve(static_cast<std::size_t>(n_target));

    if (classical_quota > 0) {
        std::uniform_int_distribution<std::size_t> pick(0, tps.size() - 1);
        for (int k = 0; k < classical_quota; ++k) {
            const BinaryVector& v = tps[pick(rng)];
            JointState s{v, BinaryVector(static_cast<std::size_t>(m.n_hidden()), 0)};
            update_hidden(m, s, m.temperature, rng);
            seeds.push_back(std::move(s));
        }
    }

    if (annealer_quota > 0) {
        // Boltzmann weights exp(-E) at T=1, stabilized by the minimum energy.
        std::vector<double> weights(lms.size());
        double e_min = std::numeric_limits<double>::infinity();
        std::vector<double> energies(lms.size());
        for (std::size_t i = 0; i < lms.size(); ++i) {
            energies[i] = energy(m, lms[i]);
            e_min = std::min(e_min, energies[i]);
        }
        for (std::size_t i = 0; i < lms.size(); ++i) weights[i] = std::exp(-(energies[i] - e_min));

        if (static_cast<int>(lms.size()) < annealer_quota) {
            std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
            for (int k = 0; k < annealer_quota; ++k) seeds.push_back(lms[pick(rng)]);
        } else {
            std::vector<std::size_t> alive(lms.size());
            std::iota(alive.begin(), alive.end(), 0);
            for (int k = 0; k < annealer_quota; ++k) {
                std::vector<double> w(alive.size());
                for (std::size_t a = 0; a < alive.size(); ++a) w[a] = weights[alive[a]];
                std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
                std::size_t chosen = pick(rng);
                seeds.push_back(lms[alive[chosen]]);
                alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(chosen));
            }
        }
    }
    return seeds;
}

std::vector<JointState> negative_phase_sample(const RbmModel& m, const std::vector<JointState>& seeds,
                                              const ChainConfig& cfg) {
    if (seeds.empty()) throw std::invalid_argument("negative_phase_sample: no seeds");
    std::vector<JointState> out;
    out.reserve(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        ChainConfig chain = cfg;
        chain.rng_seed = substream_seed(cfg.rng_seed, i);
        out.push_back(run_chain(m, seeds[i].v, chain));
    }
    return out;
}

int classify(const RbmModel& m, const BinaryVector& pixels, const ClassifyOptions& opts, Rng& rng,
             std::span<const int> allowed) {
    if (opts.burn_in < 0 || opts.vote_steps < 1)
        throw std::invalid_argument("classify: burn_in must be >= 0 and vote_steps >= 1");
    const int lab0 = label_offset(m);
    if (static_cast<int>(pixels.size()) != lab0)
        throw std::invalid_argument("classify: pixel vector length does not match model");

    JointState s;
    s.v.resize(static_cast<std::size_t>(m.n_visible()));
    std::copy(pixels.begin(), pixels.end(), s.v.begin());
    for (int c = 0; c < kNumClasses; ++c)
        s.v[static_cast<std::size_t>(lab0 + c)] = bernoulli(rng, 0.5) ? 1 : 0;
    s.h.assign(static_cast<std::size_t>(m.n_hidden()), 0);

    std::array<long, kNumClasses> counts{};
    const double T = m.temperature;
    for (int t = 0; t < opts.burn_in + opts.vote_steps; ++t) {
        update_hidden(m, s, T, rng);
        update_visible_range(m, s, T, rng, lab0, m.n_visible());
        assert(std::equal(pixels.begin(), pixels.end(), s.v.begin()));
        if (t >= opts.burn_in)
            for (int c = 0; c < kNumClasses; ++c)
                counts[static_cast<std::size_t>(c)] += s.v[static_cast<std::size_t>(lab0 + c)];
    }

    int best = -1;
    long best_count = -1;
    auto consider = [&](int c) {
        if (counts[static_cast<std::size_t>(c)] > best_count) {
            best = c;
            best_count = counts[static_cast<std::size_t>(c)];
        }
    };
    if (allowed.empty()) {
        for (int c = 0; c < kNumClasses; ++c) consider(c);
    } else {
        std::vector<int> sorted(allowed.begin(), allowed.end());
        std::sort(sorted.begin(), sorted.end());
        for (int c : sorted) consider(c);
    }
    return best;
}

double classification_error(const RbmModel& m, const Dataset& data, const ClassifyOptions& opts,
                            std::uint64_t seed, std::span<const int> allowed) {
    if (data.patterns.empty()) throw std::invalid_argument("classification_error: empty dataset");
    long wrong = 0;
    for (std::size_t i = 0; i < data.patterns.size(); ++i) {
        Rng rng = substream(seed, i);
        int pred = classify(m, data.patterns[i].pixels, opts, rng, allowed);
        if (pred != data.patterns[i].label) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.patterns.size());
}

std::vector<LabeledPattern> generate_memories_mcmc(const RbmModel& m, int class_id, int n_runs,
                                                   int k_steps, std::uint64_t rng_seed) {
    if (class_id < 0 || class_id >= kNumClasses)
        throw std::invalid_argument("generate_memories_mcmc: class_id out of range 0..9");
    if (n_runs < 1 || k_steps < 1)
        throw std::invalid_argument("generate_memories_mcmc: n_runs and k_steps must be >= 1");
    const int lab0 = label_offset(m);

    std::vector<LabeledPattern> memories;
    memories.reserve(static_cast<std::size_t>(n_runs));
    for (int r = 0; r < n_runs; ++r) {
        Rng rng = substream(rng_seed, static_cast<std::uint64_t>(r));
        JointState s;
        s.v.resize(static_cast<std::size_t>(m.n_visible()));
        for (int j = 0; j < lab0; ++j) s.v[static_cast<std::size_t>(j)] = bernoulli(rng, 0.5) ? 1 : 0;
        for (int c = 0; c < kNumClasses; ++c)
            s.v[static_cast<std::size_t>(lab0 + c)] = (c == class_id) ? 1 : 0;
        s.h.assign(static_cast<std::size_t>(m.n_hidden()), 0);

        for (int k = 0; k < k_steps; ++k) {
            update_hidden(m, s, m.temperature, rng);
            update_visible_range(m, s, m.temperature, rng, 0, lab0); // label bits stay clamped
        }
        LabeledPattern p;
        p.pixels.assign(s.v.begin(), s.v.begin() + lab0);
        p.label = class_id;
        memories.push_back(std::move(p));
    }
    return memories;
}

} // namespace rbmkit
