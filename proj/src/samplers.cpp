#include "rbmkit/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace rbmkit {

namespace {

struct FlatQubo {
    int n_vars;
    std::vector<double> linear;
    std::vector<std::vector<std::pair<int, double>>> adjacency; // symmetric
};

FlatQubo flatten(const QuboProblem& p, bool auto_scale) {
    FlatQubo f;
    f.n_vars = p.n_vars;
    f.linear.assign(p.linear.data(), p.linear.data() + p.n_vars);
    f.adjacency.resize(static_cast<std::size_t>(p.n_vars));
    double max_abs = 0.0;
    for (double l : f.linear) max_abs = std::max(max_abs, std::abs(l));
    for (const auto& [key, value] : p.quadratic) {
        f.adjacency[static_cast<std::size_t>(key.first)].push_back({key.second, value});
        f.adjacency[static_cast<std::size_t>(key.second)].push_back({key.first, value});
        max_abs = std::max(max_abs, std::abs(value));
    }
    if (auto_scale && max_abs > 0.0) {
        for (double& l : f.linear) l /= max_abs;
        for (auto& nbrs : f.adjacency)
            for (auto& [k, q] : nbrs) q /= max_abs;
    }
    return f;
}

void apply_hard_clamps(BinaryVector& x, const QuboProblem& p) {
    for (const auto& [idx, bit] : p.clamps) x[static_cast<std::size_t>(idx)] = bit;
}

} // namespace

SampleSet ExactSampler::sample(const QuboProblem& p, int n_reads, std::uint64_t rng_seed) const {
    p.validate();
    if (n_reads < 1) throw std::invalid_argument("sample: n_reads must be >= 1");
    if (p.n_vars > 20)
        throw std::invalid_argument("exact sampler limited to 20 variables, got " + std::to_string(p.n_vars));

    std::vector<int> free_vars;
    BinaryVector base(static_cast<std::size_t>(p.n_vars), 0);
    for (int j = 0; j < p.n_vars; ++j) {
        auto it = p.clamps.find(j);
        if (!soft_clamp_ && it != p.clamps.end())
            base[static_cast<std::size_t>(j)] = it->second;
        else
            free_vars.push_back(j);
    }

    const std::uint64_t n_states = static_cast<std::uint64_t>(1) << free_vars.size();
    std::vector<BinaryVector> states;
    std::vector<double> energies;
    states.reserve(n_states);
    energies.reserve(n_states);
    double max_neg = -std::numeric_limits<double>::infinity();
    for (std::uint64_t idx = 0; idx < n_states; ++idx) {
        BinaryVector x = base;
        for (std::size_t b = 0; b < free_vars.size(); ++b)
            x[static_cast<std::size_t>(free_vars[b])] = (idx >> b) & 1u;
        double e = p.energy(x);
        max_neg = std::max(max_neg, -e);
        states.push_back(std::move(x));
        energies.push_back(e);
    }
    std::vector<double> weights(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) weights[i] = std::exp(-energies[i] - max_neg);

    Rng rng(rng_seed);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    SampleSet out;
    out.states.reserve(static_cast<std::size_t>(n_reads));
    for (int r = 0; r < n_reads; ++r) {
        std::size_t i = pick(rng);
        out.states.push_back(states[i]);
        out.energies.push_back(energies[i]);
        out.multiplicities.push_back(1);
    }
    return out;
}

SampleSet SimulatedAnnealingSampler::sample(const QuboProblem& p, int n_reads, std::uint64_t rng_seed) const {
    p.validate();
    if (n_reads < 1) throw std::invalid_argument("sample: n_reads must be >= 1");
    if (params_.sweeps < 1) throw std::invalid_argument("sa sampler: sweeps must be >= 1");
    if (params_.beta_min <= 0.0 || params_.beta_max < params_.beta_min)
        throw std::invalid_argument("sa sampler: need 0 < beta_min <= beta_max");

    const FlatQubo f = flatten(p, params_.auto_scale);
    const int n = f.n_vars;

    std::vector<char> fixed(static_cast<std::size_t>(n), 0);
    if (!params_.soft_clamp)
        for (const auto& [idx, bit] : p.clamps) fixed[static_cast<std::size_t>(idx)] = 1;

    const double beta_ratio = params_.beta_max / params_.beta_min;
    const int n_sweeps = params_.sweeps;

    SampleSet out;
    out.states.reserve(static_cast<std::size_t>(n_reads));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int r = 0; r < n_reads; ++r) {
        Rng rng = substream(rng_seed, static_cast<std::uint64_t>(r));
        BinaryVector x(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = bernoulli(rng, 0.5) ? 1 : 0;
        apply_hard_clamps(x, p);
        if (params_.soft_clamp) {
            // soft mode leaves clamped bits free; the biased linear term does the work
            for (const auto& [idx, bit] : p.clamps)
                x[static_cast<std::size_t>(idx)] = bernoulli(rng, 0.5) ? 1 : 0;
        }

        // local fields: flipping j from 0 to 1 changes the energy by field[j]
        std::vector<double> field(f.linear);
        for (int j = 0; j < n; ++j)
            for (const auto& [k, q] : f.adjacency[static_cast<std::size_t>(j)])
                if (x[static_cast<std::size_t>(k)]) field[static_cast<std::size_t>(j)] += q;

        for (int sweep = 0; sweep < n_sweeps; ++sweep) {
            const double frac = n_sweeps > 1 ? static_cast<double>(sweep) / (n_sweeps - 1) : 1.0;
            const double beta = params_.beta_min * std::pow(beta_ratio, frac);
            for (int j = 0; j < n; ++j) {
                if (fixed[static_cast<std::size_t>(j)]) continue;
                const bool set = x[static_cast<std::size_t>(j)] != 0;
                const double delta = set ? -field[static_cast<std::size_t>(j)] : field[static_cast<std::size_t>(j)];
                if (delta > 0.0 && unit(rng) >= std::exp(-beta * delta)) continue;
                const double sign = set ? -1.0 : 1.0;
                x[static_cast<std::size_t>(j)] = set ? 0 : 1;
                for (const auto& [k, q] : f.adjacency[static_cast<std::size_t>(j)])
                    field[static_cast<std::size_t>(k)] += sign * q;
            }
        }
        out.energies.push_back(p.energy(x));
        out.states.push_back(std::move(x));
        out.multiplicities.push_back(1);
    }
    return out;
}

RemoteSampler::RemoteSampler(std::string url, RemoteParams params) : params_(params) {
    // split host[:port], accepting an optional http:// prefix
    std::string rest = url;
    const std::string prefix = "http://";
    if (rest.rfind(prefix, 0) == 0) rest = rest.substr(prefix.size());
    auto slash = rest.find('/');
    if (slash != std::string::npos) rest = rest.substr(0, slash);
    auto colon = rest.find(':');
    if (colon == std::string::npos) {
        host_ = rest;
        port_ = 80;
    } else {
        host_ = rest.substr(0, colon);
        port_ = std::stoi(rest.substr(colon + 1));
    }
    if (host_.empty()) throw std::invalid_argument("remote sampler: empty host in url '" + url + "'");
}

SampleSet RemoteSampler::sample(const QuboProblem& p, int n_reads, std::uint64_t rng_seed) const {
    p.validate();
    if (n_reads < 1) throw std::invalid_argument("sample: n_reads must be >= 1");

    nlohmann::json body;
    body["n_vars"] = p.n_vars;
    body["linear"] = std::vector<double>(p.linear.data(), p.linear.data() + p.n_vars);
    auto& quad = body["quadratic"] = nlohmann::json::array();
    for (const auto& [key, value] : p.quadratic)
        quad.push_back({{"i", key.first}, {"j", key.second}, {"value", value}});
    auto& clamps = body["clamps"] = nlohmann::json::object();
    for (const auto& [idx, bit] : p.clamps) clamps[std::to_string(idx)] = static_cast<int>(bit);
    body["n_reads"] = n_reads;
    body["params"] = {{"annealing_time_us", params_.annealing_time_us}, {"auto_scale", params_.auto_scale}};

    httplib::Client client(host_, port_);
    client.set_read_timeout(params_.timeout_seconds, 0);
    auto res = client.Post("/sample", body.dump(), "application/json");
    if (!res)
        throw std::runtime_error("remote sampler: transport failure contacting " + host_ + ":" +
                                 std::to_string(port_) + " (" + httplib::to_string(res.error()) + ")");
    if (res->status != 200)
        throw std::runtime_error("remote sampler: HTTP " + std::to_string(res->status) + ": " + res->body);

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("remote sampler: malformed JSON response: ") + e.what() +
                                 "; body starts '" + res->body.substr(0, 80) + "'");
    }

    if (!reply.contains("states") || !reply["states"].is_array())
        throw std::runtime_error("remote sampler: response missing 'states' array; body starts '" +
                                 res->body.substr(0, 80) + "'");

    // optional chain map: logical index -> physical bit positions
    std::vector<std::vector<int>> chains;
    if (reply.contains("chain_map") && !reply["chain_map"].is_null()) {
        chains.resize(static_cast<std::size_t>(p.n_vars));
        for (const auto& [key, positions] : reply["chain_map"].items()) {
            int logical = std::stoi(key);
            if (logical < 0 || logical >= p.n_vars)
                throw std::runtime_error("remote sampler: chain_map index out of range: " + key);
            chains[static_cast<std::size_t>(logical)] = positions.get<std::vector<int>>();
            if (chains[static_cast<std::size_t>(logical)].empty())
                throw std::runtime_error("remote sampler: empty chain for logical variable " + key);
        }
    }

    Rng vote_rng(substream_seed(rng_seed, 0x76f7e));
    SampleSet out;
    for (const auto& raw : reply["states"]) {
        auto physical = raw.get<std::vector<int>>();
        BinaryVector x(static_cast<std::size_t>(p.n_vars));
        if (chains.empty()) {
            if (static_cast<int>(physical.size()) != p.n_vars)
                throw std::runtime_error("remote sampler: state length " + std::to_string(physical.size()) +
                                         " does not match n_vars " + std::to_string(p.n_vars));
            for (int j = 0; j < p.n_vars; ++j) x[static_cast<std::size_t>(j)] = physical[static_cast<std::size_t>(j)] ? 1 : 0;
        } else {
            for (int j = 0; j < p.n_vars; ++j) {
                std::vector<Bit> chain_bits;
                for (int pos : chains[static_cast<std::size_t>(j)]) {
                    if (pos < 0 || pos >= static_cast<int>(physical.size()))
                        throw std::runtime_error("remote sampler: chain position out of range");
                    chain_bits.push_back(physical[static_cast<std::size_t>(pos)] ? 1 : 0);
                }
                x[static_cast<std::size_t>(j)] = majority_vote(chain_bits, vote_rng);
            }
        }
        if (!params_.soft_clamp) apply_hard_clamps(x, p);
        out.energies.push_back(p.energy(x));
        out.states.push_back(std::move(x));
        out.multiplicities.push_back(1);
    }
    if (out.total_reads() != n_reads)
        throw std::runtime_error("remote sampler: expected " + std::to_string(n_reads) + " states, got " +
                                 std::to_string(out.total_reads()));
    return out;
}

std::unique_ptr<SamplerBackend> make_backend(const std::string& name, const SaParams& sa_params,
                                             const std::string& remote_url, const RemoteParams& remote_params) {
    if (name == "exact") return std::make_unique<ExactSampler>(sa_params.soft_clamp);
    if (name == "sa") return std::make_unique<SimulatedAnnealingSampler>(sa_params);
    if (name == "remote") {
        if (remote_url.empty()) throw std::invalid_argument("remote backend requires --remote-url");
        return std::make_unique<RemoteSampler>(remote_url, remote_params);
    }
    throw std::invalid_argument("unknown backend '" + name + "' (expected exact, sa or remote)");
}

} // namespace rbmkit
