#pragma once

#include <memory>
#include <string>

#include "rbmkit/qubo.hpp"

namespace rbmkit {

// Backend contract: sample(p, n_reads, seed) returns exactly n_reads states
// (sum of multiplicities), each honoring every hard clamp unless the backend
// was built in soft-clamp mode. Backends hold no mutable state; reads derive
// per-read rng substreams from the seed, so results are independent of
// execution order.
class SamplerBackend {
public:
    virtual ~SamplerBackend() = default;
    virtual std::string name() const = 0;
    virtual SampleSet sample(const QuboProblem& p, int n_reads, std::uint64_t rng_seed) const = 0;
};

// Independent draws from the Boltzmann distribution of the problem at T=1 by
// full enumeration. Guarded to n_vars <= 20.
class ExactSampler final : public SamplerBackend {
public:
    explicit ExactSampler(bool soft_clamp = false) : soft_clamp_(soft_clamp) {}
    std::string name() const override { return "exact"; }
    SampleSet sample(const QuboProblem& p, int n_reads, std::uint64_t rng_seed) const override;

private:
    bool soft_clamp_;
};

struct SaParams {
    double beta_min = 0.1;
    double beta_max = 10.0;
    int sweeps = 1000;     // per read
    bool auto_scale = true;
    bool soft_clamp = false;
};

// n_reads independent anneals, each a geometric beta schedule of single-bit
// Metropolis sweeps from a random start; the final state of each anneal is
// returned. auto_scale rescales coefficients into [-1,1] before annealing;
// reported energies always refer to the original problem.
class SimulatedAnnealingSampler final : public SamplerBackend {
public:
    explicit SimulatedAnnealingSampler(SaParams params = {}) : params_(params) {}
    std::string name() const override { return "simulated_annealing"; }
    const SaParams& params() const { return params_; }
    SampleSet sample(const QuboProblem& p, int n_reads, std::uint64_t rng_seed) const override;

private:
    SaParams params_;
};

struct RemoteParams {
    double annealing_time_us = 20.0;
    bool auto_scale = true;
    bool soft_clamp = false;
    int timeout_seconds = 60;
};

// Submits the problem as JSON over HTTP POST <url>/sample and parses the
// returned states. A response may map one logical variable to a chain of
// physical bits; chains are resolved by majority vote (ties by a fair draw).
class RemoteSampler final : public SamplerBackend {
public:
    RemoteSampler(std::string url, RemoteParams params = {});
    std::string name() const override { return "remote"; }
    SampleSet sample(const QuboProblem& p, int n_reads, std::uint64_t rng_seed) const override;

private:
    std::string host_;
    int port_;
    RemoteParams params_;
};

// name: "exact", "sa" or "remote" (remote requires a URL).
std::unique_ptr<SamplerBackend> make_backend(const std::string& name, const SaParams& sa_params = {},
                                             const std::string& remote_url = "",
                                             const RemoteParams& remote_params = {});

} // namespace rbmkit
