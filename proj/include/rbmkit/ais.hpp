#pragma once

#include <cstdint>
#include <optional>

#include "rbmkit/dataset.hpp"
#include "rbmkit/rbm.hpp"

namespace rbmkit {

enum class AisSchedule { linear, geometric };

struct AisConfig {
    int n_temps = 1000;  // beta ladder size including the 0 and 1 endpoints
    int n_chains = 100;
    AisSchedule schedule = AisSchedule::linear;
    std::uint64_t rng_seed = 0;
    // Visible biases of the base distribution; the model's own by default.
    std::optional<Eigen::VectorXd> base_visible_bias;
};

struct LogZEstimate {
    double log_z = 0.0;
    double std_err = 0.0;
    int n_chains = 0;
};

// Annealed importance sampling estimate of ln Z. The base distribution is a
// zero-weight RBM with the configured visible biases and zero hidden biases;
// rung k interpolates the weights and hidden biases by beta_k, with one block
// Gibbs transition per rung. log_z is the log-mean-exp of the chain weights
// plus the analytic base log Z; std_err comes from the chain weight variance.
LogZEstimate ais_log_z(const RbmModel& m, const AisConfig& cfg);

// Mean over the dataset of ln p(v) = free_energy_term(v) - log_z.
double log_likelihood(const RbmModel& m, const Dataset& data, double log_z);

} // namespace rbmkit
