#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "rbmkit/types.hpp"

namespace rbmkit {

// Binary RBM with energy E(v,h) = -(b.v + c.h + h^T W v) and Boltzmann
// distribution p(v,h) = exp(-E/T)/Z.
struct RbmModel {
    Eigen::MatrixXd weights;      // n_hidden x n_visible
    Eigen::VectorXd visible_bias; // n_visible
    Eigen::VectorXd hidden_bias;  // n_hidden
    double temperature = 1.0;

    int n_visible() const { return static_cast<int>(weights.cols()); }
    int n_hidden() const { return static_cast<int>(weights.rows()); }

    // Throws std::invalid_argument on inconsistent shapes, non-finite
    // parameters or T <= 0.
    void validate() const;
};

RbmModel make_zero_model(int n_visible, int n_hidden, double temperature = 1.0);

// Weights ~ N(0, sigma^2), biases 0.
RbmModel make_random_model(int n_visible, int n_hidden, double weight_sigma,
                           std::uint64_t seed, double temperature = 1.0);

struct GradientSet {
    Eigen::MatrixXd d_weights;
    Eigen::VectorXd d_visible_bias;
    Eigen::VectorXd d_hidden_bias;

    static GradientSet zeros(int n_visible, int n_hidden);
};

double energy(const RbmModel& m, const JointState& s);

// Pre-sigmoid inputs: c + W v  and  b + W^T h.
Eigen::VectorXd hidden_activation(const RbmModel& m, const BinaryVector& v);
Eigen::VectorXd visible_activation(const RbmModel& m, const BinaryVector& h);

// p(H_i = 1 | v) = sigmoid((c_i + sum_j w_ij v_j) / T), elementwise; and the
// symmetric visible-side conditional.
Eigen::VectorXd hidden_conditionals(const RbmModel& m, const BinaryVector& v);
Eigen::VectorXd visible_conditionals(const RbmModel& m, const BinaryVector& h);

// Log-likelihood gradient d ln L / d theta averaged over the data batch, with
// the negative phase estimated from the given model sample. The hidden-layer
// statistics are marginalized analytically on both sides, so only visible
// configurations of the sample states enter.
GradientSet loglik_gradient(const RbmModel& m, const std::vector<BinaryVector>& data_batch,
                            const std::vector<JointState>& model_sample);

// Momentum + L2 step: velocity <- momentum*velocity + lr*(g - l2*theta),
// theta <- theta + velocity. L2 decays weights and biases alike. Throws on a
// non-finite result.
void apply_update(RbmModel& m, const GradientSet& g, double lr, double l2, double momentum,
                  GradientSet& velocity);

// ln Z by exact enumeration of the smaller layer with the other layer
// marginalized analytically; log-sum-exp stabilized. Guarded to
// n_visible + n_hidden <= 26.
double exact_log_partition(const RbmModel& m);

// ln sum_h exp(-E(v,h)/T) = b.v/T + sum_i softplus((c_i + (Wv)_i)/T).
double free_energy_term(const RbmModel& m, const BinaryVector& v);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double softplus(double x) {
    // log1p(exp(x)) without overflow for large x
    return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

} // namespace rbmkit
