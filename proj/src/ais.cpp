#include "rbmkit/ais.hpp"

#include <cmath>
#include <stdexcept>

#include "rbmkit/rng.hpp"

namespace rbmkit {

namespace {

std::vector<double> beta_ladder(const AisConfig& cfg) {
    std::vector<double> betas(static_cast<std::size_t>(cfg.n_temps));
    const int K = cfg.n_temps;
    if (cfg.schedule == AisSchedule::linear) {
        for (int k = 0; k < K; ++k) betas[static_cast<std::size_t>(k)] = static_cast<double>(k) / (K - 1);
    } else {
        // log-spaced from eps to 1 with an exact 0 in front
        const double eps = 1e-4;
        betas[0] = 0.0;
        for (int k = 1; k < K; ++k)
            betas[static_cast<std::size_t>(k)] = std::exp(std::log(eps) * (1.0 - static_cast<double>(k) / (K - 1)));
    }
    return betas;
}

// Energy cross-term that the ladder anneals in: (c.h + h^T W v) / T.
double annealed_term(const RbmModel& m, const JointState& s) {
    double t = 0.0;
    for (int i = 0; i < m.n_hidden(); ++i) {
        if (!s.h[static_cast<std::size_t>(i)]) continue;
        t += m.hidden_bias(i);
        for (int j = 0; j < m.n_visible(); ++j)
            if (s.v[static_cast<std::size_t>(j)]) t += m.weights(i, j);
    }
    return t / m.temperature;
}

// One block Gibbs transition under the interpolated model: weights and hidden
// biases scaled by beta, visible biases blended from base_bias (when given)
// to the model's.
void gibbs_at_beta(const RbmModel& m, JointState& s, double beta, Rng& rng,
                   const Eigen::VectorXd* base_bias) {
    const double T = m.temperature;
    Eigen::VectorXd act_h = hidden_activation(m, s.v); // c + Wv
    for (int i = 0; i < m.n_hidden(); ++i)
        s.h[static_cast<std::size_t>(i)] = bernoulli(rng, sigmoid(beta * act_h(i) / T)) ? 1 : 0;
    for (int j = 0; j < m.n_visible(); ++j) {
        double bias = base_bias ? (1.0 - beta) * (*base_bias)(j) + beta * m.visible_bias(j)
                                : m.visible_bias(j);
        double coupling = 0.0;
        for (int i = 0; i < m.n_hidden(); ++i)
            if (s.h[static_cast<std::size_t>(i)]) coupling += m.weights(i, j);
        s.v[static_cast<std::size_t>(j)] = bernoulli(rng, sigmoid((bias + beta * coupling) / T)) ? 1 : 0;
    }
}

} // namespace

LogZEstimate ais_log_z(const RbmModel& m, const AisConfig& cfg) {
    m.validate();
    if (cfg.n_temps < 2) throw std::invalid_argument("ais_log_z: n_temps must be >= 2");
    if (cfg.n_chains < 1) throw std::invalid_argument("ais_log_z: n_chains must be >= 1");

    const Eigen::VectorXd& base_bias = cfg.base_visible_bias ? *cfg.base_visible_bias : m.visible_bias;
    if (base_bias.size() != m.n_visible())
        throw std::invalid_argument("ais_log_z: base visible bias length mismatch");

    const double T = m.temperature;
    const int nv = m.n_visible();
    const int nh = m.n_hidden();

    // Base RBM has zero weights and zero hidden biases, so its log Z is
    // analytic. The ladder only anneals the weights/hidden-bias cross-term,
    // which is exact when the base visible biases equal the model's; a
    // different base adds a (b - b_base).v term to each rung, handled below.
    double log_z_base = nh * std::log(2.0);
    for (int j = 0; j < nv; ++j) log_z_base += softplus(base_bias(j) / T);

    const bool bias_shift = cfg.base_visible_bias.has_value();
    Eigen::VectorXd delta_bias = m.visible_bias - base_bias;

    const std::vector<double> betas = beta_ladder(cfg);
    std::vector<double> log_weights(static_cast<std::size_t>(cfg.n_chains));

    for (int chain = 0; chain < cfg.n_chains; ++chain) {
        Rng rng = substream(cfg.rng_seed, static_cast<std::uint64_t>(chain));
        JointState s;
        s.v.resize(static_cast<std::size_t>(nv));
        s.h.resize(static_cast<std::size_t>(nh));
        for (int j = 0; j < nv; ++j)
            s.v[static_cast<std::size_t>(j)] = bernoulli(rng, sigmoid(base_bias(j) / T)) ? 1 : 0;
        for (int i = 0; i < nh; ++i) s.h[static_cast<std::size_t>(i)] = bernoulli(rng, 0.5) ? 1 : 0;

        double logw = 0.0;
        for (std::size_t k = 1; k < betas.size(); ++k) {
            const double d_beta = betas[k] - betas[k - 1];
            double incr = d_beta * annealed_term(m, s);
            if (bias_shift) {
                double dv = 0.0;
                for (int j = 0; j < nv; ++j)
                    if (s.v[static_cast<std::size_t>(j)]) dv += delta_bias(j);
                incr += d_beta * dv / T;
            }
            logw += incr;
            if (!std::isfinite(logw))
                throw std::runtime_error("ais_log_z: non-finite weight accumulation at rung " + std::to_string(k));
            gibbs_at_beta(m, s, betas[k], rng, bias_shift ? &base_bias : nullptr);
        }
        log_weights[static_cast<std::size_t>(chain)] = logw;
    }

    double max_w = log_weights[0];
    for (double w : log_weights) max_w = std::max(max_w, w);
    double sum = 0.0;
    for (double w : log_weights) sum += std::exp(w - max_w);
    const double n = static_cast<double>(cfg.n_chains);
    const double log_mean_w = max_w + std::log(sum / n);

    double std_err = 0.0;
    if (cfg.n_chains > 1) {
        const double mean_u = sum / n;
        double var_u = 0.0;
        for (double w : log_weights) {
            const double d = std::exp(w - max_w) - mean_u;
            var_u += d * d;
        }
        var_u /= (n - 1.0);
        std_err = std::sqrt(var_u / n) / mean_u;
    }
    return {log_z_base + log_mean_w, std_err, cfg.n_chains};
}

double log_likelihood(const RbmModel& m, const Dataset& data, double log_z) {
    if (!std::isfinite(log_z)) throw std::invalid_argument("log_likelihood: log_z must be finite");
    if (data.patterns.empty()) throw std::invalid_argument("log_likelihood: empty dataset");
    double total = 0.0;
    for (const LabeledPattern& p : data.patterns) total += free_energy_term(m, encode_visible(p)) - log_z;
    return total / static_cast<double>(data.patterns.size());
}

} // namespace rbmkit
