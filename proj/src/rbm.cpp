#include "rbmkit/rbm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rbmkit/rng.hpp"

namespace rbmkit {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

void check_visible(const RbmModel& m, const BinaryVector& v) {
    require(static_cast<int>(v.size()) == m.n_visible(),
            "visible vector length " + std::to_string(v.size()) + " does not match model n_visible " +
                std::to_string(m.n_visible()));
}

void check_hidden(const RbmModel& m, const BinaryVector& h) {
    require(static_cast<int>(h.size()) == m.n_hidden(),
            "hidden vector length " + std::to_string(h.size()) + " does not match model n_hidden " +
                std::to_string(m.n_hidden()));
}

} // namespace

void RbmModel::validate() const {
    require(weights.rows() > 0 && weights.cols() > 0, "model must have at least one unit per layer");
    require(visible_bias.size() == weights.cols(), "visible_bias length does not match weights");
    require(hidden_bias.size() == weights.rows(), "hidden_bias length does not match weights");
    require(temperature > 0.0, "temperature must be > 0");
    require(weights.allFinite() && visible_bias.allFinite() && hidden_bias.allFinite(),
            "model parameters must be finite");
}

RbmModel make_zero_model(int n_visible, int n_hidden, double temperature) {
    RbmModel m;
    m.weights = Eigen::MatrixXd::Zero(n_hidden, n_visible);
    m.visible_bias = Eigen::VectorXd::Zero(n_visible);
    m.hidden_bias = Eigen::VectorXd::Zero(n_hidden);
    m.temperature = temperature;
    return m;
}

RbmModel make_random_model(int n_visible, int n_hidden, double weight_sigma, std::uint64_t seed,
                           double temperature) {
    RbmModel m = make_zero_model(n_visible, n_hidden, temperature);
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, weight_sigma);
    for (int i = 0; i < n_hidden; ++i)
        for (int j = 0; j < n_visible; ++j) m.weights(i, j) = normal(rng);
    return m;
}

GradientSet GradientSet::zeros(int n_visible, int n_hidden) {
    return {Eigen::MatrixXd::Zero(n_hidden, n_visible), Eigen::VectorXd::Zero(n_visible),
            Eigen::VectorXd::Zero(n_hidden)};
}

double energy(const RbmModel& m, const JointState& s) {
    check_visible(m, s.v);
    check_hidden(m, s.h);
    double e = 0.0;
    for (int j = 0; j < m.n_visible(); ++j)
        if (s.v[static_cast<std::size_t>(j)]) e -= m.visible_bias(j);
    for (int i = 0; i < m.n_hidden(); ++i) {
        if (!s.h[static_cast<std::size_t>(i)]) continue;
        e -= m.hidden_bias(i);
        double row = 0.0;
        for (int j = 0; j < m.n_visible(); ++j)
            if (s.v[static_cast<std::size_t>(j)]) row += m.weights(i, j);
        e -= row;
    }
    return e;
}

Eigen::VectorXd hidden_activation(const RbmModel& m, const BinaryVector& v) {
    check_visible(m, v);
    Eigen::VectorXd act = m.hidden_bias;
    for (int j = 0; j < m.n_visible(); ++j)
        if (v[static_cast<std::size_t>(j)]) act += m.weights.col(j);
    return act;
}

Eigen::VectorXd visible_activation(const RbmModel& m, const BinaryVector& h) {
    check_hidden(m, h);
    Eigen::VectorXd act = m.visible_bias;
    for (int i = 0; i < m.n_hidden(); ++i)
        if (h[static_cast<std::size_t>(i)]) act += m.weights.row(i).transpose();
    return act;
}

Eigen::VectorXd hidden_conditionals(const RbmModel& m, const BinaryVector& v) {
    Eigen::VectorXd act = hidden_activation(m, v);
    return act.unaryExpr([&](double a) { return sigmoid(a / m.temperature); });
}

Eigen::VectorXd visible_conditionals(const RbmModel& m, const BinaryVector& h) {
    Eigen::VectorXd act = visible_activation(m, h);
    return act.unaryExpr([&](double a) { return sigmoid(a / m.temperature); });
}

GradientSet loglik_gradient(const RbmModel& m, const std::vector<BinaryVector>& data_batch,
                            const std::vector<JointState>& model_sample) {
    if (data_batch.empty()) throw std::invalid_argument("loglik_gradient: empty data batch");
    if (model_sample.empty()) throw std::invalid_argument("loglik_gradient: empty model sample");

    const int nv = m.n_visible();
    const int nh = m.n_hidden();
    GradientSet pos = GradientSet::zeros(nv, nh);
    GradientSet neg = GradientSet::zeros(nv, nh);

    auto accumulate = [&](GradientSet& g, const BinaryVector& v) {
        Eigen::VectorXd p = hidden_conditionals(m, v);
        for (int j = 0; j < nv; ++j) {
            if (!v[static_cast<std::size_t>(j)]) continue;
            g.d_weights.col(j) += p;
            g.d_visible_bias(j) += 1.0;
        }
        g.d_hidden_bias += p;
    };

    for (const BinaryVector& v : data_batch) accumulate(pos, v);
    for (const JointState& s : model_sample) accumulate(neg, s.v);

    // d lnL/d theta carries a 1/T factor from the Boltzmann exponent; at the
    // reference T = 1 this is the plain positive-minus-negative difference.
    const double scale_pos = 1.0 / (static_cast<double>(data_batch.size()) * m.temperature);
    const double scale_neg = 1.0 / (static_cast<double>(model_sample.size()) * m.temperature);
    GradientSet g = GradientSet::zeros(nv, nh);
    g.d_weights = pos.d_weights * scale_pos - neg.d_weights * scale_neg;
    g.d_visible_bias = pos.d_visible_bias * scale_pos - neg.d_visible_bias * scale_neg;
    g.d_hidden_bias = pos.d_hidden_bias * scale_pos - neg.d_hidden_bias * scale_neg;
    return g;
}

void apply_update(RbmModel& m, const GradientSet& g, double lr, double l2, double momentum,
                  GradientSet& velocity) {
    if (lr <= 0.0) throw std::invalid_argument("apply_update: lr must be > 0");
    if (l2 < 0.0) throw std::invalid_argument("apply_update: l2 must be >= 0");
    if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("apply_update: momentum must be in [0,1)");

    velocity.d_weights = momentum * velocity.d_weights + lr * (g.d_weights - l2 * m.weights);
    velocity.d_visible_bias = momentum * velocity.d_visible_bias + lr * (g.d_visible_bias - l2 * m.visible_bias);
    velocity.d_hidden_bias = momentum * velocity.d_hidden_bias + lr * (g.d_hidden_bias - l2 * m.hidden_bias);

    m.weights += velocity.d_weights;
    m.visible_bias += velocity.d_visible_bias;
    m.hidden_bias += velocity.d_hidden_bias;

    if (!m.weights.allFinite() || !m.visible_bias.allFinite() || !m.hidden_bias.allFinite())
        throw std::runtime_error("apply_update: parameter update produced a non-finite value");
}

double free_energy_term(const RbmModel& m, const BinaryVector& v) {
    check_visible(m, v);
    const double T = m.temperature;
    double term = 0.0;
    for (int j = 0; j < m.n_visible(); ++j)
        if (v[static_cast<std::size_t>(j)]) term += m.visible_bias(j);
    term /= T;
    Eigen::VectorXd act = hidden_activation(m, v);
    for (int i = 0; i < m.n_hidden(); ++i) term += softplus(act(i) / T);
    return term;
}

double exact_log_partition(const RbmModel& m) {
    const int nv = m.n_visible();
    const int nh = m.n_hidden();
    if (nv + nh > 26)
        throw std::invalid_argument("exact_log_partition: model too large (" + std::to_string(nv + nh) +
                                    " units, limit 26)");

    // Enumerate the smaller layer; marginalize the other analytically. For a
    // hidden-layer enumeration the marginal term is symmetric to
    // free_energy_term with the roles of the layers swapped.
    const bool enumerate_visible = nv <= nh;
    const int n_enum = enumerate_visible ? nv : nh;
    const double T = m.temperature;

    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(1) << n_enum);
    for (std::uint64_t idx = 0; idx < (static_cast<std::uint64_t>(1) << n_enum); ++idx) {
        BinaryVector bits = bits_from_index(idx, n_enum);
        double t;
        if (enumerate_visible) {
            t = free_energy_term(m, bits);
        } else {
            double lin = 0.0;
            for (int i = 0; i < nh; ++i)
                if (bits[static_cast<std::size_t>(i)]) lin += m.hidden_bias(i);
            t = lin / T;
            Eigen::VectorXd act = visible_activation(m, bits);
            for (int j = 0; j < nv; ++j) t += softplus(act(j) / T);
        }
        terms.push_back(t);
        max_term = std::max(max_term, t);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - max_term);
    return max_term + std::log(acc);
}

} // namespace rbmkit
