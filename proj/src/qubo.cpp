#include "rbmkit/qubo.hpp"

#include <cmath>
#include <stdexcept>

namespace rbmkit {

double QuboProblem::energy(const BinaryVector& x) const {
    if (static_cast<int>(x.size()) != n_vars)
        throw std::invalid_argument("QuboProblem::energy: state length does not match n_vars");
    double e = 0.0;
    for (int j = 0; j < n_vars; ++j)
        if (x[static_cast<std::size_t>(j)]) e += linear(j);
    for (const auto& [key, value] : quadratic) {
        if (x[static_cast<std::size_t>(key.first)] && x[static_cast<std::size_t>(key.second)]) e += value;
    }
    return e;
}

void QuboProblem::validate() const {
    if (n_vars <= 0) throw std::invalid_argument("QuboProblem: n_vars must be > 0");
    if (linear.size() != n_vars) throw std::invalid_argument("QuboProblem: linear length mismatch");
    if (!linear.allFinite()) throw std::invalid_argument("QuboProblem: non-finite linear term");
    for (const auto& [key, value] : quadratic) {
        if (key.first >= key.second) throw std::invalid_argument("QuboProblem: quadratic keys must have i < j");
        if (key.first < 0 || key.second >= n_vars)
            throw std::invalid_argument("QuboProblem: quadratic index out of range");
        if (!std::isfinite(value)) throw std::invalid_argument("QuboProblem: non-finite quadratic term");
    }
    for (const auto& [idx, bit] : clamps) {
        if (idx < 0 || idx >= n_vars) throw std::invalid_argument("QuboProblem: clamp index out of range");
        if (bit > 1) throw std::invalid_argument("QuboProblem: clamp value must be 0 or 1");
    }
}

std::pair<QuboProblem, double> rbm_to_qubo(const RbmModel& m, double target_weight) {
    if (target_weight <= 0.0) throw std::invalid_argument("rbm_to_qubo: target_weight must be > 0");
    const int nv = m.n_visible();
    const int nh = m.n_hidden();

    double max_abs = std::max({m.weights.cwiseAbs().maxCoeff(), m.visible_bias.cwiseAbs().maxCoeff(),
                               m.hidden_bias.cwiseAbs().maxCoeff()});
    const double sf = max_abs > 0.0 ? max_abs / target_weight : 1.0;

    QuboProblem p;
    p.n_vars = nv + nh;
    p.linear.resize(p.n_vars);
    for (int j = 0; j < nv; ++j) p.linear(j) = -m.visible_bias(j) / sf;
    for (int i = 0; i < nh; ++i) p.linear(nv + i) = -m.hidden_bias(i) / sf;
    for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nv; ++j) {
            double w = m.weights(i, j);
            if (w != 0.0) p.quadratic[{j, nv + i}] = -w / sf;
        }
    return {std::move(p), sf};
}

QuboProblem clamp_vars(const QuboProblem& p, const std::map<int, Bit>& assignments, double strength) {
    if (strength <= 0.0) throw std::invalid_argument("clamp_vars: strength must be > 0");
    QuboProblem out = p;
    for (const auto& [idx, bit] : assignments) {
        if (idx < 0 || idx >= p.n_vars)
            throw std::invalid_argument("clamp_vars: index " + std::to_string(idx) + " out of range");
        out.linear(idx) = bit ? -strength : strength;
        out.clamps[idx] = bit ? 1 : 0;
    }
    return out;
}

JointState split_qubo_state(const BinaryVector& x, int n_visible, int n_hidden) {
    if (static_cast<int>(x.size()) != n_visible + n_hidden)
        throw std::invalid_argument("split_qubo_state: state length mismatch");
    JointState s;
    s.v.assign(x.begin(), x.begin() + n_visible);
    s.h.assign(x.begin() + n_visible, x.end());
    return s;
}

Bit majority_vote(const std::vector<Bit>& chain_bits, Rng& rng) {
    if (chain_bits.empty()) throw std::invalid_argument("majority_vote: empty chain");
    long ones = 0;
    for (Bit b : chain_bits) ones += b ? 1 : 0;
    const long zeros = static_cast<long>(chain_bits.size()) - ones;
    if (ones > zeros) return 1;
    if (ones < zeros) return 0;
    return bernoulli(rng, 0.5) ? 1 : 0;
}

long SampleSet::total_reads() const {
    long total = 0;
    for (long m : multiplicities) total += m;
    return total;
}

double ground_state_rate(const SampleSet& ss, double gs_energy, double tol) {
    if (tol < 0.0) throw std::invalid_argument("ground_state_rate: tol must be >= 0");
    const long total = ss.total_reads();
    if (total == 0) return 0.0;
    long hits = 0;
    for (std::size_t i = 0; i < ss.energies.size(); ++i)
        if (ss.energies[i] <= gs_energy + tol) hits += ss.multiplicities[i];
    return static_cast<double>(hits) / static_cast<double>(total);
}

} // namespace rbmkit
