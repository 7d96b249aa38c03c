#pragma once

#include <map>
#include <utility>
#include <vector>

#include "rbmkit/rbm.hpp"
#include "rbmkit/rng.hpp"
#include "rbmkit/types.hpp"

namespace rbmkit {

// Quadratic unconstrained binary optimization problem over x in {0,1}^n with
// energy E(x) = sum_{i<j} Q_ij x_i x_j + sum_j l_j x_j. Clamped variables are
// both biased through their linear term and registered for hard fixing inside
// backends.
struct QuboProblem {
    int n_vars = 0;
    Eigen::VectorXd linear;
    std::map<std::pair<int, int>, double> quadratic; // keys with i < j only
    std::map<int, Bit> clamps;

    double energy(const BinaryVector& x) const;
    void validate() const;
};

// Encodes the RBM as a QUBO with variable order visible 0..n_v-1 then hidden,
// scaled so each coefficient magnitude is at most target_weight:
// sf = max(|w|,|b|,|c|) / target_weight (1 when all parameters are zero), and
// sf * qubo_energy(x) == rbm_energy(x) for every state with no additive
// offset.
std::pair<QuboProblem, double> rbm_to_qubo(const RbmModel& m, double target_weight);

// Overwrites each assigned variable's linear term with +-strength so the
// assigned bit is maximally favored, and registers the assignment in clamps.
QuboProblem clamp_vars(const QuboProblem& p, const std::map<int, Bit>& assignments, double strength = 4.0);

// Splits a QUBO state back into the (v,h) layers of the model it encodes.
JointState split_qubo_state(const BinaryVector& x, int n_visible, int n_hidden);

// Majority bit of a physical-qubit chain; an exact tie is resolved by a fair
// draw from rng.
Bit majority_vote(const std::vector<Bit>& chain_bits, Rng& rng);

struct SampleSet {
    std::vector<BinaryVector> states;
    std::vector<double> energies;
    std::vector<long> multiplicities;

    long total_reads() const;
};

// Multiplicity-weighted fraction of reads with energy <= gs_energy + tol.
double ground_state_rate(const SampleSet& ss, double gs_energy, double tol);

} // namespace rbmkit
