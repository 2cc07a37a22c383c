#pragma once

#include <cstdint>

#include "qbat/exec.hpp"
#include "qbat/state.hpp"

namespace qbat {

/// Energy bookkeeping of one battery state. All values in energy units.
/// capacity == ergotropy + antiergotropy holds by construction.
struct BatteryQuantities {
    double ergotropy = 0;
    double antiergotropy = 0;
    double capacity = 0;
    double passive_energy = 0;
    double active_energy = 0;
    double initial_energy = 0;
};

/// Two-level state parameters: rho = [[1-p, r e^{i theta}], [r e^{-i theta}, p]].
struct QubitBatteryParams {
    double p = 0;
    double r = 0;
    double theta_phase = 0;
};

/// Assemble the parameterized qubit matrix. Throws InvalidParams when
/// r^2 > p(1-p) beyond slack.
ComplexMatrix qubit_state(const QubitBatteryParams& q);

/// Lowest-energy state on the unitary orbit: ascending eigenvalues paired
/// with descending energy levels.
DensityMatrix passive_state(const DensityMatrix& rho, const ObservableHamiltonian& h);

/// Highest-energy state on the unitary orbit: ascending eigenvalues paired
/// with ascending energy levels.
DensityMatrix active_state(const DensityMatrix& rho, const ObservableHamiltonian& h);

/// Maximum unitarily extractable work, Tr(rho H) - Tr(passive H). Residues
/// in [-1e-10, 0) clamp to zero; anything more negative is an internal
/// inconsistency.
double ergotropy(const DensityMatrix& rho, const ObservableHamiltonian& h);

/// Maximum unitarily injectable work, Tr(active H) - Tr(rho H).
double antiergotropy(const DensityMatrix& rho, const ObservableHamiltonian& h);

BatteryQuantities capacity(const DensityMatrix& rho, const ObservableHamiltonian& h);

/// E * sqrt((2p-1)^2 + 4 r^2); agrees with capacity() on the assembled matrix.
double qubit_capacity_closed_form(const QubitBatteryParams& q, double unit_energy);

/// Global capacity under H_A (x) I + I (x) H_B minus the two marginal
/// capacities. Signed: no positivity claim is made outside the pure-state
/// families exercised by the tests.
double capacity_gap(const DensityMatrix& rho_ab,
                    const ObservableHamiltonian& h_a,
                    const ObservableHamiltonian& h_b);

struct OrbitExtrema {
    double min_energy = 0;
    double max_energy = 0;
};

/// Brute-force orbit oracle: extreme Tr(U rho U^dagger H) over n_samples
/// Haar unitaries plus all d! eigenbasis permutation unitaries. The
/// permutations attain the rearrangement optima exactly, so the result
/// bounds are hard, not statistical. Deterministic per seed; sample
/// batches evaluate concurrently under the parallel policy.
OrbitExtrema brute_force_work_extrema(const DensityMatrix& rho,
                                      const ObservableHamiltonian& h,
                                      int n_samples,
                                      std::uint64_t seed,
                                      ExecPolicy policy = ExecPolicy::parallel);

}  // namespace qbat
