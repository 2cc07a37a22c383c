#include "qbat/battery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "qbat/rng.hpp"

namespace qbat {

namespace {

constexpr double kResidueTol = 1e-10;

void require_same_dim(const DensityMatrix& rho, const ObservableHamiltonian& h,
                      const char* where) {
    if (rho.dim() != h.dim()) {
        std::ostringstream os;
        os << where << ": state dim " << rho.dim() << " vs Hamiltonian dim " << h.dim();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

double clamp_residue(double value, const char* what) {
    if (value < -kResidueTol) {
        std::ostringstream os;
        os << what << " is " << value << ", below the -1e-10 residue tolerance";
        throw Error(ErrorCode::InternalInconsistency, os.str());
    }
    return std::max(value, 0.0);
}

/// Energies of the rearranged extreme states: ascending eigenvalues paired
/// with descending (passive) or ascending (active) energy levels.
struct RearrangedEnergies {
    double passive = 0;
    double active = 0;
    RealVector state_eigenvalues;  // ascending
};

RearrangedEnergies rearranged_energies(const DensityMatrix& rho,
                                       const ObservableHamiltonian& h) {
    SpectralDecomposition spec = eigh(rho.matrix());
    RealVector energies = h.energies();
    const Eigen::Index d = spec.eigenvalues.size();
    RearrangedEnergies out;
    out.state_eigenvalues = spec.eigenvalues;
    for (Eigen::Index i = 0; i < d; ++i) {
        out.passive += spec.eigenvalues(i) * energies(d - 1 - i);
        out.active += spec.eigenvalues(i) * energies(i);
    }
    return out;
}

DensityMatrix rearranged_state(const DensityMatrix& rho, const ObservableHamiltonian& h,
                               bool passive) {
    SpectralDecomposition spec = eigh(rho.matrix());
    const Eigen::Index d = spec.eigenvalues.size();
    RealVector weights(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        // Weight attached to the energy eigenvector |eps_j>.
        weights(i) = passive ? spec.eigenvalues(d - 1 - i) : spec.eigenvalues(i);
    }
    ComplexMatrix m = h.basis() * weights.cwiseMax(0.0).asDiagonal() * h.basis().adjoint();
    m /= m.trace().real();
    return DensityMatrix::validated(m);
}

}  // namespace

ComplexMatrix qubit_state(const QubitBatteryParams& q) {
    if (q.p < 0 || q.p > 1) {
        throw Error(ErrorCode::InvalidParams, "qubit params: p must lie in [0,1]");
    }
    if (q.r < 0 || q.r * q.r > q.p * (1 - q.p) + 1e-12) {
        throw Error(ErrorCode::InvalidParams, "qubit params: r^2 exceeds p(1-p)");
    }
    Complex off = q.r * Complex(std::cos(q.theta_phase), std::sin(q.theta_phase));
    ComplexMatrix m(2, 2);
    m << Complex(1 - q.p, 0), off, std::conj(off), Complex(q.p, 0);
    return m;
}

DensityMatrix passive_state(const DensityMatrix& rho, const ObservableHamiltonian& h) {
    require_same_dim(rho, h, "passive_state");
    return rearranged_state(rho, h, true);
}

DensityMatrix active_state(const DensityMatrix& rho, const ObservableHamiltonian& h) {
    require_same_dim(rho, h, "active_state");
    return rearranged_state(rho, h, false);
}

double ergotropy(const DensityMatrix& rho, const ObservableHamiltonian& h) {
    require_same_dim(rho, h, "ergotropy");
    double initial = expectation(rho, h);
    return clamp_residue(initial - rearranged_energies(rho, h).passive, "ergotropy");
}

double antiergotropy(const DensityMatrix& rho, const ObservableHamiltonian& h) {
    require_same_dim(rho, h, "antiergotropy");
    double initial = expectation(rho, h);
    return clamp_residue(rearranged_energies(rho, h).active - initial, "antiergotropy");
}

BatteryQuantities capacity(const DensityMatrix& rho, const ObservableHamiltonian& h) {
    require_same_dim(rho, h, "capacity");
    RearrangedEnergies extremes = rearranged_energies(rho, h);
    BatteryQuantities out;
    out.initial_energy = expectation(rho, h);
    out.passive_energy = extremes.passive;
    out.active_energy = extremes.active;
    out.ergotropy = clamp_residue(out.initial_energy - extremes.passive, "ergotropy");
    out.antiergotropy = clamp_residue(extremes.active - out.initial_energy, "antiergotropy");
    out.capacity = out.ergotropy + out.antiergotropy;
    return out;
}

double qubit_capacity_closed_form(const QubitBatteryParams& q, double unit_energy) {
    if (q.p < 0 || q.p > 1 || q.r < 0 || q.r * q.r > q.p * (1 - q.p) + 1e-12) {
        throw Error(ErrorCode::InvalidParams, "qubit capacity: parameters outside the valid region");
    }
    double two_p_minus_1 = 2 * q.p - 1;
    return unit_energy * std::sqrt(two_p_minus_1 * two_p_minus_1 + 4 * q.r * q.r);
}

double capacity_gap(const DensityMatrix& rho_ab, const ObservableHamiltonian& h_a,
                    const ObservableHamiltonian& h_b) {
    if (rho_ab.dim() != 4 || h_a.dim() != 2 || h_b.dim() != 2) {
        throw Error(ErrorCode::DimensionMismatch,
                    "capacity_gap: expected a 4x4 state with qubit Hamiltonians");
    }
    ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
    ComplexMatrix h_ab = kron(h_a.matrix(), id2) + kron(id2, h_b.matrix());
    ObservableHamiltonian global = ObservableHamiltonian::from_matrix(h_ab, h_a.unit_energy());
    double global_cap = capacity(rho_ab, global).capacity;
    double local_a = capacity(partial_trace(rho_ab, Subsystem::A), h_a).capacity;
    double local_b = capacity(partial_trace(rho_ab, Subsystem::B), h_b).capacity;
    return global_cap - local_a - local_b;
}

OrbitExtrema brute_force_work_extrema(const DensityMatrix& rho,
                                      const ObservableHamiltonian& h, int n_samples,
                                      std::uint64_t seed, ExecPolicy policy) {
    require_same_dim(rho, h, "brute_force_work_extrema");
    if (n_samples < 1) {
        throw Error(ErrorCode::InvalidParams, "brute_force_work_extrema: n_samples must be >= 1");
    }
    const int d = static_cast<int>(rho.dim());
    const ComplexMatrix& m = rho.matrix();
    const ComplexMatrix& hm = h.matrix();

    auto orbit_energy = [&](const ComplexMatrix& u) {
        return (u * m * u.adjoint() * hm).trace().real();
    };

    // All d! permutation unitaries V_H P V_rho^dagger; these map the state
    // eigenbasis onto the energy eigenbasis and attain the rearrangement
    // extremes exactly.
    SpectralDecomposition rho_spec = eigh(m);
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    double min_energy = std::numeric_limits<double>::infinity();
    double max_energy = -std::numeric_limits<double>::infinity();
    do {
        ComplexMatrix p = ComplexMatrix::Zero(d, d);
        for (int i = 0; i < d; ++i) p(perm[i], i) = 1.0;
        double w = orbit_energy(h.basis() * p * rho_spec.eigenvectors.adjoint());
        min_energy = std::min(min_energy, w);
        max_energy = std::max(max_energy, w);
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for reduction(min : min_energy) reduction(max : max_energy) \
    schedule(static)
        for (int i = 0; i < n_samples; ++i) {
            rng::Stream stream(seed, static_cast<std::uint64_t>(i));
            double w = orbit_energy(rng::haar_unitary(d, stream));
            min_energy = std::min(min_energy, w);
            max_energy = std::max(max_energy, w);
        }
    } else {
        for (int i = 0; i < n_samples; ++i) {
            rng::Stream stream(seed, static_cast<std::uint64_t>(i));
            double w = orbit_energy(rng::haar_unitary(d, stream));
            min_energy = std::min(min_energy, w);
            max_energy = std::max(max_energy, w);
        }
    }
    return {min_energy, max_energy};
}

}  // namespace qbat
