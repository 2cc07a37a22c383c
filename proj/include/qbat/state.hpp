#pragma once

#include "qbat/linalg.hpp"

namespace qbat {

/// Validated quantum state: Hermitian, unit trace, positive semidefinite
/// (up to the shared numerical slack). Construction is the only validation
/// point; instances are immutable afterwards.
class DensityMatrix {
public:
    /// Throws NotHermitian / TraceNotOne / NotPositive with the violation
    /// magnitude in the message.
    static DensityMatrix validated(const ComplexMatrix& m);

    const ComplexMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

private:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

/// Alias for the spec-facing name.
DensityMatrix validate_density(const ComplexMatrix& m);

/// Bare Hamiltonian H = sum_i eps_i E |eps_i><eps_i| with dimensionless
/// ascending levels eps_i and unit energy E.
class ObservableHamiltonian {
public:
    static ObservableHamiltonian from_levels(const RealVector& ascending_levels,
                                             const ComplexMatrix& eigenbasis,
                                             double unit_energy);

    /// Eigendecomposes a Hermitian matrix given in energy units.
    static ObservableHamiltonian from_matrix(const ComplexMatrix& h,
                                             double unit_energy);

    /// Diagonal Hamiltonian in the computational basis.
    static ObservableHamiltonian diagonal(const RealVector& ascending_levels,
                                          double unit_energy);

    const ComplexMatrix& matrix() const { return matrix_; }
    const RealVector& levels() const { return levels_; }
    const ComplexMatrix& basis() const { return basis_; }
    double unit_energy() const { return unit_energy_; }
    Eigen::Index dim() const { return levels_.size(); }

    /// eps_i * E, ascending.
    RealVector energies() const { return levels_ * unit_energy_; }

private:
    ObservableHamiltonian(RealVector levels, ComplexMatrix basis, double unit_energy);

    RealVector levels_;
    ComplexMatrix basis_;
    double unit_energy_;
    ComplexMatrix matrix_;
};

enum class Subsystem { A, B };

/// Tr(rho H) in energy units. The imaginary residue must stay below 1e-10.
double expectation(const DensityMatrix& rho, const ObservableHamiltonian& h);

/// Reduce a 2x2-bipartite 4x4 state to one factor. Subsystem A is the left
/// tensor factor in the row-major layout.
DensityMatrix partial_trace(const DensityMatrix& rho_ab, Subsystem keep);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2, clamped to [0,1].
double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

DensityMatrix tensor(const DensityMatrix& rho_a, const DensityMatrix& rho_b);

/// rho -> U rho U^dagger. Throws NotUnitary if U fails the unitarity check.
DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u);

}  // namespace qbat
