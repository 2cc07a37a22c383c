#pragma once

#include "qbat/battery.hpp"
#include "qbat/state.hpp"

namespace qbat {

/// Base-2 von Neumann entropy -sum lambda log2 lambda, 0 log 0 := 0.
double von_neumann_entropy(const DensityMatrix& rho);

/// Tsallis entropy (1 - Tr rho^q) / (q - 1). Accepts any q > 1;
/// relation checking separately restricts to q >= 2.
double tsallis_entropy(const DensityMatrix& rho, double q);

/// Linear entropy 1 - Tr rho^2 (equals T_2).
double linear_entropy(const DensityMatrix& rho);

/// Sum of absolute off-diagonal entries in the computational basis.
double l1_coherence(const DensityMatrix& rho);

/// Same, in the eigenbasis of the supplied Hamiltonian.
double l1_coherence(const DensityMatrix& rho, const ObservableHamiltonian& h);

/// S(diag(rho)) - S(rho), off-diagonals zeroed in the computational basis.
double relative_entropy_coherence(const DensityMatrix& rho);
double relative_entropy_coherence(const DensityMatrix& rho, const ObservableHamiltonian& h);

/// Qubit closed form: equals the l1 coherence (2r). Throws
/// UnsupportedDimension for d > 2; the general case needs semidefinite
/// optimization and is out of scope.
double robustness_of_coherence_qubit(const QubitBatteryParams& q);
double robustness_of_coherence_qubit(const DensityMatrix& rho);

/// Wootters concurrence of a two-qubit state from the spin-flipped
/// spectrum of rho (sy x sy) rho* (sy x sy), conjugation in the
/// computational basis.
double concurrence(const DensityMatrix& rho_ab);

/// h((1 + sqrt(1 - C^2))/2) with binary entropy h.
double entanglement_of_formation(const DensityMatrix& rho_ab);

/// (1 - sqrt(1 - C^2))/2.
double geometric_measure(const DensityMatrix& rho_ab);

/// Binary entropy h(t) = -t log2 t - (1-t) log2 (1-t).
double binary_entropy(double t);

/// The four capacity relation sums of a qubit battery and whether each
/// holds at the given tolerance:
///   csu = C/E + S      >= 1
///   ctu = C/E + T_q    <= 1       (q >= 2)
///   clu = C^2/E^2 + 2L  = 1
///   ccu = C/E - Cohe   >= 0
struct RelationReport {
    double csu = 0;
    double ctu = 0;
    double clu = 0;
    double ccu = 0;
    bool csu_holds = false;
    bool ctu_holds = false;
    bool clu_holds = false;
    bool ccu_holds = false;
    double tolerance = 0;

    bool all_hold() const { return csu_holds && ctu_holds && clu_holds && ccu_holds; }
};

inline constexpr double kAnalyticRelationTol = 1e-9;
inline constexpr double kExperimentalRelationTol = 0.02;

RelationReport check_relations(const DensityMatrix& rho,
                               const ObservableHamiltonian& h,
                               double q = 2.0,
                               double tolerance = kAnalyticRelationTol);

/// Capacity gap alongside the standard entanglement measures of a
/// two-qubit state.
struct EntanglementReport {
    double capacity_gap = 0;
    double concurrence = 0;
    double eof = 0;
    double geometric = 0;
};

EntanglementReport entanglement_report(const DensityMatrix& rho_ab,
                                       const ObservableHamiltonian& h_a,
                                       const ObservableHamiltonian& h_b);

}  // namespace qbat
