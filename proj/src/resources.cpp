#include "qbat/resources.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qbat {

namespace {

RealVector clamped_spectrum(const DensityMatrix& rho) {
    RealVector eigs = eigh(rho.matrix()).eigenvalues;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        if (eigs(i) < 0) {
            if (eigs(i) < -kPsdSlack) {
                std::ostringstream os;
                os << "spectrum: eigenvalue " << eigs(i) << " below reconstruction slack";
                throw Error(ErrorCode::NotPositive, os.str());
            }
            eigs(i) = 0;
        }
    }
    return eigs;
}

double entropy_of_spectrum(const RealVector& eigs) {
    double s = 0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        if (eigs(i) > 0) s -= eigs(i) * std::log2(eigs(i));
    }
    return std::max(s, 0.0);
}

ComplexMatrix to_eigenbasis(const DensityMatrix& rho, const ObservableHamiltonian& h) {
    if (rho.dim() != h.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "coherence: state/Hamiltonian dims differ");
    }
    return h.basis().adjoint() * rho.matrix() * h.basis();
}

double offdiag_abs_sum(const ComplexMatrix& m) {
    double sum = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j) sum += std::abs(m(i, j));
        }
    }
    return sum;
}

double diag_entropy(const ComplexMatrix& m) {
    double s = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double p = std::max(m(i, i).real(), 0.0);
        if (p > 0) s -= p * std::log2(p);
    }
    return s;
}

}  // namespace

double binary_entropy(double t) {
    double s = 0;
    if (t > 0) s -= t * std::log2(t);
    if (t < 1) s -= (1 - t) * std::log2(1 - t);
    return std::max(s, 0.0);
}

double von_neumann_entropy(const DensityMatrix& rho) {
    return entropy_of_spectrum(clamped_spectrum(rho));
}

double tsallis_entropy(const DensityMatrix& rho, double q) {
    if (q <= 1.0) {
        throw Error(ErrorCode::InvalidOrder, "tsallis entropy requires q > 1");
    }
    RealVector eigs = clamped_spectrum(rho);
    double power_sum = 0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) power_sum += std::pow(eigs(i), q);
    return (1.0 - power_sum) / (q - 1.0);
}

double linear_entropy(const DensityMatrix& rho) {
    // Tr rho^2 is the squared Frobenius norm for Hermitian rho.
    return 1.0 - rho.matrix().squaredNorm();
}

double l1_coherence(const DensityMatrix& rho) {
    return offdiag_abs_sum(rho.matrix());
}

double l1_coherence(const DensityMatrix& rho, const ObservableHamiltonian& h) {
    return offdiag_abs_sum(to_eigenbasis(rho, h));
}

double relative_entropy_coherence(const DensityMatrix& rho) {
    return std::max(diag_entropy(rho.matrix()) - von_neumann_entropy(rho), 0.0);
}

double relative_entropy_coherence(const DensityMatrix& rho, const ObservableHamiltonian& h) {
    return std::max(diag_entropy(to_eigenbasis(rho, h)) - von_neumann_entropy(rho), 0.0);
}

double robustness_of_coherence_qubit(const QubitBatteryParams& q) {
    // Equals the l1 coherence for states of the two-level form.
    return 2.0 * q.r;
}

double robustness_of_coherence_qubit(const DensityMatrix& rho) {
    if (rho.dim() != 2) {
        throw Error(ErrorCode::UnsupportedDimension,
                    "robustness of coherence: closed form is qubit-only");
    }
    return l1_coherence(rho);
}

double concurrence(const DensityMatrix& rho_ab) {
    if (rho_ab.dim() != 4) {
        throw Error(ErrorCode::DimensionMismatch, "concurrence: expected a 4x4 state");
    }
    ComplexMatrix sy(2, 2);
    sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    ComplexMatrix flip = kron(sy, sy);
    const ComplexMatrix& m = rho_ab.matrix();
    ComplexMatrix tilde = flip * m.conjugate() * flip;
    // sqrt(rho) tilde sqrt(rho) is Hermitian PSD and shares the nonzero
    // spectrum of rho * tilde; the Hermitian solve keeps the near-zero
    // eigenvalues at roundoff level instead of sqrt(roundoff).
    SpectralDecomposition rho_spec = eigh(m);
    ComplexMatrix sqrt_rho = rho_spec.eigenvectors *
                             rho_spec.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                             rho_spec.eigenvectors.adjoint();
    RealVector mu = eigh(sqrt_rho * tilde * sqrt_rho).eigenvalues;
    double floor = 1e-13 * std::max(mu.maxCoeff(), 0.0);
    std::array<double, 4> roots{};
    for (int i = 0; i < 4; ++i) {
        roots[i] = mu(i) > floor ? std::sqrt(mu(i)) : 0.0;
    }
    std::sort(roots.begin(), roots.end(), std::greater<>());
    double c = roots[0] - roots[1] - roots[2] - roots[3];
    return std::clamp(c, 0.0, 1.0);
}

double entanglement_of_formation(const DensityMatrix& rho_ab) {
    double c = concurrence(rho_ab);
    return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(1.0 - c * c, 0.0))));
}

double geometric_measure(const DensityMatrix& rho_ab) {
    double c = concurrence(rho_ab);
    return 0.5 * (1.0 - std::sqrt(std::max(1.0 - c * c, 0.0)));
}

RelationReport check_relations(const DensityMatrix& rho, const ObservableHamiltonian& h,
                               double q, double tolerance) {
    if (rho.dim() != 2 || h.dim() != 2) {
        throw Error(ErrorCode::UnsupportedDimension,
                    "check_relations: the trade-off relations are qubit statements");
    }
    if (q < 2.0) {
        throw Error(ErrorCode::InvalidOrder, "check_relations requires q >= 2");
    }
    double cap = capacity(rho, h).capacity / h.unit_energy();
    double s = von_neumann_entropy(rho);
    double tq = tsallis_entropy(rho, q);
    double lin = linear_entropy(rho);
    double cohe = l1_coherence(rho, h);

    RelationReport report;
    report.tolerance = tolerance;
    report.csu = cap + s;
    report.ctu = cap + tq;
    report.clu = cap * cap + 2.0 * lin;
    report.ccu = cap - cohe;
    report.csu_holds = report.csu >= 1.0 - tolerance;
    report.ctu_holds = report.ctu <= 1.0 + tolerance;
    report.clu_holds = std::abs(report.clu - 1.0) <= tolerance;
    report.ccu_holds = report.ccu >= -tolerance;
    return report;
}

EntanglementReport entanglement_report(const DensityMatrix& rho_ab,
                                       const ObservableHamiltonian& h_a,
                                       const ObservableHamiltonian& h_b) {
    EntanglementReport out;
    out.capacity_gap = capacity_gap(rho_ab, h_a, h_b);
    out.concurrence = concurrence(rho_ab);
    double root = std::sqrt(std::max(1.0 - out.concurrence * out.concurrence, 0.0));
    out.eof = binary_entropy(0.5 * (1.0 + root));
    out.geometric = 0.5 * (1.0 - root);
    return out;
}

}  // namespace qbat
