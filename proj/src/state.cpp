#include "qbat/state.hpp"

#include <cmath>
#include <sstream>

namespace qbat {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
    if (a != b) {
        std::ostringstream os;
        os << where << ": dimension mismatch " << a << " vs " << b;
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

}  // namespace

DensityMatrix DensityMatrix::validated(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw Error(ErrorCode::DimensionMismatch, "density matrix must be square and non-empty");
    }
    if (!m.allFinite()) {
        throw Error(ErrorCode::InvalidParams, "density matrix has non-finite entries");
    }
    double herm = hermiticity_defect(m);
    if (herm > kHermTol) {
        std::ostringstream os;
        os << "NotHermitian: max |M - M^dagger| = " << herm << " > " << kHermTol;
        throw Error(ErrorCode::NotHermitian, os.str());
    }
    double trace_dev = std::abs(m.trace() - Complex(1.0, 0.0));
    if (trace_dev > kTraceTol) {
        std::ostringstream os;
        os << "TraceNotOne: |trace - 1| = " << trace_dev << " > " << kTraceTol;
        throw Error(ErrorCode::TraceNotOne, os.str());
    }
    ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "density validation: eigensolver failed");
    }
    double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -kPsdSlack) {
        std::ostringstream os;
        os << "NotPositive: smallest eigenvalue " << min_eig << " < " << -kPsdSlack;
        throw Error(ErrorCode::NotPositive, os.str());
    }
    return DensityMatrix(sym);
}

DensityMatrix validate_density(const ComplexMatrix& m) {
    return DensityMatrix::validated(m);
}

ObservableHamiltonian::ObservableHamiltonian(RealVector levels, ComplexMatrix basis,
                                             double unit_energy)
    : levels_(std::move(levels)), basis_(std::move(basis)), unit_energy_(unit_energy) {
    matrix_ = basis_ * (levels_ * unit_energy_).asDiagonal() * basis_.adjoint();
}

ObservableHamiltonian ObservableHamiltonian::from_levels(const RealVector& ascending_levels,
                                                         const ComplexMatrix& eigenbasis,
                                                         double unit_energy) {
    if (unit_energy <= 0) {
        throw Error(ErrorCode::InvalidParams, "unit energy must be positive");
    }
    const Eigen::Index d = ascending_levels.size();
    if (eigenbasis.rows() != d || eigenbasis.cols() != d || d < 1) {
        throw Error(ErrorCode::DimensionMismatch, "eigenbasis shape does not match level count");
    }
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
        if (ascending_levels(i) > ascending_levels(i + 1)) {
            throw Error(ErrorCode::InvalidParams, "eigenenergies must be ascending");
        }
    }
    if (!is_unitary(eigenbasis)) {
        throw Error(ErrorCode::NotUnitary, "eigenbasis columns are not orthonormal");
    }
    return ObservableHamiltonian(ascending_levels, eigenbasis, unit_energy);
}

ObservableHamiltonian ObservableHamiltonian::from_matrix(const ComplexMatrix& h,
                                                         double unit_energy) {
    if (unit_energy <= 0) {
        throw Error(ErrorCode::InvalidParams, "unit energy must be positive");
    }
    SpectralDecomposition spec = eigh(h);
    return ObservableHamiltonian(spec.eigenvalues / unit_energy, spec.eigenvectors,
                                 unit_energy);
}

ObservableHamiltonian ObservableHamiltonian::diagonal(const RealVector& ascending_levels,
                                                      double unit_energy) {
    const Eigen::Index d = ascending_levels.size();
    return from_levels(ascending_levels, ComplexMatrix::Identity(d, d), unit_energy);
}

double expectation(const DensityMatrix& rho, const ObservableHamiltonian& h) {
    require_same_dim(rho.dim(), h.dim(), "expectation");
    Complex tr = (rho.matrix() * h.matrix()).trace();
    if (std::abs(tr.imag()) > 1e-10 * std::max(1.0, std::abs(tr.real()))) {
        throw Error(ErrorCode::InternalInconsistency,
                    "expectation: imaginary residue above tolerance");
    }
    return tr.real();
}

DensityMatrix partial_trace(const DensityMatrix& rho_ab, Subsystem keep) {
    if (rho_ab.dim() != 4) {
        throw Error(ErrorCode::DimensionMismatch,
                    "partial_trace: expected a 4x4 bipartite qubit state");
    }
    const ComplexMatrix& m = rho_ab.matrix();
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    // Row-major tensor layout, subsystem A is the left factor: index = 2a + b.
    if (keep == Subsystem::A) {
        for (int a = 0; a < 2; ++a)
            for (int a2 = 0; a2 < 2; ++a2)
                for (int b = 0; b < 2; ++b) out(a, a2) += m(2 * a + b, 2 * a2 + b);
    } else {
        for (int b = 0; b < 2; ++b)
            for (int b2 = 0; b2 < 2; ++b2)
                for (int a = 0; a < 2; ++a) out(b, b2) += m(2 * a + b, 2 * a + b2);
    }
    return DensityMatrix::validated(out);
}

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    require_same_dim(rho1.dim(), rho2.dim(), "fidelity");
    SpectralDecomposition spec = eigh(rho1.matrix());
    RealVector clamped = spec.eigenvalues.cwiseMax(0.0);
    ComplexMatrix sqrt1 = spec.eigenvectors * clamped.cwiseSqrt().asDiagonal() *
                          spec.eigenvectors.adjoint();
    ComplexMatrix inner = sqrt1 * rho2.matrix() * sqrt1;
    SpectralDecomposition inner_spec = eigh(inner);
    double root_sum = inner_spec.eigenvalues.cwiseMax(0.0).cwiseSqrt().sum();
    double f = root_sum * root_sum;
    return std::clamp(f, 0.0, 1.0);
}

DensityMatrix tensor(const DensityMatrix& rho_a, const DensityMatrix& rho_b) {
    return DensityMatrix::validated(kron(rho_a.matrix(), rho_b.matrix()));
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u) {
    require_same_dim(rho.dim(), u.rows(), "apply_unitary");
    if (!is_unitary(u)) {
        throw Error(ErrorCode::NotUnitary, "apply_unitary: U^dagger U deviates from identity");
    }
    return DensityMatrix::validated(u * rho.matrix() * u.adjoint());
}

}  // namespace qbat
