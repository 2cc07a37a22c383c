#include "qbat/linalg.hpp"

#include <sstream>

namespace qbat {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::TraceNotOne: return "TraceNotOne";
        case ErrorCode::NotPositive: return "NotPositive";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::InvalidStrength: return "InvalidStrength";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
        case ErrorCode::EmptyRecord: return "EmptyRecord";
        case ErrorCode::UnderdeterminedSet: return "UnderdeterminedSet";
        case ErrorCode::StatisticFailure: return "StatisticFailure";
        case ErrorCode::InternalInconsistency: return "InternalInconsistency";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

double max_abs(const ComplexMatrix& m) {
    return m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
    return max_abs(m - m.adjoint());
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    ComplexMatrix gram = m.adjoint() * m;
    gram -= ComplexMatrix::Identity(m.rows(), m.cols());
    return max_abs(gram) <= tol;
}

SpectralDecomposition eigh(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "eigh: matrix is not square");
    }
    double defect = hermiticity_defect(m);
    if (defect > kHermTol) {
        std::ostringstream os;
        os << "eigh: hermiticity defect " << defect << " exceeds " << kHermTol;
        throw Error(ErrorCode::NotHermitian, os.str());
    }
    ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "eigh: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace qbat
