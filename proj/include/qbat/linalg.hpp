#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qbat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class ErrorCode {
    NotHermitian,
    TraceNotOne,
    NotPositive,
    DimensionMismatch,
    NotUnitary,
    ConvergenceFailure,
    InvalidParams,
    InvalidStrength,
    InvalidOrder,
    UnsupportedDimension,
    EmptyRecord,
    UnderdeterminedSet,
    StatisticFailure,
    InternalInconsistency,
    IoError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

// Tolerances shared by all validation paths. Double-precision eigensolvers
// leave residuals of order 1e-12 or less on the matrix sizes handled here,
// so 1e-10 gives two orders of headroom.
inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdSlack = 1e-10;
inline constexpr double kUnitaryTol = 1e-10;

/// Largest entrywise absolute value.
double max_abs(const ComplexMatrix& m);

/// max |M - M^dagger| over entries.
double hermiticity_defect(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double tol = kHermTol);
bool is_unitary(const ComplexMatrix& m, double tol = kUnitaryTol);

/// Eigenvalues ascending, eigenvector columns orthonormal.
struct SpectralDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;
};

/// Hermitian eigendecomposition. Input is symmetrized before the solve;
/// throws NotHermitian if the defect exceeds the tolerance and
/// ConvergenceFailure if the solver does not converge.
SpectralDecomposition eigh(const ComplexMatrix& m);

/// Kronecker product, row-major convention with the left factor on
/// subsystem A.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qbat
