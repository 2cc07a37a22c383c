#pragma once

#include <cmath>

#include "qbat/linalg.hpp"
#include "qbat/state.hpp"

namespace qbat::testing {

inline ComplexVector ket2(Complex a, Complex b) {
    ComplexVector v(2);
    v << a, b;
    return v;
}

inline ComplexMatrix pure(const ComplexVector& psi) {
    return psi * psi.adjoint();
}

/// cos(theta)|HV> + sin(theta)|VH>, theta in degrees, (HH,HV,VH,VV) layout.
inline ComplexVector phi_ket(double theta_deg) {
    double theta = theta_deg * M_PI / 180.0;
    ComplexVector psi = ComplexVector::Zero(4);
    psi(1) = std::cos(theta);
    psi(2) = std::sin(theta);
    return psi;
}

inline DensityMatrix phi_state(double theta_deg) {
    return DensityMatrix::validated(pure(phi_ket(theta_deg)));
}

inline ObservableHamiltonian qubit_h01(double unit_energy = 1.0) {
    return ObservableHamiltonian::diagonal((RealVector(2) << 0, 1).finished(), unit_energy);
}

/// E |H><H|: ground state |V>, excited |H>.
inline ObservableHamiltonian path_h(double unit_energy = 1.0) {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = unit_energy;
    return ObservableHamiltonian::from_matrix(h, unit_energy);
}

inline ComplexMatrix diag2(double a, double b) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

}  // namespace qbat::testing
