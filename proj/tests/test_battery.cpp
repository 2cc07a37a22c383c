#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "qbat/battery.hpp"
#include "qbat/rng.hpp"
#include "test_helpers.hpp"

using namespace qbat;
using namespace qbat::testing;

namespace {

DensityMatrix mixed(int d) {
    return DensityMatrix::validated(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

ObservableHamiltonian random_h(int d, std::uint64_t seed) {
    rng::Stream stream(seed);
    return ObservableHamiltonian::from_matrix(rng::random_hermitian(d, stream), 1.0);
}

}  // namespace

TEST_CASE("passive_state drops a pure excited qubit to the ground level") {
    ObservableHamiltonian h = qubit_h01();
    DensityMatrix excited = validate_density(diag2(0, 1));
    ComplexMatrix passive = passive_state(excited, h).matrix();
    CHECK(passive(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expectation(passive_state(excited, h), h) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("maximally mixed state is already passive and active") {
    ObservableHamiltonian h = qubit_h01();
    DensityMatrix rho = mixed(2);
    CHECK(max_abs(passive_state(rho, h).matrix() - rho.matrix()) <= 1e-12);
    CHECK(max_abs(active_state(rho, h).matrix() - rho.matrix()) <= 1e-12);
}

TEST_CASE("passive/active rearrange populations against the energy order") {
    ObservableHamiltonian h = qubit_h01();
    DensityMatrix rho = validate_density(diag2(0.25, 0.75));
    ComplexMatrix passive = passive_state(rho, h).matrix();
    CHECK(passive(0, 0).real() == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(passive(1, 1).real() == doctest::Approx(0.25).epsilon(1e-12));
    ComplexMatrix active = active_state(validate_density(diag2(0.75, 0.25)), h).matrix();
    CHECK(active(0, 0).real() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(active(1, 1).real() == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("passive and active states keep the input spectrum") {
    rng::Stream stream(31);
    DensityMatrix rho = validate_density(rng::random_density(4, stream));
    ObservableHamiltonian h = random_h(4, 32);
    RealVector original = eigh(rho.matrix()).eigenvalues;
    CHECK((eigh(passive_state(rho, h).matrix()).eigenvalues - original).cwiseAbs().maxCoeff() <=
          1e-10);
    CHECK((eigh(active_state(rho, h).matrix()).eigenvalues - original).cwiseAbs().maxCoeff() <=
          1e-10);
}

TEST_CASE("ergotropy of pure and passive states") {
    ObservableHamiltonian h = qubit_h01();
    CHECK(ergotropy(validate_density(diag2(0, 1)), h) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ergotropy(mixed(2), h) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("ergotropy of the path-I reduced state matches E(p - lambda_minus)") {
    DensityMatrix reduced = partial_trace(phi_state(15.0), Subsystem::A);
    ObservableHamiltonian h = path_h();
    double p = std::pow(std::cos(15.0 * M_PI / 180.0), 2);
    double lambda_minus = 1.0 - p;  // spectrum of the diagonal marginal
    CHECK(ergotropy(reduced, h) == doctest::Approx(p - lambda_minus).epsilon(1e-10));
    CHECK(ergotropy(reduced, h) == doctest::Approx(0.8660).epsilon(1e-4));
    CHECK(antiergotropy(reduced, h) == doctest::Approx(0.0).scale(1).epsilon(1e-4));
}

TEST_CASE("antiergotropy of extreme qubit states") {
    ObservableHamiltonian h = qubit_h01();
    CHECK(antiergotropy(validate_density(diag2(0, 1)), h) == doctest::Approx(0.0).scale(1));
    CHECK(antiergotropy(validate_density(diag2(1, 0)), h) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("capacity bookkeeping is internally consistent") {
    rng::Stream stream(37);
    DensityMatrix rho = validate_density(rng::random_density(3, stream));
    ObservableHamiltonian h = random_h(3, 38);
    BatteryQuantities q = capacity(rho, h);
    CHECK(q.capacity == doctest::Approx(q.ergotropy + q.antiergotropy).epsilon(1e-12));
    CHECK(q.passive_energy <= q.initial_energy + 1e-10);
    CHECK(q.initial_energy <= q.active_energy + 1e-10);
}

TEST_CASE("capacity of pure qubits is the full level spacing") {
    ObservableHamiltonian h = qubit_h01();
    for (double theta : {0.1, 0.7, 1.3}) {
        ComplexVector psi = ket2(std::cos(theta), std::sin(theta));
        BatteryQuantities q = capacity(validate_density(pure(psi)), h);
        CHECK(q.capacity == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(capacity(mixed(2), h).capacity == doctest::Approx(0.0).scale(1));
}

TEST_CASE("capacity of the path-I marginal reproduces |cos 2theta| E") {
    DensityMatrix reduced = partial_trace(phi_state(30.0), Subsystem::A);
    BatteryQuantities q = capacity(reduced, path_h());
    CHECK(q.capacity == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("qubit closed form on the anchor points") {
    CHECK(qubit_capacity_closed_form({1.0, 0.0, 0.0}, 1.0) == doctest::Approx(1.0));
    CHECK(qubit_capacity_closed_form({0.5, 0.0, 0.0}, 1.0) == doctest::Approx(0.0).scale(1));
    CHECK(qubit_capacity_closed_form({0.5, 0.5, 0.0}, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)qubit_capacity_closed_form({0.1, 0.9, 0.0}, 1.0), Error);
}

TEST_CASE("closed form agrees with the general capacity on assembled qubit matrices") {
    for (int i = 0; i < 10000; ++i) {
        QubitBatteryParams params = [&] {
            rng::Stream stream(41, i);
            QubitBatteryParams q;
            q.p = stream.uniform01();
            q.r = stream.uniform01() * std::sqrt(q.p * (1.0 - q.p));
            q.theta_phase = 2.0 * M_PI * stream.uniform01();
            return q;
        }();
        double closed = qubit_capacity_closed_form(params, 1.0);
        DensityMatrix rho = validate_density(qubit_state(params));
        double general = capacity(rho, qubit_h01()).capacity;
        CHECK(std::abs(closed - general) <= 1e-10);
    }
}

TEST_CASE("capacity is unitarily invariant") {
    rng::Stream stream(43);
    DensityMatrix rho = validate_density(rng::random_density(4, stream));
    ObservableHamiltonian h = random_h(4, 44);
    double base = capacity(rho, h).capacity;
    for (int trial = 0; trial < 25; ++trial) {
        rng::Stream ustream(45, trial);
        DensityMatrix rotated = apply_unitary(rho, rng::haar_unitary(4, ustream));
        CHECK(capacity(rotated, h).capacity == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("degenerate level relabeling leaves passive/active energies alone") {
    RealVector levels = (RealVector(4) << 0, 1, 1, 2).finished();
    ObservableHamiltonian plain = ObservableHamiltonian::diagonal(levels, 1.0);

    // Rotate the degenerate middle pair; same operator, different stored basis.
    ComplexMatrix basis = ComplexMatrix::Identity(4, 4);
    double angle = 0.7;
    basis(1, 1) = std::cos(angle);
    basis(1, 2) = -std::sin(angle);
    basis(2, 1) = std::sin(angle);
    basis(2, 2) = std::cos(angle);
    ObservableHamiltonian rotated = ObservableHamiltonian::from_levels(levels, basis, 1.0);

    rng::Stream stream(47);
    DensityMatrix rho = validate_density(rng::random_density(4, stream));
    BatteryQuantities a = capacity(rho, plain);
    BatteryQuantities b = capacity(rho, rotated);
    CHECK(std::abs(a.passive_energy - b.passive_energy) < 1e-10);
    CHECK(std::abs(a.active_energy - b.active_energy) < 1e-10);
}

TEST_CASE("capacity gap of product, Bell and partially entangled states") {
    ObservableHamiltonian h = path_h();
    CHECK(capacity_gap(phi_state(0.0), h, h) == doctest::Approx(0.0).scale(1).epsilon(1e-9));
    CHECK(capacity_gap(phi_state(45.0), h, h) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(capacity_gap(phi_state(30.0), h, h) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("capacity gap stays non-negative on the phi family") {
    ObservableHamiltonian h = path_h();
    for (int i = 0; i <= 18; ++i) {
        double theta = 5.0 * i;
        CHECK(capacity_gap(phi_state(theta), h, h) >= -1e-9);
    }
}

TEST_CASE("brute-force extrema of the maximally mixed state are flat") {
    ObservableHamiltonian h = random_h(3, 51);
    OrbitExtrema extrema = brute_force_work_extrema(mixed(3), h, 100, 7);
    double mean_energy = h.energies().sum() / 3.0;
    CHECK(extrema.min_energy == doctest::Approx(mean_energy).epsilon(1e-9));
    CHECK(extrema.max_energy == doctest::Approx(mean_energy).epsilon(1e-9));
}

TEST_CASE("brute-force extrema include the permutation optima") {
    ObservableHamiltonian h = qubit_h01();
    DensityMatrix rho = validate_density(diag2(0.25, 0.75));
    OrbitExtrema extrema = brute_force_work_extrema(rho, h, 200, 11);
    CHECK(extrema.min_energy == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(extrema.max_energy == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("brute-force extrema of a pure state span the full spectrum") {
    ObservableHamiltonian h =
        ObservableHamiltonian::diagonal((RealVector(4) << 0, 1, 1, 2).finished(), 1.0);
    OrbitExtrema extrema = brute_force_work_extrema(phi_state(45.0), h, 300, 13);
    CHECK(extrema.min_energy == doctest::Approx(0.0).scale(1).epsilon(1e-9));
    CHECK(extrema.max_energy == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("sampled orbit energies stay inside the rearrangement bounds") {
    for (int d : {2, 3, 4}) {
        for (int instance = 0; instance < 40; ++instance) {
            rng::Stream stream(60 + d, instance);
            DensityMatrix rho = validate_density(rng::random_density(d, stream));
            ObservableHamiltonian h =
                ObservableHamiltonian::from_matrix(rng::random_hermitian(d, stream), 1.0);
            BatteryQuantities q = capacity(rho, h);
            OrbitExtrema extrema =
                brute_force_work_extrema(rho, h, 50, 1000 + instance);
            CHECK(extrema.min_energy >= q.passive_energy - 1e-9);
            CHECK(extrema.max_energy <= q.active_energy + 1e-9);
            CHECK(extrema.min_energy == doctest::Approx(q.passive_energy).epsilon(1e-9));
            CHECK(extrema.max_energy == doctest::Approx(q.active_energy).epsilon(1e-9));
        }
    }
}

TEST_CASE("rearrangement bounds hold across ten thousand random pairs") {
    // Breadth over instances; the acceptance suite adds depth in samples.
    for (int d : {2, 3, 4}) {
        for (int instance = 0; instance < 3334; ++instance) {
            rng::Stream stream(80 + d, instance);
            DensityMatrix rho = validate_density(rng::random_density(d, stream));
            ObservableHamiltonian h =
                ObservableHamiltonian::from_matrix(rng::random_hermitian(d, stream), 1.0);
            BatteryQuantities q = capacity(rho, h);
            OrbitExtrema extrema = brute_force_work_extrema(rho, h, 3, 5000 + instance);
            if (!(extrema.min_energy >= q.passive_energy - 1e-9) ||
                !(extrema.max_energy <= q.active_energy + 1e-9) ||
                std::abs(extrema.min_energy - q.passive_energy) > 1e-9 ||
                std::abs(extrema.max_energy - q.active_energy) > 1e-9) {
                CAPTURE(d);
                CAPTURE(instance);
                CHECK(extrema.min_energy >= q.passive_energy - 1e-9);
                CHECK(extrema.max_energy <= q.active_energy + 1e-9);
                CHECK(extrema.min_energy == doctest::Approx(q.passive_energy).epsilon(1e-9));
                CHECK(extrema.max_energy == doctest::Approx(q.active_energy).epsilon(1e-9));
            }
        }
    }
    CHECK(true);
}

TEST_CASE("brute-force oracle is deterministic and policy independent") {
    rng::Stream stream(71);
    DensityMatrix rho = validate_density(rng::random_density(4, stream));
    ObservableHamiltonian h = random_h(4, 72);
    OrbitExtrema parallel = brute_force_work_extrema(rho, h, 256, 99, ExecPolicy::parallel);
    OrbitExtrema serial = brute_force_work_extrema(rho, h, 256, 99, ExecPolicy::serial);
    CHECK(parallel.min_energy == serial.min_energy);
    CHECK(parallel.max_energy == serial.max_energy);
}
