#include "qbat/rng.hpp"

#include <cmath>

namespace qbat::rng {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed;
    std::uint64_t mixed = splitmix64(state);
    state = mixed ^ (stream * 0xD6E8FEB86659FD93ULL + 0xA5A5A5A5A5A5A5A5ULL);
    return splitmix64(state);
}

Stream::Stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = substream(seed, stream);
    for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t Stream::next() {
    // xoshiro256++
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Stream::uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t Stream::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean <= kPoissonInversionCutoff) {
        double u = uniform01();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        // Mean <= 30 keeps this walk short; the cap is unreachable in practice.
        while (u > cdf && k < 2000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    // Normal-approximation rejection: draw N(mean, mean), round, reject
    // draws outside the support.
    double sigma = std::sqrt(mean);
    for (;;) {
        double g = mean + sigma * normal();
        if (g >= -0.5) {
            return static_cast<std::uint64_t>(std::llround(std::max(0.0, g)));
        }
    }
}

ComplexMatrix ginibre(int dim, Stream& rng) {
    ComplexMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            g(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
        }
    }
    return g;
}

ComplexMatrix haar_unitary(int dim, Stream& rng) {
    ComplexMatrix g = ginibre(dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the R-diagonal phases so Q follows the Haar measure.
    ComplexVector phases(dim);
    for (int i = 0; i < dim; ++i) {
        Complex rd = r(i, i);
        double mag = std::abs(rd);
        phases(i) = mag > 0 ? rd / mag : Complex(1.0, 0.0);
    }
    return q * phases.asDiagonal();
}

ComplexMatrix random_density(int dim, Stream& rng) {
    ComplexMatrix g = ginibre(dim, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

ComplexMatrix random_hermitian(int dim, Stream& rng) {
    ComplexMatrix g = ginibre(dim, rng);
    return 0.5 * (g + g.adjoint());
}

}  // namespace qbat::rng
