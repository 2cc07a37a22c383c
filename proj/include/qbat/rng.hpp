#pragma once

#include <cstdint>

#include "qbat/linalg.hpp"

namespace qbat::rng {

/// SplitMix64 step. Also the mixing primitive for substream derivation.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derive an independent stream seed from (seed, stream). Chaining
/// substream calls gives nested deterministic streams, so batch entries
/// can be sampled concurrently with scheduling-independent output.
std::uint64_t substream(std::uint64_t seed, std::uint64_t stream);

/// Counter-addressable xoshiro256++ stream.
class Stream {
public:
    explicit Stream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next();

    /// Uniform on the open interval (0,1).
    double uniform01();

    /// Standard normal via Box-Muller; two uniforms per draw, no cache,
    /// so the stream position is call-count deterministic.
    double normal();

    /// Poisson sample. Sequential CDF inversion below the cutoff mean,
    /// normal-approximation rejection above it. The contract is
    /// distributional and seed-stable within a version, not bit-compatible
    /// across versions.
    std::uint64_t poisson(double mean);

    static constexpr double kPoissonInversionCutoff = 30.0;

private:
    std::uint64_t s_[4];
};

/// Complex Ginibre matrix: independent standard complex normal entries.
ComplexMatrix ginibre(int dim, Stream& rng);

/// Haar-distributed unitary from the QR of a Ginibre matrix with the
/// R-diagonal phase fix.
ComplexMatrix haar_unitary(int dim, Stream& rng);

/// Hilbert-Schmidt random density matrix G G^dagger / Tr.
ComplexMatrix random_density(int dim, Stream& rng);

/// Random Hermitian (G + G^dagger)/2.
ComplexMatrix random_hermitian(int dim, Stream& rng);

}  // namespace qbat::rng
