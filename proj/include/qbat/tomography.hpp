#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qbat/exec.hpp"
#include "qbat/photonics.hpp"
#include "qbat/state.hpp"

namespace qbat {

struct TomographyResult {
    DensityMatrix rho;
    double log_likelihood = 0;
    int iterations = 0;
    bool converged = false;
    std::optional<double> fidelity_to_target;
};

struct MleOptions {
    int max_iter = 2000;
    // Max-norm threshold on the gradient of the per-count normalized
    // log-likelihood, so the criterion is independent of the count scale.
    double grad_tol = 1e-8;
};

/// Least-squares fit of a Hermitian matrix to the per-setting outcome
/// probabilities, trace-normalized. The result may have small negative
/// eigenvalues; it is the standard linear-inversion starting point.
/// Throws UnderdeterminedSet when the projectors do not span.
ComplexMatrix linear_reconstruct(const std::vector<CountRecord>& records);

/// Frobenius-nearest PSD unit-trace matrix: eigenvalue projection onto the
/// probability simplex, eigenvectors kept.
DensityMatrix project_to_physical(const ComplexMatrix& m);

/// Maximum-likelihood reconstruction with the Cholesky-style
/// parameterization rho = T^dagger T / Tr(T^dagger T), T lower-triangular
/// complex with real diagonal (d^2 real parameters), so every iterate is
/// physical by construction. L-BFGS ascent with a backtracking line
/// search; the likelihood never decreases across accepted iterations.
/// A result is returned even when not converged (converged=false).
TomographyResult mle_reconstruct(const std::vector<CountRecord>& records,
                                 std::optional<ComplexMatrix> init = std::nullopt,
                                 const MleOptions& options = {});

/// Log-likelihood sum_k n_k ln Tr(rho Pi_k) of a physical state given the
/// records. Exposed for diagnostics and tests.
double log_likelihood(const DensityMatrix& rho, const std::vector<CountRecord>& records);

struct BootstrapEstimate {
    double mean = 0;
    double std = 0;
    int resamples = 0;
};

/// Poissonian parametric bootstrap: every count is redrawn Poisson with
/// mean equal to the observed count and the statistic re-run (including
/// any reconstruction inside it). Resamples are independent, merged by
/// index, so the result is seed-stable under either exec policy.
/// Statistic exceptions propagate as StatisticFailure with the resample
/// index.
BootstrapEstimate bootstrap_error_bars(
    const std::vector<CountRecord>& records,
    const std::function<double(const std::vector<CountRecord>&)>& statistic,
    int resamples,
    std::uint64_t seed,
    ExecPolicy policy = ExecPolicy::parallel);

/// Vector-statistic core: one pass of resampling shared by several
/// statistics. Row r holds the statistic vector of resample r.
std::vector<std::vector<double>> bootstrap_samples(
    const std::vector<CountRecord>& records,
    const std::function<std::vector<double>(const std::vector<CountRecord>&)>& statistic,
    int resamples,
    std::uint64_t seed,
    ExecPolicy policy = ExecPolicy::parallel);

/// Redraw every count Poisson(observed); one bootstrap draw.
std::vector<CountRecord> resample_counts(const std::vector<CountRecord>& records,
                                         std::uint64_t seed,
                                         std::uint64_t resample_index);

/// TomographyResult as JSON with the density matrix as a d x d array of
/// [re, im] pairs, row-major.
std::string tomography_result_to_json(const TomographyResult& result);

/// Worst relative deviation between the analytic likelihood gradient and a
/// central finite difference, over `points` random parameter vectors.
/// Diagnostic hook for the gradient-consistency checks.
double mle_gradient_fd_error(const std::vector<CountRecord>& records,
                             std::uint64_t seed,
                             int points);

}  // namespace qbat
