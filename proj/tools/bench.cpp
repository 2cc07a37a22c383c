// Benchmark of the OpenMP batch kernels against their serial reference
// paths. Both paths draw from per-index RNG streams, so results must agree
// bit for bit; the benchmark checks that while timing.

#include <chrono>
#include <cstdio>
#include <functional>

#include "qbat/battery.hpp"
#include "qbat/pipeline.hpp"
#include "qbat/resources.hpp"
#include "qbat/rng.hpp"
#include "qbat/tomography.hpp"

namespace {

using namespace qbat;
using clock_type = std::chrono::steady_clock;

double timed(const std::function<void()>& fn) {
    auto begin = clock_type::now();
    fn();
    return std::chrono::duration<double>(clock_type::now() - begin).count();
}

void report(const char* name, double serial_s, double parallel_s, bool match) {
    std::printf("%-22s serial %8.3f s   openmp %8.3f s   speedup %5.2fx   %s\n", name, serial_s,
                parallel_s, serial_s / parallel_s, match ? "results match" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("threads: %d\n", hardware_threads());

    {
        rng::Stream stream(2025);
        DensityMatrix rho = DensityMatrix::validated(rng::random_density(4, stream));
        ObservableHamiltonian h =
            ObservableHamiltonian::from_matrix(rng::random_hermitian(4, stream), 1.0);
        const int samples = 20000;
        OrbitExtrema serial_result{};
        OrbitExtrema parallel_result{};
        double serial_s = timed([&] {
            serial_result = brute_force_work_extrema(rho, h, samples, 7, ExecPolicy::serial);
        });
        double parallel_s = timed([&] {
            parallel_result = brute_force_work_extrema(rho, h, samples, 7, ExecPolicy::parallel);
        });
        report("orbit extrema", serial_s, parallel_s,
               serial_result.min_energy == parallel_result.min_energy &&
                   serial_result.max_energy == parallel_result.max_energy);
    }

    {
        const std::uint64_t samples = 400000;
        RelationSweepResult serial_result;
        RelationSweepResult parallel_result;
        double serial_s = timed([&] {
            serial_result = verify_relations_sweep(samples, 11, kAnalyticRelationTol,
                                                   {2.0, 2.5, 3.0, 5.0}, ExecPolicy::serial);
        });
        double parallel_s = timed([&] {
            parallel_result = verify_relations_sweep(samples, 11, kAnalyticRelationTol,
                                                     {2.0, 2.5, 3.0, 5.0}, ExecPolicy::parallel);
        });
        report("relation sweep", serial_s, parallel_s,
               serial_result.violations.size() == parallel_result.violations.size());
    }

    {
        DensityMatrix noisy =
            apply_noise(prepare_phi(30.0), NoiseModel::White, 0.02);
        auto records = simulate_counts(noisy, tomography_settings(), 1e4, 3);
        auto statistic = [](const std::vector<CountRecord>& resampled) {
            TomographyResult tomo = mle_reconstruct(resampled);
            return std::vector<double>{von_neumann_entropy(partial_trace(tomo.rho, Subsystem::A))};
        };
        const int resamples = 64;
        std::vector<std::vector<double>> serial_result;
        std::vector<std::vector<double>> parallel_result;
        double serial_s = timed([&] {
            serial_result = bootstrap_samples(records, statistic, resamples, 5, ExecPolicy::serial);
        });
        double parallel_s = timed([&] {
            parallel_result =
                bootstrap_samples(records, statistic, resamples, 5, ExecPolicy::parallel);
        });
        report("tomography bootstrap", serial_s, parallel_s, serial_result == parallel_result);
    }
    return 0;
}
