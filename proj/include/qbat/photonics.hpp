#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qbat/state.hpp"

namespace qbat {

enum class Basis { HV, DA, LR };

const char* basis_name(Basis b);
Basis basis_from_name(const std::string& name);

struct MeasurementSetting {
    Basis basis_A = Basis::HV;
    Basis basis_B = Basis::HV;

    bool operator==(const MeasurementSetting&) const = default;
};

/// The 9-setting overcomplete tomography set {HV,DA,LR}^2 (36 projector
/// pairs), informationally complete for two qubits.
std::vector<MeasurementSetting> tomography_settings();

/// Coincidence counts N^{a,b} for one setting, outcome order
/// (0,0),(0,1),(1,0),(1,1).
struct CountRecord {
    MeasurementSetting setting;
    std::array<std::uint64_t, 4> counts{};

    std::uint64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

enum class NoiseModel { None, White, Dephasing };

const char* noise_model_name(NoiseModel m);
NoiseModel noise_model_from_name(const std::string& name);

struct SourceConfig {
    double theta_deg = 45.0;
    NoiseModel noise_model = NoiseModel::White;
    // Default tuned so the simulated Bell state sits at fidelity ~0.985.
    double noise_strength = 0.02;
    double mean_counts_per_setting = 1e4;
    std::uint64_t seed = 1;
};

/// Rank-1 projector onto cos(theta)|HV> + sin(theta)|VH>, theta in degrees.
DensityMatrix prepare_phi(double theta_deg);

/// white: (1-s) rho + s I/d; dephasing: computational off-diagonals scaled
/// by (1-s). Throws InvalidStrength outside [0,1].
DensityMatrix apply_noise(const DensityMatrix& rho, NoiseModel model, double strength);

/// Two rank-1 single-qubit projectors summing to the identity. Outcome 0
/// is H, D, or L; outcome 1 is V, A, or R.
std::array<ComplexMatrix, 2> basis_projectors(Basis b);

/// The four two-photon projectors Pi_a (x) Pi_b of one setting.
std::array<ComplexMatrix, 4> setting_projectors(const MeasurementSetting& s);

/// Poisson counts with mean N * Tr(rho Pi_a (x) Pi_b) per outcome. Each
/// setting draws from its own (seed, setting-index) stream, so settings
/// can be simulated concurrently with reproducible output.
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                         const std::vector<MeasurementSetting>& settings,
                                         double mean_counts,
                                         std::uint64_t seed);

std::vector<CountRecord> simulate_counts(const SourceConfig& config);

/// P(a,b|x,y) = N^{a,b} / sum N. The four entries sum to exactly 1.0;
/// throws EmptyRecord on zero total.
std::array<double, 4> joint_probability(const CountRecord& record);

/// p(a|x) = sum_b P(a,b|x,y) for party A (or summed over a for party B).
std::array<double, 2> marginal_probability(const CountRecord& record, Subsystem party);

/// Per-setting marginals of a record list.
std::vector<std::array<double, 2>> marginal_probability(const std::vector<CountRecord>& records,
                                                        Subsystem party);

/// Interchange format: [{"basis_A":"HV","basis_B":"DA","counts":[n00,n01,n10,n11]}, ...]
std::string counts_to_json(const std::vector<CountRecord>& records);
std::vector<CountRecord> counts_from_json(const std::string& text);

}  // namespace qbat
