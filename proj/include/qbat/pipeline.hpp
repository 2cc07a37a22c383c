#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbat/battery.hpp"
#include "qbat/exec.hpp"
#include "qbat/photonics.hpp"
#include "qbat/resources.hpp"
#include "qbat/tomography.hpp"

namespace qbat {

inline constexpr const char* kVersion = "0.1.0";

enum class ReportFormat { Json, Csv };

const char* report_format_name(ReportFormat f);
ReportFormat report_format_from_name(const std::string& name);

struct PipelineConfig {
    std::vector<double> thetas_deg = {15.0, 30.0, 45.0, 60.0};
    double unit_energy = 1.0;
    NoiseModel noise_model = NoiseModel::White;
    double noise_strength = 0.02;
    double mean_counts_per_setting = 1e4;
    std::uint64_t seed = 1;
    double tsallis_q = 2.0;
    int bootstrap_resamples = 200;
    std::string output_dir = "report";
    ReportFormat format = ReportFormat::Json;
};

PipelineConfig pipeline_config_from_json(const std::string& text);
std::string pipeline_config_to_json(const PipelineConfig& config);

/// One theta of the report: the path-I battery quantities (capacity in
/// units of E), entropies, coherence, relation sums, the two-photon
/// entanglement panel, and the reconstructed state they derive from.
struct ReportRow {
    double theta_deg = 0;
    double capacity = 0;
    double capacity_err = 0;
    double von_neumann = 0;
    double von_neumann_err = 0;
    double l1_coherence = 0;
    double l1_coherence_err = 0;
    double csu = 0;
    double ctu = 0;
    double clu = 0;
    double ccu = 0;
    double capacity_gap = 0;
    double capacity_gap_err = 0;
    double concurrence = 0;
    double eof = 0;
    double geometric = 0;
    double fidelity_to_ideal = 1;
    ComplexMatrix rho;
    double log_likelihood = 0;
    int mle_iterations = 0;
    bool mle_converged = false;
};

struct ReportBundle {
    std::vector<ReportRow> rows;
    PipelineConfig config;
    std::string config_hash;
    std::string version = kVersion;
};

/// prepare -> noise -> counts -> MLE -> quantities, with bootstrap error
/// bars on capacity, entropy, coherence and gap. Per-theta runs are
/// independent; output is ordered by theta index and deterministic for a
/// fixed (config, seed).
ReportBundle run_pipeline(const PipelineConfig& config,
                          ExecPolicy policy = ExecPolicy::parallel);

/// The same quantities evaluated analytically from the exact state, no
/// sampling, no noise. Error fields are zero.
ReportRow analytic_row(double theta_deg, double unit_energy, double tsallis_q);

/// Writes fig3, fig4, fig5 (chosen format) plus states.json and
/// manifest.json. Re-running with the same bundle reproduces the files
/// byte for byte. An empty bundle writes the manifest only and returns
/// false (degenerate input).
bool emit_report(const ReportBundle& bundle,
                 ReportFormat format,
                 const std::string& output_dir);

struct RelationViolation {
    std::uint64_t sample_index = 0;
    QubitBatteryParams params;
    double q = 0;
    std::string relation;
    double value = 0;
};

struct RelationSweepResult {
    std::uint64_t samples = 0;
    std::vector<double> qs;
    std::vector<RelationViolation> violations;

    bool ok() const { return violations.empty(); }
};

/// Property sweep behind `verify-relations`: random qubit states, all four
/// relations at every q in qs. Violations carry the full state parameters.
RelationSweepResult verify_relations_sweep(std::uint64_t samples,
                                           std::uint64_t seed,
                                           double tolerance = kAnalyticRelationTol,
                                           std::vector<double> qs = {2.0, 2.5, 3.0, 5.0},
                                           ExecPolicy policy = ExecPolicy::parallel);

/// Uniform draw over the valid qubit parameter region.
QubitBatteryParams random_qubit_params(std::uint64_t seed, std::uint64_t index);

}  // namespace qbat
