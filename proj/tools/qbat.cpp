#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbat/battery.hpp"
#include "qbat/jsonio.hpp"
#include "qbat/pipeline.hpp"
#include "qbat/resources.hpp"
#include "qbat/tomography.hpp"

namespace {

using namespace qbat;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitUsage = 64;

void write_output(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(output_path, text);
    }
}

nlohmann::json battery_to_json(const BatteryQuantities& q) {
    nlohmann::json j;
    j["ergotropy"] = q.ergotropy;
    j["antiergotropy"] = q.antiergotropy;
    j["capacity"] = q.capacity;
    j["passive_energy"] = q.passive_energy;
    j["active_energy"] = q.active_energy;
    j["initial_energy"] = q.initial_energy;
    return j;
}

nlohmann::json relations_to_json(const RelationReport& r) {
    nlohmann::json j;
    j["csu"] = r.csu;
    j["ctu"] = r.ctu;
    j["clu"] = r.clu;
    j["ccu"] = r.ccu;
    j["csu_holds"] = r.csu_holds;
    j["ctu_holds"] = r.ctu_holds;
    j["clu_holds"] = r.clu_holds;
    j["ccu_holds"] = r.ccu_holds;
    j["tolerance"] = r.tolerance;
    return j;
}

ComplexMatrix load_rho(const std::string& path) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("state JSON parse failure: ") + e.what());
    }
    if (parsed.is_object() && parsed.contains("rho")) {
        return rho_from_json(parsed["rho"]);
    }
    return rho_from_json(parsed);
}

ObservableHamiltonian path_hamiltonian(double unit_energy) {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = unit_energy;
    return ObservableHamiltonian::from_matrix(h, unit_energy);
}

struct SimulateArgs {
    SourceConfig source;
    std::string noise = "white";
    std::string output;
};

int run_simulate(const SimulateArgs& args) {
    SourceConfig config = args.source;
    config.noise_model = noise_model_from_name(args.noise);
    auto records = simulate_counts(config);
    write_output(counts_to_json(records), args.output);
    return kExitOk;
}

struct ReconstructArgs {
    std::string counts_path;
    std::string output;
    MleOptions options;
    double target_theta = -1;
    std::string target_path;
};

int run_reconstruct(const ReconstructArgs& args) {
    auto records = counts_from_json(read_text_file(args.counts_path));
    TomographyResult result = mle_reconstruct(records, std::nullopt, args.options);
    if (args.target_theta >= 0) {
        result.fidelity_to_target = fidelity(result.rho, prepare_phi(args.target_theta));
    } else if (!args.target_path.empty()) {
        DensityMatrix target = DensityMatrix::validated(load_rho(args.target_path));
        result.fidelity_to_target = fidelity(result.rho, target);
    }
    write_output(tomography_result_to_json(result), args.output);
    return kExitOk;
}

struct AnalyzeArgs {
    std::string state_path;
    double unit_energy = 1.0;
    double tsallis_q = 2.0;
    std::string output;
};

int run_analyze(const AnalyzeArgs& args) {
    DensityMatrix rho = DensityMatrix::validated(load_rho(args.state_path));
    ObservableHamiltonian h = path_hamiltonian(args.unit_energy);

    nlohmann::json out;
    out["dim"] = rho.dim();
    out["unit_energy"] = args.unit_energy;
    out["tsallis_q"] = args.tsallis_q;

    auto qubit_block = [&](const DensityMatrix& q) {
        nlohmann::json j;
        j["battery"] = battery_to_json(capacity(q, h));
        j["von_neumann"] = von_neumann_entropy(q);
        j["tsallis"] = tsallis_entropy(q, args.tsallis_q);
        j["linear_entropy"] = linear_entropy(q);
        j["l1_coherence"] = l1_coherence(q, h);
        j["relative_entropy_coherence"] = relative_entropy_coherence(q, h);
        j["relations"] = relations_to_json(
            check_relations(q, h, args.tsallis_q, kExperimentalRelationTol));
        return j;
    };

    if (rho.dim() == 4) {
        ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
        ComplexMatrix h_ab = kron(h.matrix(), id2) + kron(id2, h.matrix());
        ObservableHamiltonian global =
            ObservableHamiltonian::from_matrix(h_ab, args.unit_energy);
        out["battery_AB"] = battery_to_json(capacity(rho, global));
        out["path_I"] = qubit_block(partial_trace(rho, Subsystem::A));
        out["path_II"] = qubit_block(partial_trace(rho, Subsystem::B));
        EntanglementReport ent = entanglement_report(rho, h, h);
        out["entanglement"] = {{"capacity_gap", ent.capacity_gap},
                               {"concurrence", ent.concurrence},
                               {"eof", ent.eof},
                               {"geometric", ent.geometric}};
    } else if (rho.dim() == 2) {
        out["path_I"] = qubit_block(rho);
    } else {
        throw Error(ErrorCode::UnsupportedDimension, "analyze expects a 2x2 or 4x4 state");
    }
    write_output(dump_canonical(out) + "\n", args.output);
    return kExitOk;
}

struct PipelineArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    std::string format;
    bool serial = false;
};

int run_pipeline_cmd(const PipelineArgs& args) {
    PipelineConfig config;
    if (!args.config_path.empty()) {
        config = pipeline_config_from_json(read_text_file(args.config_path));
    }
    if (args.seed) config.seed = *args.seed;
    if (!args.output_dir.empty()) config.output_dir = args.output_dir;
    if (!args.format.empty()) config.format = report_format_from_name(args.format);

    ReportBundle bundle =
        run_pipeline(config, args.serial ? ExecPolicy::serial : ExecPolicy::parallel);
    bool has_rows = emit_report(bundle, config.format, config.output_dir);
    for (const auto& row : bundle.rows) {
        std::cout << "theta=" << row.theta_deg << " capacity/E=" << format_sig12(row.capacity)
                  << " S=" << format_sig12(row.von_neumann)
                  << " fidelity=" << format_sig12(row.fidelity_to_ideal)
                  << (row.mle_converged ? "" : " [mle not converged]") << "\n";
    }
    std::cout << "report written to " << config.output_dir << "\n";
    if (!has_rows) {
        std::cerr << "empty theta list: manifest only\n";
        return kExitDegenerate;
    }
    return kExitOk;
}

struct VerifyArgs {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    double tolerance = kAnalyticRelationTol;
    std::vector<double> qs = {2.0, 2.5, 3.0, 5.0};
    bool serial = false;
};

int run_verify(const VerifyArgs& args) {
    if (args.samples == 0) {
        std::cerr << "verify-relations: --samples must be positive\n";
        return kExitUsage;
    }
    RelationSweepResult result =
        verify_relations_sweep(args.samples, args.seed, args.tolerance, args.qs,
                               args.serial ? ExecPolicy::serial : ExecPolicy::parallel);
    if (result.ok()) {
        std::cout << "all " << result.samples << " sampled qubit states satisfy the four "
                  << "capacity relations (tolerance " << format_sig12(args.tolerance) << ")\n";
        return kExitOk;
    }
    std::cout << result.violations.size() << " violation(s) over " << result.samples
              << " samples\n";
    std::size_t shown = 0;
    for (const auto& v : result.violations) {
        std::cout << "  sample " << v.sample_index << " " << v.relation << "="
                  << format_sig12(v.value) << " q=" << format_sig12(v.q)
                  << " p=" << format_sig12(v.params.p) << " r=" << format_sig12(v.params.r)
                  << " theta=" << format_sig12(v.params.theta_phase) << "\n";
        if (++shown >= 20) {
            std::cout << "  ... " << (result.violations.size() - shown) << " more\n";
            break;
        }
    }
    return kExitViolation;
}

struct CapacityArgs {
    std::string state_path;
    std::vector<double> levels;
    double unit_energy = 1.0;
    std::string output;
};

int run_capacity(const CapacityArgs& args) {
    DensityMatrix rho = DensityMatrix::validated(load_rho(args.state_path));
    if (static_cast<Eigen::Index>(args.levels.size()) != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "capacity: level count must match the state dimension");
    }
    RealVector levels(rho.dim());
    for (Eigen::Index i = 0; i < rho.dim(); ++i) levels(i) = args.levels[i];
    ObservableHamiltonian h = ObservableHamiltonian::diagonal(levels, args.unit_energy);
    nlohmann::json out = battery_to_json(capacity(rho, h));
    write_output(dump_canonical(out) + "\n", args.output);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum battery capacity toolkit"};
    app.require_subcommand(1);

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "simulate two-photon coincidence counts");
    simulate->add_option("--theta", simulate_args.source.theta_deg, "state angle in degrees")
        ->check(CLI::Range(0.0, 90.0));
    simulate->add_option("--noise", simulate_args.noise, "noise model: none|white|dephasing");
    simulate->add_option("--strength", simulate_args.source.noise_strength, "noise strength")
        ->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--mean-counts", simulate_args.source.mean_counts_per_setting,
                         "mean counts per setting");
    simulate->add_option("--seed", simulate_args.source.seed, "random seed");
    simulate->add_option("-o,--output", simulate_args.output, "output file (default stdout)");

    ReconstructArgs reconstruct_args;
    auto* reconstruct =
        app.add_subcommand("reconstruct", "maximum-likelihood state reconstruction");
    reconstruct->add_option("--counts", reconstruct_args.counts_path, "counts JSON file")
        ->required();
    reconstruct->add_option("--max-iter", reconstruct_args.options.max_iter, "iteration cap");
    reconstruct->add_option("--grad-tol", reconstruct_args.options.grad_tol,
                            "gradient max-norm tolerance");
    reconstruct->add_option("--target-theta", reconstruct_args.target_theta,
                            "report fidelity to the ideal state at this angle");
    reconstruct->add_option("--target", reconstruct_args.target_path,
                            "report fidelity to the state in this JSON file");
    reconstruct->add_option("-o,--output", reconstruct_args.output, "output file");

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "battery and resource quantities of a state");
    analyze->add_option("--state", analyze_args.state_path, "state JSON file")->required();
    analyze->add_option("--unit-energy", analyze_args.unit_energy, "unit energy E")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--q", analyze_args.tsallis_q, "Tsallis order for the relation report");
    analyze->add_option("-o,--output", analyze_args.output, "output file");

    PipelineArgs pipeline_args;
    auto* pipeline = app.add_subcommand("pipeline", "full prepare/simulate/reconstruct/report run");
    pipeline->add_option("--config", pipeline_args.config_path, "pipeline config JSON");
    std::uint64_t seed_override = 0;
    auto* seed_opt = pipeline->add_option("--seed", seed_override, "seed override");
    pipeline->add_option("--output-dir", pipeline_args.output_dir, "output directory override");
    pipeline->add_option("--format", pipeline_args.format, "report format: json|csv");
    pipeline->add_flag("--serial", pipeline_args.serial, "run batch kernels serially");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify-relations",
                                      "property sweep of the capacity trade-off relations");
    verify->add_option("--samples", verify_args.samples, "number of random qubit states");
    verify->add_option("--seed", verify_args.seed, "random seed");
    verify->add_option("--tolerance", verify_args.tolerance, "violation tolerance");
    verify->add_option("--q", verify_args.qs, "Tsallis orders to sweep");
    verify->add_flag("--serial", verify_args.serial, "run the sweep serially");

    CapacityArgs capacity_args;
    auto* capacity_cmd =
        app.add_subcommand("capacity", "battery quantities of a state under a diagonal H");
    capacity_cmd->add_option("--state", capacity_args.state_path, "state JSON file")->required();
    capacity_cmd
        ->add_option("--levels", capacity_args.levels,
                     "ascending dimensionless eigenenergies, one per state dimension")
        ->required();
    capacity_cmd->add_option("--unit-energy", capacity_args.unit_energy, "unit energy E")
        ->check(CLI::PositiveNumber);
    capacity_cmd->add_option("-o,--output", capacity_args.output, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    if (seed_opt->count() > 0) pipeline_args.seed = seed_override;

    try {
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (reconstruct->parsed()) return run_reconstruct(reconstruct_args);
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (pipeline->parsed()) return run_pipeline_cmd(pipeline_args);
        if (verify->parsed()) return run_verify(verify_args);
        if (capacity_cmd->parsed()) return run_capacity(capacity_args);
    } catch (const Error& e) {
        std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
        return e.code() == ErrorCode::EmptyRecord ? kExitDegenerate : kExitViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitViolation;
    }
    return kExitUsage;
}
