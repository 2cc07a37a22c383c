#include "qbat/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "qbat/jsonio.hpp"
#include "qbat/rng.hpp"

namespace qbat {

namespace {

ObservableHamiltonian path_hamiltonian(double unit_energy) {
    // E |H><H| in the computational (H,V) basis.
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = unit_energy;
    return ObservableHamiltonian::from_matrix(h, unit_energy);
}

struct PathQuantities {
    double capacity = 0;
    double von_neumann = 0;
    double l1 = 0;
    double gap = 0;
    RelationReport relations;
    EntanglementReport entanglement;
};

PathQuantities evaluate_state(const DensityMatrix& rho_ab, double unit_energy,
                              double tsallis_q, double relation_tol) {
    ObservableHamiltonian h = path_hamiltonian(unit_energy);
    DensityMatrix rho_a = partial_trace(rho_ab, Subsystem::A);
    PathQuantities out;
    out.capacity = capacity(rho_a, h).capacity / unit_energy;
    out.von_neumann = von_neumann_entropy(rho_a);
    out.l1 = l1_coherence(rho_a, h);
    out.relations = check_relations(rho_a, h, tsallis_q, relation_tol);
    out.entanglement = entanglement_report(rho_ab, h, h);
    out.gap = out.entanglement.capacity_gap / unit_energy;
    return out;
}

nlohmann::json config_to_json_value(const PipelineConfig& config) {
    nlohmann::json j;
    j["thetas"] = config.thetas_deg;
    j["unit_energy"] = config.unit_energy;
    j["noise_model"] = noise_model_name(config.noise_model);
    j["noise_strength"] = config.noise_strength;
    j["mean_counts_per_setting"] = config.mean_counts_per_setting;
    j["seed"] = config.seed;
    j["tsallis_q"] = config.tsallis_q;
    j["bootstrap_resamples"] = config.bootstrap_resamples;
    j["output_dir"] = config.output_dir;
    j["format"] = report_format_name(config.format);
    return j;
}

/// The experiment identity: every field that influences the computed
/// numbers. Output location and table format deliberately excluded, so
/// re-running into another directory reproduces the same manifest.
nlohmann::json experiment_config_json(const PipelineConfig& config) {
    nlohmann::json j = config_to_json_value(config);
    j.erase("output_dir");
    j.erase("format");
    return j;
}

std::string csv_number(double v) { return format_sig12(v); }

}  // namespace

const char* report_format_name(ReportFormat f) {
    return f == ReportFormat::Json ? "json" : "csv";
}

ReportFormat report_format_from_name(const std::string& name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    throw Error(ErrorCode::InvalidParams, "unknown report format: " + name);
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("config parse failure: ") + e.what());
    }
    PipelineConfig config;
    if (parsed.contains("thetas")) {
        config.thetas_deg = parsed["thetas"].get<std::vector<double>>();
    }
    if (parsed.contains("unit_energy")) config.unit_energy = parsed["unit_energy"].get<double>();
    if (parsed.contains("noise_model")) {
        config.noise_model = noise_model_from_name(parsed["noise_model"].get<std::string>());
    }
    if (parsed.contains("noise_strength")) {
        config.noise_strength = parsed["noise_strength"].get<double>();
    }
    if (parsed.contains("mean_counts_per_setting")) {
        config.mean_counts_per_setting = parsed["mean_counts_per_setting"].get<double>();
    }
    if (parsed.contains("seed")) config.seed = parsed["seed"].get<std::uint64_t>();
    if (parsed.contains("tsallis_q")) config.tsallis_q = parsed["tsallis_q"].get<double>();
    if (parsed.contains("bootstrap_resamples")) {
        config.bootstrap_resamples = parsed["bootstrap_resamples"].get<int>();
    }
    if (parsed.contains("output_dir")) config.output_dir = parsed["output_dir"].get<std::string>();
    if (parsed.contains("format")) {
        config.format = report_format_from_name(parsed["format"].get<std::string>());
    }
    if (config.unit_energy <= 0) {
        throw Error(ErrorCode::InvalidParams, "config: unit_energy must be positive");
    }
    return config;
}

std::string pipeline_config_to_json(const PipelineConfig& config) {
    return dump_canonical(config_to_json_value(config)) + "\n";
}

ReportRow analytic_row(double theta_deg, double unit_energy, double tsallis_q) {
    DensityMatrix ideal = prepare_phi(theta_deg);
    PathQuantities q = evaluate_state(ideal, unit_energy, tsallis_q, kAnalyticRelationTol);
    ReportRow row;
    row.theta_deg = theta_deg;
    row.capacity = q.capacity;
    row.von_neumann = q.von_neumann;
    row.l1_coherence = q.l1;
    row.csu = q.relations.csu;
    row.ctu = q.relations.ctu;
    row.clu = q.relations.clu;
    row.ccu = q.relations.ccu;
    row.capacity_gap = q.gap;
    row.concurrence = q.entanglement.concurrence;
    row.eof = q.entanglement.eof;
    row.geometric = q.entanglement.geometric;
    row.fidelity_to_ideal = 1.0;
    row.rho = ideal.matrix();
    row.mle_converged = true;
    return row;
}

ReportBundle run_pipeline(const PipelineConfig& config, ExecPolicy policy) {
    ReportBundle bundle;
    bundle.config = config;
    bundle.config_hash = fnv1a_hex(dump_canonical(experiment_config_json(config)));
    bundle.rows.reserve(config.thetas_deg.size());

    for (std::size_t t = 0; t < config.thetas_deg.size(); ++t) {
        const double theta = config.thetas_deg[t];
        std::uint64_t theta_seed = rng::substream(config.seed, t);
        std::uint64_t sim_seed = rng::substream(theta_seed, 1);
        std::uint64_t boot_seed = rng::substream(theta_seed, 2);

        DensityMatrix ideal = prepare_phi(theta);
        DensityMatrix noisy = apply_noise(ideal, config.noise_model, config.noise_strength);
        std::vector<CountRecord> records;
        TomographyResult tomo = [&] {
            try {
                records = simulate_counts(noisy, tomography_settings(),
                                          config.mean_counts_per_setting, sim_seed);
                return mle_reconstruct(records);
            } catch (const Error& e) {
                std::ostringstream os;
                os << "pipeline theta=" << theta << " stage=simulate/reconstruct: " << e.what();
                throw Error(e.code(), os.str());
            }
        }();

        PathQuantities q = [&] {
            try {
                return evaluate_state(tomo.rho, config.unit_energy, config.tsallis_q,
                                      kExperimentalRelationTol);
            } catch (const Error& e) {
                std::ostringstream os;
                os << "pipeline theta=" << theta << " stage=analyze: " << e.what();
                throw Error(e.code(), os.str());
            }
        }();

        ReportRow row;
        row.theta_deg = theta;
        row.capacity = q.capacity;
        row.von_neumann = q.von_neumann;
        row.l1_coherence = q.l1;
        row.csu = q.relations.csu;
        row.ctu = q.relations.ctu;
        row.clu = q.relations.clu;
        row.ccu = q.relations.ccu;
        row.capacity_gap = q.gap;
        row.concurrence = q.entanglement.concurrence;
        row.eof = q.entanglement.eof;
        row.geometric = q.entanglement.geometric;
        row.fidelity_to_ideal = fidelity(tomo.rho, ideal);
        row.rho = tomo.rho.matrix();
        row.log_likelihood = tomo.log_likelihood;
        row.mle_iterations = tomo.iterations;
        row.mle_converged = tomo.converged;

        if (config.bootstrap_resamples >= 2) {
            ComplexMatrix warm_start = tomo.rho.matrix();
            auto statistic = [&](const std::vector<CountRecord>& resampled) {
                TomographyResult re = mle_reconstruct(resampled, warm_start);
                PathQuantities rq = evaluate_state(re.rho, config.unit_energy,
                                                   config.tsallis_q, kExperimentalRelationTol);
                return std::vector<double>{rq.capacity, rq.von_neumann, rq.l1, rq.gap};
            };
            auto samples = [&] {
                try {
                    return bootstrap_samples(records, statistic, config.bootstrap_resamples,
                                             boot_seed, policy);
                } catch (const Error& e) {
                    std::ostringstream os;
                    os << "pipeline theta=" << theta << " stage=bootstrap: " << e.what();
                    throw Error(e.code(), os.str());
                }
            }();
            const int n = static_cast<int>(samples.size());
            std::array<double, 4> mean{};
            std::array<double, 4> var{};
            for (const auto& s : samples) {
                for (int c = 0; c < 4; ++c) mean[c] += s[c];
            }
            for (int c = 0; c < 4; ++c) mean[c] /= n;
            for (const auto& s : samples) {
                for (int c = 0; c < 4; ++c) var[c] += (s[c] - mean[c]) * (s[c] - mean[c]);
            }
            row.capacity_err = std::sqrt(var[0] / (n - 1));
            row.von_neumann_err = std::sqrt(var[1] / (n - 1));
            row.l1_coherence_err = std::sqrt(var[2] / (n - 1));
            row.capacity_gap_err = std::sqrt(var[3] / (n - 1));
        }
        bundle.rows.push_back(std::move(row));
    }
    return bundle;
}

bool emit_report(const ReportBundle& bundle, ReportFormat format,
                 const std::string& output_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create output dir " + output_dir);
    }
    auto path = [&](const std::string& name) { return output_dir + "/" + name; };

    nlohmann::json manifest;
    manifest["config"] = experiment_config_json(bundle.config);
    manifest["config_hash"] = bundle.config_hash;
    manifest["version"] = bundle.version;
    manifest["seed"] = bundle.config.seed;
    write_text_file(path("manifest.json"), dump_canonical(manifest) + "\n");

    if (bundle.rows.empty()) {
        return false;
    }

    struct Column {
        const char* name;
        double ReportRow::* value;
    };
    const std::vector<Column> fig3 = {
        {"capacity", &ReportRow::capacity},
        {"capacity_err", &ReportRow::capacity_err},
        {"von_neumann", &ReportRow::von_neumann},
        {"von_neumann_err", &ReportRow::von_neumann_err},
        {"l1_coherence", &ReportRow::l1_coherence},
        {"l1_coherence_err", &ReportRow::l1_coherence_err},
    };
    const std::vector<Column> fig4 = {
        {"csu", &ReportRow::csu},
        {"ctu", &ReportRow::ctu},
        {"clu", &ReportRow::clu},
        {"ccu", &ReportRow::ccu},
    };
    const std::vector<Column> fig5 = {
        {"capacity_gap", &ReportRow::capacity_gap},
        {"capacity_gap_err", &ReportRow::capacity_gap_err},
        {"concurrence", &ReportRow::concurrence},
        {"eof", &ReportRow::eof},
        {"geometric", &ReportRow::geometric},
    };

    auto emit_table = [&](const std::string& stem, const std::vector<Column>& columns) {
        if (format == ReportFormat::Json) {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& row : bundle.rows) {
                nlohmann::json item;
                item["theta_deg"] = row.theta_deg;
                for (const auto& col : columns) item[col.name] = row.*(col.value);
                rows.push_back(item);
            }
            write_text_file(path(stem + ".json"), dump_canonical(rows) + "\n");
        } else {
            std::string text = "theta_deg";
            for (const auto& col : columns) {
                text += ",";
                text += col.name;
            }
            text += "\n";
            for (const auto& row : bundle.rows) {
                text += csv_number(row.theta_deg);
                for (const auto& col : columns) {
                    text += ",";
                    text += csv_number(row.*(col.value));
                }
                text += "\n";
            }
            write_text_file(path(stem + ".csv"), text);
        }
    };

    emit_table("fig3", fig3);
    emit_table("fig4", fig4);
    emit_table("fig5", fig5);

    nlohmann::json states = nlohmann::json::array();
    for (const auto& row : bundle.rows) {
        nlohmann::json item;
        item["theta_deg"] = row.theta_deg;
        item["rho"] = rho_to_json(row.rho);
        item["log_likelihood"] = row.log_likelihood;
        item["mle_iterations"] = row.mle_iterations;
        item["mle_converged"] = row.mle_converged;
        item["fidelity_to_ideal"] = row.fidelity_to_ideal;
        states.push_back(item);
    }
    write_text_file(path("states.json"), dump_canonical(states) + "\n");
    return true;
}

QubitBatteryParams random_qubit_params(std::uint64_t seed, std::uint64_t index) {
    rng::Stream stream(seed, index);
    QubitBatteryParams params;
    params.p = stream.uniform01();
    params.r = stream.uniform01() * std::sqrt(params.p * (1.0 - params.p));
    params.theta_phase = 2.0 * M_PI * stream.uniform01();
    return params;
}

RelationSweepResult verify_relations_sweep(std::uint64_t samples, std::uint64_t seed,
                                           double tolerance, std::vector<double> qs,
                                           ExecPolicy policy) {
    if (samples == 0) {
        throw Error(ErrorCode::InvalidParams, "verify_relations: sample count must be positive");
    }
    if (qs.empty()) qs = {2.0};
    RelationSweepResult result;
    result.samples = samples;
    result.qs = qs;
    ObservableHamiltonian h = ObservableHamiltonian::diagonal((RealVector(2) << 0, 1).finished(), 1.0);

    const auto n = static_cast<std::int64_t>(samples);
    std::vector<std::vector<RelationViolation>> partial(hardware_threads());

    auto run_one = [&](std::int64_t i, std::vector<RelationViolation>& sink) {
        QubitBatteryParams params = random_qubit_params(seed, static_cast<std::uint64_t>(i));
        DensityMatrix rho = DensityMatrix::validated(qubit_state(params));
        for (std::size_t qi = 0; qi < qs.size(); ++qi) {
            RelationReport report = check_relations(rho, h, qs[qi], tolerance);
            auto flag = [&](const char* name, double value) {
                sink.push_back({static_cast<std::uint64_t>(i), params, qs[qi], name, value});
            };
            if (qi == 0) {
                if (!report.csu_holds) flag("CSU", report.csu);
                if (!report.clu_holds) flag("CLU", report.clu);
                if (!report.ccu_holds) flag("CCU", report.ccu);
            }
            if (!report.ctu_holds) flag("CTU", report.ctu);
        }
    };

    if (policy == ExecPolicy::parallel) {
#pragma omp parallel
        {
#ifdef _OPENMP
            auto& sink = partial[omp_get_thread_num()];
#else
            auto& sink = partial[0];
#endif
#pragma omp for schedule(static)
            for (std::int64_t i = 0; i < n; ++i) run_one(i, sink);
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) run_one(i, partial[0]);
    }

    for (auto& sink : partial) {
        result.violations.insert(result.violations.end(), sink.begin(), sink.end());
    }
    std::sort(result.violations.begin(), result.violations.end(),
              [](const RelationViolation& a, const RelationViolation& b) {
                  if (a.sample_index != b.sample_index) return a.sample_index < b.sample_index;
                  if (a.q != b.q) return a.q < b.q;
                  return a.relation < b.relation;
              });
    return result;
}

}  // namespace qbat
