#include "qbat/photonics.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "qbat/rng.hpp"

namespace qbat {

namespace {

ComplexVector ket(Complex a, Complex b) {
    ComplexVector v(2);
    v << a, b;
    return v;
}

ComplexMatrix projector(const ComplexVector& v) {
    return v * v.adjoint();
}

}  // namespace

const char* basis_name(Basis b) {
    switch (b) {
        case Basis::HV: return "HV";
        case Basis::DA: return "DA";
        case Basis::LR: return "LR";
    }
    return "?";
}

Basis basis_from_name(const std::string& name) {
    if (name == "HV") return Basis::HV;
    if (name == "DA") return Basis::DA;
    if (name == "LR") return Basis::LR;
    throw Error(ErrorCode::InvalidParams, "unknown basis name: " + name);
}

const char* noise_model_name(NoiseModel m) {
    switch (m) {
        case NoiseModel::None: return "none";
        case NoiseModel::White: return "white";
        case NoiseModel::Dephasing: return "dephasing";
    }
    return "?";
}

NoiseModel noise_model_from_name(const std::string& name) {
    if (name == "none") return NoiseModel::None;
    if (name == "white") return NoiseModel::White;
    if (name == "dephasing") return NoiseModel::Dephasing;
    throw Error(ErrorCode::InvalidParams, "unknown noise model: " + name);
}

std::vector<MeasurementSetting> tomography_settings() {
    std::vector<MeasurementSetting> settings;
    settings.reserve(9);
    for (Basis a : {Basis::HV, Basis::DA, Basis::LR}) {
        for (Basis b : {Basis::HV, Basis::DA, Basis::LR}) {
            settings.push_back({a, b});
        }
    }
    return settings;
}

DensityMatrix prepare_phi(double theta_deg) {
    if (theta_deg < 0.0 || theta_deg > 90.0) {
        throw Error(ErrorCode::InvalidParams, "prepare_phi: theta must lie in [0, 90] degrees");
    }
    double theta = theta_deg * M_PI / 180.0;
    // cos(theta)|HV> + sin(theta)|VH> in the (HH,HV,VH,VV) layout.
    ComplexVector psi = ComplexVector::Zero(4);
    psi(1) = std::cos(theta);
    psi(2) = std::sin(theta);
    return DensityMatrix::validated(psi * psi.adjoint());
}

DensityMatrix apply_noise(const DensityMatrix& rho, NoiseModel model, double strength) {
    if (strength < 0.0 || strength > 1.0) {
        throw Error(ErrorCode::InvalidStrength, "noise strength must lie in [0,1]");
    }
    switch (model) {
        case NoiseModel::None:
            return rho;
        case NoiseModel::White: {
            const double d = static_cast<double>(rho.dim());
            ComplexMatrix mix = (1.0 - strength) * rho.matrix() +
                                (strength / d) * ComplexMatrix::Identity(rho.dim(), rho.dim());
            return DensityMatrix::validated(mix);
        }
        case NoiseModel::Dephasing: {
            ComplexMatrix m = rho.matrix();
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                for (Eigen::Index j = 0; j < m.cols(); ++j) {
                    if (i != j) m(i, j) *= (1.0 - strength);
                }
            }
            return DensityMatrix::validated(m);
        }
    }
    throw Error(ErrorCode::InvalidParams, "unknown noise model");
}

std::array<ComplexMatrix, 2> basis_projectors(Basis b) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    switch (b) {
        case Basis::HV:
            return {projector(ket(1, 0)), projector(ket(0, 1))};
        case Basis::DA:
            return {projector(ket(inv_sqrt2, inv_sqrt2)),
                    projector(ket(inv_sqrt2, -inv_sqrt2))};
        case Basis::LR:
            return {projector(ket(inv_sqrt2, Complex(0, inv_sqrt2))),
                    projector(ket(inv_sqrt2, Complex(0, -inv_sqrt2)))};
    }
    throw Error(ErrorCode::InvalidParams, "unknown basis");
}

std::array<ComplexMatrix, 4> setting_projectors(const MeasurementSetting& s) {
    auto pa = basis_projectors(s.basis_A);
    auto pb = basis_projectors(s.basis_B);
    return {kron(pa[0], pb[0]), kron(pa[0], pb[1]), kron(pa[1], pb[0]), kron(pa[1], pb[1])};
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                         const std::vector<MeasurementSetting>& settings,
                                         double mean_counts, std::uint64_t seed) {
    if (!(mean_counts > 0)) {
        throw Error(ErrorCode::InvalidParams, "simulate_counts: mean counts must be positive");
    }
    if (rho.dim() != 4) {
        throw Error(ErrorCode::DimensionMismatch, "simulate_counts: expected a 4x4 state");
    }
    std::vector<CountRecord> records;
    records.reserve(settings.size());
    for (std::size_t s = 0; s < settings.size(); ++s) {
        rng::Stream stream(seed, s);
        auto projectors = setting_projectors(settings[s]);
        CountRecord record;
        record.setting = settings[s];
        for (int k = 0; k < 4; ++k) {
            double p = (rho.matrix() * projectors[k]).trace().real();
            record.counts[k] = stream.poisson(mean_counts * std::max(p, 0.0));
        }
        records.push_back(record);
    }
    return records;
}

std::vector<CountRecord> simulate_counts(const SourceConfig& config) {
    DensityMatrix ideal = prepare_phi(config.theta_deg);
    DensityMatrix noisy = apply_noise(ideal, config.noise_model, config.noise_strength);
    return simulate_counts(noisy, tomography_settings(), config.mean_counts_per_setting,
                           config.seed);
}

std::array<double, 4> joint_probability(const CountRecord& record) {
    const std::uint64_t total = record.total();
    if (total == 0) {
        throw Error(ErrorCode::EmptyRecord, "joint_probability: record has zero total count");
    }
    std::array<double, 4> p{};
    for (int k = 0; k < 4; ++k) {
        p[k] = static_cast<double>(record.counts[k]) / static_cast<double>(total);
    }
    // The count ratios are exact rationals; after rounding each quotient,
    // fold the leftover into the largest entry so the four doubles sum to
    // exactly 1.0.
    for (int pass = 0; pass < 4; ++pass) {
        double deficit = 1.0 - (p[0] + p[1] + p[2] + p[3]);
        if (deficit == 0.0) break;
        int argmax = 0;
        for (int k = 1; k < 4; ++k) {
            if (p[k] > p[argmax]) argmax = k;
        }
        p[argmax] += deficit;
    }
    return p;
}

std::array<double, 2> marginal_probability(const CountRecord& record, Subsystem party) {
    auto joint = joint_probability(record);
    if (party == Subsystem::A) {
        return {joint[0] + joint[1], joint[2] + joint[3]};
    }
    return {joint[0] + joint[2], joint[1] + joint[3]};
}

std::vector<std::array<double, 2>> marginal_probability(const std::vector<CountRecord>& records,
                                                        Subsystem party) {
    std::vector<std::array<double, 2>> out;
    out.reserve(records.size());
    for (const auto& record : records) out.push_back(marginal_probability(record, party));
    return out;
}

std::string counts_to_json(const std::vector<CountRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& record : records) {
        arr.push_back({{"basis_A", basis_name(record.setting.basis_A)},
                       {"basis_B", basis_name(record.setting.basis_B)},
                       {"counts", record.counts}});
    }
    return arr.dump(2) + "\n";
}

std::vector<CountRecord> counts_from_json(const std::string& text) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("counts JSON parse failure: ") + e.what());
    }
    if (!parsed.is_array()) {
        throw Error(ErrorCode::IoError, "counts JSON must be an array of records");
    }
    std::vector<CountRecord> records;
    records.reserve(parsed.size());
    for (const auto& item : parsed) {
        CountRecord record;
        record.setting.basis_A = basis_from_name(item.at("basis_A").get<std::string>());
        record.setting.basis_B = basis_from_name(item.at("basis_B").get<std::string>());
        auto counts = item.at("counts");
        if (!counts.is_array() || counts.size() != 4) {
            throw Error(ErrorCode::IoError, "counts entry must hold four values");
        }
        for (int k = 0; k < 4; ++k) record.counts[k] = counts[k].get<std::uint64_t>();
        records.push_back(record);
    }
    return records;
}

}  // namespace qbat
