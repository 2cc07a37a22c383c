#include "qbat/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "qbat/jsonio.hpp"
#include "qbat/rng.hpp"

namespace qbat {

namespace {

struct FlatData {
    std::vector<ComplexMatrix> projectors;
    std::vector<double> counts;
    double total = 0;
    int dim = 0;
};

FlatData flatten(const std::vector<CountRecord>& records) {
    if (records.empty()) {
        throw Error(ErrorCode::EmptyRecord, "no count records supplied");
    }
    FlatData data;
    data.dim = 4;
    for (const auto& record : records) {
        auto projectors = setting_projectors(record.setting);
        for (int k = 0; k < 4; ++k) {
            data.projectors.push_back(projectors[k]);
            data.counts.push_back(static_cast<double>(record.counts[k]));
            data.total += static_cast<double>(record.counts[k]);
        }
    }
    if (data.total <= 0) {
        throw Error(ErrorCode::EmptyRecord, "all counts are zero");
    }
    return data;
}

/// Orthogonal-ish Hermitian basis of the d x d matrices: diagonal units,
/// then symmetric and antisymmetric off-diagonal pairs.
std::vector<ComplexMatrix> hermitian_basis(int d) {
    std::vector<ComplexMatrix> basis;
    basis.reserve(d * d);
    for (int i = 0; i < d; ++i) {
        ComplexMatrix e = ComplexMatrix::Zero(d, d);
        e(i, i) = 1.0;
        basis.push_back(e);
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            ComplexMatrix sym = ComplexMatrix::Zero(d, d);
            sym(i, j) = 1.0;
            sym(j, i) = 1.0;
            basis.push_back(sym);
            ComplexMatrix asym = ComplexMatrix::Zero(d, d);
            asym(i, j) = Complex(0, 1);
            asym(j, i) = Complex(0, -1);
            basis.push_back(asym);
        }
    }
    return basis;
}

/// Euclidean projection of a real vector onto the probability simplex.
RealVector simplex_project(const RealVector& v) {
    const Eigen::Index n = v.size();
    std::vector<double> sorted(v.data(), v.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0;
    double tau = 0;
    int support = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        cumulative += sorted[k];
        double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0) {
            tau = candidate;
            support = static_cast<int>(k + 1);
        }
    }
    (void)support;
    RealVector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = std::max(v(i) - tau, 0.0);
    return out;
}

// --- Cholesky-style parameterization -------------------------------------
//
// rho = T^dagger T / Tr(T^dagger T), T lower-triangular complex with real
// diagonal: d^2 real parameters, physical for every parameter value.

int param_count(int d) { return d * d; }

ComplexMatrix params_to_t(const std::vector<double>& x, int d) {
    ComplexMatrix t = ComplexMatrix::Zero(d, d);
    int idx = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < i; ++j) {
            t(i, j) = Complex(x[idx], x[idx + 1]);
            idx += 2;
        }
        t(i, i) = Complex(x[idx], 0);
        ++idx;
    }
    return t;
}

std::vector<double> t_to_params(const ComplexMatrix& t) {
    const int d = static_cast<int>(t.rows());
    std::vector<double> x(param_count(d));
    int idx = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < i; ++j) {
            x[idx] = t(i, j).real();
            x[idx + 1] = t(i, j).imag();
            idx += 2;
        }
        x[idx] = t(i, i).real();
        ++idx;
    }
    return x;
}

/// Lower-triangular T with T^dagger T = a, via the exchange-flip of the
/// ordinary Cholesky factorization. Requires positive definite input.
ComplexMatrix lower_factor(const ComplexMatrix& a) {
    const Eigen::Index d = a.rows();
    ComplexMatrix flipped(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            flipped(i, j) = a(d - 1 - i, d - 1 - j);
        }
    }
    Eigen::LLT<ComplexMatrix> llt(flipped);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "initial state factorization failed");
    }
    ComplexMatrix l = llt.matrixL();
    ComplexMatrix upper = l.adjoint();
    ComplexMatrix t(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            t(i, j) = upper(d - 1 - i, d - 1 - j);
        }
    }
    // Rotate row phases so the diagonal is real non-negative; T^dagger T is
    // unchanged under diag-phase left multiplication.
    for (Eigen::Index i = 0; i < d; ++i) {
        Complex diag = t(i, i);
        double mag = std::abs(diag);
        if (mag > 0) t.row(i) *= std::conj(diag) / mag;
    }
    return t;
}

struct Objective {
    const FlatData& data;

    /// Per-count normalized log-likelihood at T, plus its gradient in the
    /// real parameter layout when grad != nullptr.
    double eval(const ComplexMatrix& t, std::vector<double>* grad) const {
        const int d = data.dim;
        ComplexMatrix a = t.adjoint() * t;
        double trace = a.trace().real();
        double loglik = 0;
        ComplexMatrix b = ComplexMatrix::Zero(d, d);
        double diagonal_pull = 0;
        for (std::size_t k = 0; k < data.projectors.size(); ++k) {
            double n = data.counts[k];
            double p = (a * data.projectors[k]).trace().real() / trace;
            p = std::max(p, 1e-300);
            if (n > 0) {
                loglik += n * std::log(p);
                if (grad) {
                    double weight = n / p;
                    b += weight * data.projectors[k];
                    diagonal_pull += weight * p;
                }
            }
        }
        loglik /= data.total;
        if (grad) {
            b -= diagonal_pull * ComplexMatrix::Identity(d, d);
            b /= (trace * data.total);
            ComplexMatrix g = t * b;
            grad->assign(param_count(d), 0.0);
            int idx = 0;
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < i; ++j) {
                    (*grad)[idx] = 2.0 * g(i, j).real();
                    (*grad)[idx + 1] = 2.0 * g(i, j).imag();
                    idx += 2;
                }
                (*grad)[idx] = 2.0 * g(i, i).real();
                ++idx;
            }
        }
        return loglik;
    }
};

double inf_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

ComplexMatrix linear_reconstruct(const std::vector<CountRecord>& records) {
    FlatData data = flatten(records);
    const int d = data.dim;
    auto basis = hermitian_basis(d);
    const int n_eq = static_cast<int>(data.projectors.size());
    const int n_par = static_cast<int>(basis.size());
    Eigen::MatrixXd design(n_eq, n_par);
    Eigen::VectorXd rhs(n_eq);
    int eq = 0;
    for (const auto& record : records) {
        auto probabilities = joint_probability(record);
        for (int k = 0; k < 4; ++k) {
            rhs(eq + k) = probabilities[k];
        }
        eq += 4;
    }
    for (int row = 0; row < n_eq; ++row) {
        for (int col = 0; col < n_par; ++col) {
            design(row, col) = (data.projectors[row] * basis[col]).trace().real();
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < n_par) {
        std::ostringstream os;
        os << "projector set spans rank " << qr.rank() << " of " << n_par;
        throw Error(ErrorCode::UnderdeterminedSet, os.str());
    }
    Eigen::VectorXd coeff = qr.solve(rhs);
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (int col = 0; col < n_par; ++col) m += coeff(col) * basis[col];
    m = 0.5 * (m + m.adjoint());
    double trace = m.trace().real();
    if (std::abs(trace) < 1e-12) {
        throw Error(ErrorCode::UnderdeterminedSet, "linear inversion produced a traceless fit");
    }
    return m / trace;
}

DensityMatrix project_to_physical(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "project_to_physical: matrix must be square");
    }
    ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "project_to_physical: eigensolver failed");
    }
    RealVector projected = simplex_project(solver.eigenvalues());
    ComplexMatrix out = solver.eigenvectors() * projected.asDiagonal() *
                        solver.eigenvectors().adjoint();
    return DensityMatrix::validated(out);
}

double log_likelihood(const DensityMatrix& rho, const std::vector<CountRecord>& records) {
    FlatData data = flatten(records);
    double loglik = 0;
    for (std::size_t k = 0; k < data.projectors.size(); ++k) {
        if (data.counts[k] > 0) {
            double p = (rho.matrix() * data.projectors[k]).trace().real();
            loglik += data.counts[k] * std::log(std::max(p, 1e-300));
        }
    }
    return loglik;
}

TomographyResult mle_reconstruct(const std::vector<CountRecord>& records,
                                 std::optional<ComplexMatrix> init,
                                 const MleOptions& options) {
    if (options.max_iter < 1) {
        throw Error(ErrorCode::InvalidParams, "mle_reconstruct: max_iter must be >= 1");
    }
    FlatData data = flatten(records);
    const int d = data.dim;

    ComplexMatrix start = init ? 0.5 * (*init + init->adjoint()) : linear_reconstruct(records);
    ComplexMatrix rho0 = project_to_physical(start).matrix();
    // The epsilon floor keeps the likelihood finite when the projected
    // start is rank deficient.
    const double eps = 1e-6;
    rho0 = (rho0 + eps * ComplexMatrix::Identity(d, d)) / (1.0 + eps * d);
    ComplexMatrix t = lower_factor(rho0);

    Objective objective{data};
    std::vector<double> x = t_to_params(t);
    std::vector<double> grad;
    double value = objective.eval(params_to_t(x, d), &grad);

    // L-BFGS ascent with Armijo backtracking; memory of 10 curvature pairs.
    const int memory = 10;
    std::deque<std::vector<double>> s_hist;
    std::deque<std::vector<double>> y_hist;
    std::deque<double> rho_hist;

    int iterations = 0;
    bool converged = false;
    int stall_count = 0;
    double best_grad_norm = std::numeric_limits<double>::infinity();

    for (; iterations < options.max_iter; ++iterations) {
        if (inf_norm(grad) <= options.grad_tol) {
            converged = true;
            break;
        }

        // Two-loop recursion on the ascent direction.
        std::vector<double> direction = grad;
        std::vector<double> alpha(s_hist.size());
        for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
            alpha[h] = rho_hist[h] * dot(s_hist[h], direction);
            for (std::size_t i = 0; i < direction.size(); ++i) {
                direction[i] -= alpha[h] * y_hist[h][i];
            }
        }
        if (!s_hist.empty()) {
            double scale = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            if (scale > 0) {
                for (double& v : direction) v *= scale;
            }
        }
        for (std::size_t h = 0; h < s_hist.size(); ++h) {
            double beta = rho_hist[h] * dot(y_hist[h], direction);
            for (std::size_t i = 0; i < direction.size(); ++i) {
                direction[i] += s_hist[h][i] * (alpha[h] - beta);
            }
        }

        double slope = dot(grad, direction);
        if (slope <= 0) {
            // Curvature history turned sour; fall back to steepest ascent.
            direction = grad;
            slope = dot(grad, grad);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        double step = 1.0;
        bool accepted = false;
        std::vector<double> x_new(x.size());
        std::vector<double> grad_new;
        double value_new = value;
        for (int bt = 0; bt < 50; ++bt) {
            for (std::size_t i = 0; i < x.size(); ++i) x_new[i] = x[i] + step * direction[i];
            value_new = objective.eval(params_to_t(x_new, d), nullptr);
            if (value_new >= value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        if (value_new < value - 1e-12 * std::max(1.0, std::abs(value))) {
            throw Error(ErrorCode::InternalInconsistency,
                        "mle_reconstruct: accepted step decreased the likelihood");
        }

        objective.eval(params_to_t(x_new, d), &grad_new);

        std::vector<double> s_vec(x.size());
        std::vector<double> y_vec(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            s_vec[i] = x_new[i] - x[i];
            // y in maximization form: old gradient minus new keeps s.y > 0
            // near a maximum.
            y_vec[i] = grad[i] - grad_new[i];
        }
        double sy = dot(s_vec, y_vec);
        // Relative curvature test: tiny late-stage steps still carry
        // usable curvature pairs.
        if (sy > 1e-10 * std::sqrt(dot(s_vec, s_vec) * dot(y_vec, y_vec)) && sy > 0) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        double gain = value_new - value;
        x = x_new;
        grad = grad_new;
        value = value_new;
        // Near the optimum the per-step gain falls below double resolution
        // while the iterates still contract; stall only once neither the
        // value nor the gradient norm makes progress.
        double grad_norm = inf_norm(grad);
        bool value_progress = gain > 1e-15 * std::max(1.0, std::abs(value));
        bool grad_progress = grad_norm < 0.999 * best_grad_norm;
        best_grad_norm = std::min(best_grad_norm, grad_norm);
        if (!value_progress && !grad_progress) {
            if (++stall_count >= 15) break;
        } else {
            stall_count = 0;
        }
    }
    if (!converged && inf_norm(grad) <= options.grad_tol) {
        converged = true;
    }

    ComplexMatrix t_final = params_to_t(x, d);
    ComplexMatrix a = t_final.adjoint() * t_final;
    ComplexMatrix rho = a / a.trace().real();
    DensityMatrix state = DensityMatrix::validated(rho);
    TomographyResult result{state, value * data.total, iterations, converged, std::nullopt};
    return result;
}

std::vector<CountRecord> resample_counts(const std::vector<CountRecord>& records,
                                         std::uint64_t seed, std::uint64_t resample_index) {
    std::vector<CountRecord> out = records;
    std::uint64_t resample_seed = rng::substream(seed, resample_index);
    for (std::size_t j = 0; j < out.size(); ++j) {
        rng::Stream stream(resample_seed, j);
        for (int k = 0; k < 4; ++k) {
            out[j].counts[k] = stream.poisson(static_cast<double>(records[j].counts[k]));
        }
    }
    return out;
}

std::vector<std::vector<double>> bootstrap_samples(
    const std::vector<CountRecord>& records,
    const std::function<std::vector<double>(const std::vector<CountRecord>&)>& statistic,
    int resamples, std::uint64_t seed, ExecPolicy policy) {
    if (resamples < 2) {
        throw Error(ErrorCode::InvalidParams, "bootstrap requires at least 2 resamples");
    }
    std::vector<std::vector<double>> results(resamples);
    int failed_index = -1;
    std::string failure_what;

    auto run_one = [&](int r) {
        try {
            results[r] = statistic(resample_counts(records, seed, r));
        } catch (const std::exception& e) {
#pragma omp critical
            {
                if (failed_index < 0 || r < failed_index) {
                    failed_index = r;
                    failure_what = e.what();
                }
            }
        }
    };

    if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < resamples; ++r) run_one(r);
    } else {
        for (int r = 0; r < resamples; ++r) run_one(r);
    }

    if (failed_index >= 0) {
        std::ostringstream os;
        os << "statistic failed on resample " << failed_index << ": " << failure_what;
        throw Error(ErrorCode::StatisticFailure, os.str());
    }
    return results;
}

BootstrapEstimate bootstrap_error_bars(
    const std::vector<CountRecord>& records,
    const std::function<double(const std::vector<CountRecord>&)>& statistic, int resamples,
    std::uint64_t seed, ExecPolicy policy) {
    auto wrapped = [&statistic](const std::vector<CountRecord>& resampled) {
        return std::vector<double>{statistic(resampled)};
    };
    auto samples = bootstrap_samples(records, wrapped, resamples, seed, policy);
    double mean = 0;
    for (const auto& row : samples) mean += row[0];
    mean /= static_cast<double>(resamples);
    double variance = 0;
    for (const auto& row : samples) variance += (row[0] - mean) * (row[0] - mean);
    variance /= static_cast<double>(resamples - 1);
    return {mean, std::sqrt(variance), resamples};
}

double mle_gradient_fd_error(const std::vector<CountRecord>& records, std::uint64_t seed,
                             int points) {
    FlatData data = flatten(records);
    const int d = data.dim;
    Objective objective{data};
    double worst = 0;
    for (int point = 0; point < points; ++point) {
        rng::Stream stream(seed, point);
        std::vector<double> x(param_count(d));
        for (double& v : x) v = 0.5 * stream.normal();
        // Keep the factor away from singularity.
        int idx = 0;
        for (int i = 0; i < d; ++i) {
            idx += 2 * i;
            x[idx] = 0.5 + std::abs(x[idx]);
            ++idx;
        }
        std::vector<double> analytic;
        objective.eval(params_to_t(x, d), &analytic);
        double scale = std::max(inf_norm(analytic), 1e-12);
        const double h = 1e-6;
        for (std::size_t i = 0; i < x.size(); ++i) {
            std::vector<double> lo = x;
            std::vector<double> hi = x;
            lo[i] -= h;
            hi[i] += h;
            double fd = (objective.eval(params_to_t(hi, d), nullptr) -
                         objective.eval(params_to_t(lo, d), nullptr)) /
                        (2.0 * h);
            worst = std::max(worst, std::abs(analytic[i] - fd) / scale);
        }
    }
    return worst;
}

std::string tomography_result_to_json(const TomographyResult& result) {
    nlohmann::json j;
    j["rho"] = rho_to_json(result.rho.matrix());
    j["log_likelihood"] = result.log_likelihood;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    if (result.fidelity_to_target) {
        j["fidelity_to_target"] = *result.fidelity_to_target;
    } else {
        j["fidelity_to_target"] = nullptr;
    }
    return dump_canonical(j) + "\n";
}

}  // namespace qbat
