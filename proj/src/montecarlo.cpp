#include "rsmimo/montecarlo.hpp"

#include "rsmimo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsmimo {
namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::size_t round_half_away(double x) { return static_cast<std::size_t>(std::llround(x)); }

cplx complex_normal(Rng& rng, double variance) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double scale = std::sqrt(variance / 2.0);
    const double re = n(rng);
    const double im = n(rng);
    return {scale * re, scale * im};
}

cplx draw_symbol(const Prior& prior, Rng& rng) {
    const auto& kind = prior.kind();
    if (const auto* g = std::get_if<GaussianPrior>(&kind)) return complex_normal(rng, g->power);
    if (const auto* k = std::get_if<KnownPrior>(&kind)) return complex_normal(rng, k->power);
    if (const auto* q = std::get_if<QpskPrior>(&kind)) {
        std::uniform_int_distribution<int> bit(0, 1);
        const double a = std::sqrt(q->power / 2.0);
        const int re = bit(rng);
        const int im = bit(rng);
        return {re ? a : -a, im ? a : -a};
    }
    const auto& d = std::get<DiscretePrior>(kind);
    std::discrete_distribution<std::size_t> pick(d.probs.begin(), d.probs.end());
    return d.points[pick(rng)];
}

std::size_t cell_of(const Dimensions& dims, std::size_t user) {
    std::size_t c = 0;
    while (c + 1 < dims.offset.size() && user >= dims.offset[c + 1]) ++c;
    return c;
}

void require_gaussian_data(const Scenario& s, const char* scheme) {
    for (std::size_t c = 0; c < s.cells(); ++c)
        if (!s.priors[c][kDataPhase].is_gaussian())
            throw std::invalid_argument(std::string(scheme) +
                                        " needs Gaussian data priors in every cell; no exact finite-size "
                                        "optimal estimator is available otherwise");
}

void require_target_pilots(const Scenario& s, const Instance& inst, const char* scheme) {
    if (!s.priors[0][kTrainingPhase].is_known())
        throw std::invalid_argument(std::string(scheme) + " needs known pilots in the target cell");
    if (inst.dims.T[kTrainingPhase] == 0)
        throw std::invalid_argument(std::string(scheme) + " needs a non-empty training phase");
}

double frob2(const MatrixXcd& m) { return m.squaredNorm(); }

Statistic summarize(const std::vector<double>& values) {
    CompensatedSum sum;
    for (double v : values) sum.add(v);
    const double n = static_cast<double>(values.size());
    const double mean = sum.value() / n;
    if (values.size() < 2) return {mean, std::numeric_limits<double>::infinity()};
    CompensatedSum dev;
    for (double v : values) dev.add((v - mean) * (v - mean));
    const double var = dev.value() / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

std::optional<Statistic> summarize_field(const std::vector<TrialMse>& trials,
                                         std::optional<double> TrialMse::*field) {
    std::vector<double> values;
    values.reserve(trials.size());
    for (const auto& t : trials)
        if (t.*field) values.push_back(*(t.*field));
    if (values.empty()) return std::nullopt;
    return summarize(values);
}

// Jointly Gaussian model y = A x + n, x ~ CN(0, diag(d)), n ~ CN(0, noise I).
// Returns the posterior mean of every column of Y and the posterior covariance,
// through the K x K system (noise I + D A^H A).
struct LinearPosterior {
    MatrixXcd mean;
    MatrixXcd cov;
};

LinearPosterior linear_gaussian_posterior(const MatrixXcd& A, const VectorXd& d, double noise, const MatrixXcd& Y) {
    const auto n = A.cols();
    const MatrixXcd D = d.cast<cplx>().asDiagonal();
    const MatrixXcd system = noise * MatrixXcd::Identity(n, n) + D * (A.adjoint() * A);
    const Eigen::PartialPivLU<MatrixXcd> lu(system);
    LinearPosterior out;
    out.mean = lu.solve(D * (A.adjoint() * Y));
    out.cov = noise * lu.solve(D);
    return out;
}

}  // namespace

std::string scheme_name(McScheme scheme) {
    switch (scheme) {
        case McScheme::PerfectCsiLmmse: return "perfect-csi";
        case McScheme::PilotMmseChannel: return "pilot-channel";
        case McScheme::PilotThenLmmseData: return "pilot-then-data";
        case McScheme::SvdBlind: return "svd-blind";
    }
    return "unknown";
}

McScheme parse_scheme(std::string_view name) {
    for (auto s : {McScheme::PerfectCsiLmmse, McScheme::PilotMmseChannel, McScheme::PilotThenLmmseData,
                   McScheme::SvdBlind})
        if (scheme_name(s) == name) return s;
    throw std::invalid_argument("unknown scheme '" + std::string(name) +
                                "' (expected perfect-csi, pilot-channel, pilot-then-data or svd-blind)");
}

Dimensions derive_dimensions(const Scenario& s, std::size_t K) {
    if (K < 2) throw std::invalid_argument("Monte Carlo needs K >= 2, got " + std::to_string(K));
    Dimensions d;
    d.K = K;
    d.N = round_half_away(s.alpha * static_cast<double>(K));
    for (std::size_t t = 0; t < kPhases; ++t) d.T[t] = round_half_away(s.beta_t[t] * static_cast<double>(K));
    if (d.N < 1) throw std::invalid_argument("alpha * K rounds to zero antennas");
    if (d.T_total() < 1) throw std::invalid_argument("beta * K rounds to an empty block");
    for (std::size_t t = 0; t < kPhases; ++t)
        if (s.beta_t[t] > 0.0 && d.T[t] == 0)
            throw std::invalid_argument("beta" + std::to_string(t + 1) + " * K rounds to zero symbols");

    d.Kc.resize(s.cells());
    std::size_t total = 0;
    for (std::size_t c = 0; c < s.cells(); ++c) {
        d.Kc[c] = round_half_away(s.k[c] * static_cast<double>(K));
        total += d.Kc[c];
    }
    const auto largest = static_cast<std::size_t>(std::max_element(d.Kc.begin(), d.Kc.end()) - d.Kc.begin());
    const auto repaired = static_cast<long long>(d.Kc[largest]) + static_cast<long long>(K) - static_cast<long long>(total);
    if (repaired < 1) throw std::invalid_argument("cannot split K users across cells");
    d.Kc[largest] = static_cast<std::size_t>(repaired);
    for (std::size_t c = 0; c < s.cells(); ++c)
        if (s.k[c] > 0.0 && d.Kc[c] == 0)
            throw std::invalid_argument("cell " + std::to_string(c) + " rounds to zero users at K = " + std::to_string(K));

    d.offset.resize(s.cells());
    std::size_t acc = 0;
    for (std::size_t c = 0; c < s.cells(); ++c) {
        d.offset[c] = acc;
        acc += d.Kc[c];
    }
    return d;
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), 0x5eedu};
    return Rng(seq);
}

void assemble_observation(Instance& inst) {
    inst.Y = inst.H * inst.X / std::sqrt(static_cast<double>(inst.dims.K)) + inst.W;
}

Instance generate_instance(const Scenario& s, const Dimensions& dims, Rng& rng) {
    if (dims.Kc.size() != s.cells()) throw std::invalid_argument("dimensions do not match the scenario's cell count");
    Instance inst;
    inst.dims = dims;
    const auto N = static_cast<Eigen::Index>(dims.N);
    const auto K = static_cast<Eigen::Index>(dims.K);
    const auto T = static_cast<Eigen::Index>(dims.T_total());
    inst.H.resize(N, K);
    inst.X.resize(K, T);
    inst.W.resize(N, T);

    for (std::size_t c = 0; c < s.cells(); ++c)
        for (std::size_t u = dims.offset[c]; u < dims.offset[c] + dims.Kc[c]; ++u)
            for (Eigen::Index n = 0; n < N; ++n) inst.H(n, static_cast<Eigen::Index>(u)) = complex_normal(rng, s.G[c]);

    for (std::size_t c = 0; c < s.cells(); ++c)
        for (std::size_t u = dims.offset[c]; u < dims.offset[c] + dims.Kc[c]; ++u)
            for (Eigen::Index j = 0; j < T; ++j) {
                const std::size_t t = static_cast<std::size_t>(j) < dims.T[0] ? kTrainingPhase : kDataPhase;
                inst.X(static_cast<Eigen::Index>(u), j) = draw_symbol(s.priors[c][t], rng);
            }

    for (Eigen::Index j = 0; j < T; ++j)
        for (Eigen::Index n = 0; n < N; ++n) inst.W(n, j) = complex_normal(rng, s.sigma2);

    assemble_observation(inst);
    return inst;
}

ChannelEstimate pilot_channel_estimate(const Scenario& s, const Instance& inst) {
    const auto& d = inst.dims;
    const double Kd = static_cast<double>(d.K);
    ChannelEstimate est;
    est.H_hat = MatrixXcd::Zero(static_cast<Eigen::Index>(d.N), static_cast<Eigen::Index>(d.K));
    est.error_var = VectorXd::Zero(static_cast<Eigen::Index>(d.K));
    est.estimated.assign(s.cells(), false);

    std::vector<Eigen::Index> users;
    double noise = s.sigma2;
    for (std::size_t c = 0; c < s.cells(); ++c) {
        est.estimated[c] = s.priors[c][kTrainingPhase].is_known();
        for (std::size_t u = d.offset[c]; u < d.offset[c] + d.Kc[c]; ++u) {
            if (est.estimated[c])
                users.push_back(static_cast<Eigen::Index>(u));
            else
                est.error_var(static_cast<Eigen::Index>(u)) = s.G[c];
        }
        if (!est.estimated[c])
            noise += static_cast<double>(d.Kc[c]) / Kd * s.G[c] * s.symbol_power(c, kTrainingPhase);
    }
    const auto ne = static_cast<Eigen::Index>(users.size());
    if (ne == 0) return est;

    VectorXd prior(ne);
    for (Eigen::Index i = 0; i < ne; ++i) prior(i) = s.G[cell_of(d, static_cast<std::size_t>(users[i]))];

    const auto T1 = static_cast<Eigen::Index>(d.T[kTrainingPhase]);
    if (T1 == 0) {
        for (Eigen::Index i = 0; i < ne; ++i) est.error_var(users[i]) = prior(i);
        return est;
    }

    // Row n of H: y_n^T = B^T h_n^T + w, B = P / sqrt(K).
    MatrixXcd Bt(T1, ne);
    for (Eigen::Index i = 0; i < ne; ++i) Bt.col(i) = inst.X.row(users[i]).head(T1).transpose() / std::sqrt(Kd);
    const MatrixXcd Y1t = inst.Y.leftCols(T1).transpose();
    const auto post = linear_gaussian_posterior(Bt, prior, noise, Y1t);
    for (Eigen::Index i = 0; i < ne; ++i) {
        est.H_hat.col(users[i]) = post.mean.row(i).transpose();
        est.error_var(users[i]) = post.cov(i, i).real();
    }
    return est;
}

TrialMse lmmse_data(const Scenario& s, const Instance& inst, const ChannelEstimate& est) {
    const auto& d = inst.dims;
    const double Kd = static_cast<double>(d.K);
    const auto T1 = static_cast<Eigen::Index>(d.T[kTrainingPhase]);
    const auto T2 = static_cast<Eigen::Index>(d.T[kDataPhase]);
    if (T2 == 0) throw std::invalid_argument("data detection needs a non-empty data phase");
    if (!est.estimated.at(0)) throw std::invalid_argument("data detection needs a channel estimate for the target cell");

    std::vector<Eigen::Index> users;
    double noise = s.sigma2;
    for (std::size_t c = 0; c < s.cells(); ++c) {
        const double gamma = s.symbol_power(c, kDataPhase);
        for (std::size_t u = d.offset[c]; u < d.offset[c] + d.Kc[c]; ++u) {
            const auto ui = static_cast<Eigen::Index>(u);
            if (est.estimated[c]) users.push_back(ui);
            // Channel error (or the whole unestimated channel) acts as extra white noise.
            noise += est.error_var(ui) * gamma / Kd;
        }
    }
    const auto ne = static_cast<Eigen::Index>(users.size());
    MatrixXcd A(static_cast<Eigen::Index>(d.N), ne);
    VectorXd prior(ne);
    for (Eigen::Index i = 0; i < ne; ++i) {
        A.col(i) = est.H_hat.col(users[i]) / std::sqrt(Kd);
        prior(i) = s.symbol_power(cell_of(d, static_cast<std::size_t>(users[i])), kDataPhase);
    }
    const auto post = linear_gaussian_posterior(A, prior, noise, inst.Y.rightCols(T2));

    // Target-cell users come first among the estimated users.
    const auto K1 = static_cast<Eigen::Index>(d.Kc[0]);
    const MatrixXcd err = post.mean.topRows(K1) - inst.X.block(0, T1, K1, T2);
    TrialMse out;
    out.mse_X = frob2(err) / static_cast<double>(K1 * T2);
    out.conditional_mse_X = post.cov.topLeftCorner(K1, K1).diagonal().real().sum() / static_cast<double>(K1);
    return out;
}

TrialMse perfect_csi_lmmse(const Scenario& s, const Instance& inst) {
    require_gaussian_data(s, "perfect-CSI LMMSE");
    if (!(s.sigma2 > 0.0)) throw std::invalid_argument("perfect-CSI LMMSE needs sigma2 > 0");
    ChannelEstimate est;
    est.H_hat = inst.H;
    est.error_var = VectorXd::Zero(inst.H.cols());
    est.estimated.assign(s.cells(), true);
    return lmmse_data(s, inst, est);
}

TrialMse pilot_mmse_channel(const Scenario& s, const Instance& inst) {
    require_target_pilots(s, inst, "pilot-only channel MMSE");
    if (!(s.sigma2 > 0.0)) throw std::invalid_argument("pilot-only channel MMSE needs sigma2 > 0");
    const auto est = pilot_channel_estimate(s, inst);
    const auto& d = inst.dims;
    const auto K1 = static_cast<Eigen::Index>(d.Kc[0]);
    TrialMse out;
    out.mse_H = frob2(est.H_hat.leftCols(K1) - inst.H.leftCols(K1)) / static_cast<double>(d.N * d.Kc[0]);
    out.conditional_mse_H = est.error_var.head(K1).sum() / static_cast<double>(K1);
    return out;
}

TrialMse pilot_then_lmmse_data(const Scenario& s, const Instance& inst) {
    require_gaussian_data(s, "pilot-then-LMMSE");
    require_target_pilots(s, inst, "pilot-then-LMMSE");
    if (!(s.sigma2 > 0.0)) throw std::invalid_argument("pilot-then-LMMSE needs sigma2 > 0");
    const auto est = pilot_channel_estimate(s, inst);
    TrialMse out = lmmse_data(s, inst, est);
    const auto& d = inst.dims;
    const auto K1 = static_cast<Eigen::Index>(d.Kc[0]);
    out.mse_H = frob2(est.H_hat.leftCols(K1) - inst.H.leftCols(K1)) / static_cast<double>(d.N * d.Kc[0]);
    out.conditional_mse_H = est.error_var.head(K1).sum() / static_cast<double>(K1);
    // The data-stage error is not an exact posterior once the channel is estimated.
    out.conditional_mse_X.reset();
    return out;
}

TrialMse svd_blind(const Scenario& s, const Instance& inst, std::size_t rank) {
    const auto& d = inst.dims;
    if (rank == 0) throw std::invalid_argument("SVD baseline rank must be >= 1");
    if (rank > std::min(d.N, d.T_total()))
        throw std::invalid_argument("SVD baseline rank " + std::to_string(rank) + " exceeds min(N, T)");
    require_target_pilots(s, inst, "SVD baseline");

    const double Kd = static_cast<double>(d.K);
    const auto r = static_cast<Eigen::Index>(rank);
    const auto K1 = static_cast<Eigen::Index>(d.Kc[0]);
    const auto T1 = static_cast<Eigen::Index>(d.T[kTrainingPhase]);
    const auto T2 = static_cast<Eigen::Index>(d.T[kDataPhase]);

    // Dominant left singular vectors through the smaller Gram matrix.
    MatrixXcd U;
    VectorXd sv2;
    if (d.N <= d.T_total()) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(inst.Y * inst.Y.adjoint());
        sv2 = eig.eigenvalues().reverse();
        U = eig.eigenvectors().rowwise().reverse().leftCols(r);
    } else {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(inst.Y.adjoint() * inst.Y);
        sv2 = eig.eigenvalues().reverse();
        const MatrixXcd V = eig.eigenvectors().rowwise().reverse().leftCols(r);
        U = inst.Y * V;
        for (Eigen::Index i = 0; i < r; ++i) U.col(i) /= std::sqrt(std::max(sv2(i), 0.0));
    }
    TrialMse out;
    if (r < sv2.size() && sv2(r - 1) - sv2(r) <= 1e-12 * std::max(sv2(0), 1.0)) out.flagged = true;

    const MatrixXcd projected = U.adjoint() * inst.Y;  // r x T
    const MatrixXcd pilots = inst.X.topLeftCorner(K1, T1) / std::sqrt(Kd);
    // projected_p ~= B pilots  =>  pilots^T B^T ~= projected_p^T.
    const MatrixXcd Bt = pilots.transpose().completeOrthogonalDecomposition().solve(projected.leftCols(T1).transpose());
    const MatrixXcd B = Bt.transpose();  // r x K1
    const MatrixXcd H_hat = U * B;
    out.mse_H = frob2(H_hat - inst.H.leftCols(K1)) / static_cast<double>(d.N * d.Kc[0]);

    if (T2 > 0) {
        const VectorXd prior = VectorXd::Constant(K1, s.symbol_power(0, kDataPhase));
        const double noise = std::max(s.sigma2, std::numeric_limits<double>::min());
        const auto post = linear_gaussian_posterior(B / std::sqrt(Kd), prior, noise, projected.rightCols(T2));
        const MatrixXcd err = post.mean - inst.X.block(0, T1, K1, T2);
        out.mse_X = frob2(err) / static_cast<double>(K1 * T2);
    }
    return out;
}

void McConfig::validate() const {
    if (K < 2) throw std::invalid_argument("K must be >= 2");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    solver.validate();
}

ReplicaPrediction replica_prediction(const Scenario& s, McScheme scheme, const SolverConfig& config) {
    auto selected = [&](const Scenario& sc) {
        const auto points = solve(sc, config);
        return points[select_fixed_point(sc, points).index].params;
    };
    // Pins for cells whose pilots are unknown: treated as noise, never estimated.
    auto noise_cells = [&](Scenario& sc) {
        for (std::size_t c = 0; c < sc.cells(); ++c) {
            if (sc.priors[c][kTrainingPhase].is_known()) continue;
            sc.pins.push_back({PinField::ChannelMse, c, 0, std::nullopt});
            sc.pins.push_back({PinField::SymbolMse, c, kTrainingPhase, std::nullopt});
            sc.pins.push_back({PinField::SymbolMse, c, kDataPhase, std::nullopt});
        }
    };

    ReplicaPrediction out;
    switch (scheme) {
        case McScheme::PerfectCsiLmmse: {
            Scenario sc = s;
            sc.pins.clear();
            for (std::size_t c = 0; c < sc.cells(); ++c) sc.pins.push_back({PinField::ChannelMse, c, 0, 0.0});
            out.mse_X = selected(sc).mse_X[0][kDataPhase];
            break;
        }
        case McScheme::PilotMmseChannel:
        case McScheme::PilotThenLmmseData: {
            Scenario stage1 = s;
            stage1.pins.clear();
            stage1.beta_t[kDataPhase] = 0.0;
            noise_cells(stage1);
            const auto channel = selected(stage1);
            out.mse_H = channel.mse_H[0];
            if (scheme == McScheme::PilotMmseChannel) break;
            Scenario stage2 = s;
            stage2.pins.clear();
            noise_cells(stage2);
            for (std::size_t c = 0; c < s.cells(); ++c)
                if (s.priors[c][kTrainingPhase].is_known())
                    stage2.pins.push_back({PinField::ChannelMse, c, 0, channel.mse_H[c]});
            out.mse_X = selected(stage2).mse_X[0][kDataPhase];
            break;
        }
        case McScheme::SvdBlind: {
            const auto joint = selected(s);
            out.mse_H = joint.mse_H[0];
            out.mse_X = joint.mse_X[0][kDataPhase];
            break;
        }
    }
    return out;
}

std::vector<TrialMse> run_trials(const Scenario& s, const McConfig& config) {
    config.validate();
    validate(s);
    const Dimensions dims = derive_dimensions(s, config.K);
    const std::size_t rank = config.svd_rank ? config.svd_rank : dims.Kc[0];
    std::vector<TrialMse> outcomes(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t i) {
        Rng rng = trial_rng(config.seed, i);
        const Instance inst = generate_instance(s, dims, rng);
        switch (config.scheme) {
            case McScheme::PerfectCsiLmmse: outcomes[i] = perfect_csi_lmmse(s, inst); break;
            case McScheme::PilotMmseChannel: outcomes[i] = pilot_mmse_channel(s, inst); break;
            case McScheme::PilotThenLmmseData: outcomes[i] = pilot_then_lmmse_data(s, inst); break;
            case McScheme::SvdBlind: outcomes[i] = svd_blind(s, inst, rank); break;
        }
    });
    return outcomes;
}

McReport run_monte_carlo(const Scenario& s, const McConfig& config) {
    const auto outcomes = run_trials(s, config);
    McReport report;
    report.scheme = config.scheme;
    report.dims = derive_dimensions(s, config.K);
    report.trials = config.trials;
    report.seed = config.seed;
    report.mse_H = summarize_field(outcomes, &TrialMse::mse_H);
    report.mse_X = summarize_field(outcomes, &TrialMse::mse_X);
    report.conditional_mse_H = summarize_field(outcomes, &TrialMse::conditional_mse_H);
    report.conditional_mse_X = summarize_field(outcomes, &TrialMse::conditional_mse_X);
    for (const auto& o : outcomes) report.flagged_trials += o.flagged ? 1 : 0;
    const auto prediction = replica_prediction(s, config.scheme, config.solver);
    report.replica_mse_H = prediction.mse_H;
    report.replica_mse_X = prediction.mse_X;
    return report;
}

}  // namespace rsmimo
