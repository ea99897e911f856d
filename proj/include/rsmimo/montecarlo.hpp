#pragma once

#include "rsmimo/scenario.hpp"
#include "rsmimo/solver.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rsmimo {

enum class McScheme { PerfectCsiLmmse, PilotMmseChannel, PilotThenLmmseData, SvdBlind };

/// "perfect-csi", "pilot-channel", "pilot-then-data", "svd-blind".
std::string scheme_name(McScheme scheme);
McScheme parse_scheme(std::string_view name);

/// Finite system sizes derived from the ratios. N and T_t are rounded half away from zero;
/// per-cell user counts are rounded the same way and the largest cell absorbs any mismatch.
struct Dimensions {
    std::size_t K = 0;
    std::size_t N = 0;
    std::array<std::size_t, kPhases> T{};
    std::vector<std::size_t> Kc;
    std::vector<std::size_t> offset;  // first user index of each cell

    std::size_t T_total() const { return T[0] + T[1]; }
};

/// Throws std::invalid_argument if any derived size is inconsistent.
Dimensions derive_dimensions(const Scenario& s, std::size_t K);

/// One draw of the block model Y = H X / sqrt(K) + W. Users are stacked by cell; the
/// first T[0] columns of X are the training phase. Training symbols of known-prior cells
/// are drawn i.i.d. CN(0, Gamma_1) and are side information to the receiver.
struct Instance {
    Dimensions dims;
    Eigen::MatrixXcd H;  // N x K
    Eigen::MatrixXcd X;  // K x T
    Eigen::MatrixXcd W;  // N x T
    Eigen::MatrixXcd Y;  // N x T
};

using Rng = std::mt19937_64;

/// Independent substream for one trial, fixed by (seed, trial).
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

Instance generate_instance(const Scenario& s, const Dimensions& dims, Rng& rng);

/// Recomputes Y from H, X and W.
void assemble_observation(Instance& inst);

/// Per-trial squared errors for the target cell (cell 0). conditional_* is the posterior
/// expected error given the channel/pilots, where the estimator is exact Bayes.
struct TrialMse {
    std::optional<double> mse_H;
    std::optional<double> mse_X;
    std::optional<double> conditional_mse_H;
    std::optional<double> conditional_mse_X;
    bool flagged = false;
};

/// Channel knowledge handed to the linear data detector.
struct ChannelEstimate {
    Eigen::MatrixXcd H_hat;         // N x K; columns of unestimated cells are zero
    Eigen::VectorXd error_var;      // per-user entry error variance
    std::vector<bool> estimated;    // per cell; others are treated as white noise
};

/// Linear MMSE channel estimate from the training block. Cells with known pilots are
/// estimated jointly; the remaining cells' training signal is folded into the noise.
ChannelEstimate pilot_channel_estimate(const Scenario& s, const Instance& inst);

/// Linear MMSE detection of the data block given a channel estimate and its error variance.
/// With the true channel and zero error this is the exact posterior mean for Gaussian data.
TrialMse lmmse_data(const Scenario& s, const Instance& inst, const ChannelEstimate& est);

TrialMse perfect_csi_lmmse(const Scenario& s, const Instance& inst);
TrialMse pilot_mmse_channel(const Scenario& s, const Instance& inst);
TrialMse pilot_then_lmmse_data(const Scenario& s, const Instance& inst);

/// Blind subspace baseline: the rank dominant left singular vectors of Y span the target
/// channel; the remaining rank x K_1 ambiguity is fitted by least squares on the target
/// pilots. The trial is flagged when the singular values at the rank boundary tie.
TrialMse svd_blind(const Scenario& s, const Instance& inst, std::size_t rank);

struct McConfig {
    std::size_t K = 10;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    McScheme scheme = McScheme::PerfectCsiLmmse;
    std::size_t svd_rank = 0;  // 0: number of target-cell users
    int threads = 0;
    SolverConfig solver{};     // for the attached replica prediction

    void validate() const;
};

struct Statistic {
    double mean = 0.0;
    double std_error = 0.0;  // +inf for a single trial
};

struct McReport {
    McScheme scheme = McScheme::PerfectCsiLmmse;
    Dimensions dims;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::optional<Statistic> mse_H;
    std::optional<Statistic> mse_X;
    std::optional<Statistic> conditional_mse_H;
    std::optional<Statistic> conditional_mse_X;
    std::optional<double> replica_mse_H;
    std::optional<double> replica_mse_X;
    std::size_t flagged_trials = 0;

    bool ci_infinite() const { return trials < 2; }
};

struct ReplicaPrediction {
    std::optional<double> mse_H;
    std::optional<double> mse_X;
};

/// Large-system prediction matching each scheme: the pinned perfect-CSI fixed point, the
/// pilot-only stages, or the joint estimator for the blind baseline.
ReplicaPrediction replica_prediction(const Scenario& s, McScheme scheme, const SolverConfig& config = {});

/// Runs all trials (in parallel when threads allow) and aggregates them in trial order.
McReport run_monte_carlo(const Scenario& s, const McConfig& config);

/// Per-trial outcomes of a run, in trial order.
std::vector<TrialMse> run_trials(const Scenario& s, const McConfig& config);

}  // namespace rsmimo
