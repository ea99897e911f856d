#pragma once

#include "rsmimo/priors.hpp"
#include "rsmimo/scenario.hpp"
#include "rsmimo/solver.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rsmimo {

/// Below this training ratio pilots no longer resolve the estimator's ambiguity;
/// such scenarios are accepted with a warning.
inline constexpr double kNegligiblePilotFloor = 1e-6;

/// Single cell with the channel known: no training phase, mse_H pinned to 0.
Scenario example1_perfect_csi(double alpha, double sigma2, double G, const Prior& data_prior, double beta = 1.0);

struct SingleCellParams {
    double alpha = 1.0;
    double beta1 = 1.0;
    double beta2 = 4.0;
    double sigma2 = 1.0;
    double G = 1.0;
    double Gamma1 = 1.0;
    double Gamma2 = 1.0;
    Prior data_prior = Prior::gaussian(1.0);  // rescaled to Gamma2
};

/// Channel estimated from the pilots alone, then used for data detection.
struct PilotOnlyResult {
    Scenario channel_stage;  // data phase removed
    Scenario data_stage;     // mse_H frozen at the channel-stage value
    FixedPointResult channel;
    FixedPointResult data;
    double mse_H = 0.0;
    double mse_X2 = 0.0;
};

/// Throws std::invalid_argument when beta1 = 0.
PilotOnlyResult example2_pilot_only(const SingleCellParams& p, const SolverConfig& config = {});

/// Joint channel-and-data estimation in a single cell; pilots are known symbols.
Scenario example2_jcd(const SingleCellParams& p);

struct TwoCellParams {
    double alpha = 1.0;
    double beta1 = 1.0;
    double beta2 = 9.0;
    double sigma2 = 1.0;
    double G1 = 1.0;
    double G2 = 0.1;
    double k1 = 0.5;
    double k2 = 0.5;
    double Gamma1 = 1.0;
    double Gamma2 = 1.0;
    Prior target_prior = Prior::gaussian(1.0);      // cell 1 data, rescaled to Gamma2
    Prior interferer_prior = Prior::gaussian(1.0);  // both phases of cell 2, rescaled per phase
};

/// Target cell plus one interfering cell whose pilots are unknown at the target base station.
Scenario example3_two_cell(const TwoCellParams& p);

/// As example3, but the interfering cell is treated as noise: all its order parameters stay at
/// ignorance, so its residual interference is G2 * Gamma_t in both phases.
Scenario conventional_jcd_two_cell(const TwoCellParams& p);

/// Single-cell QPSK joint estimation with negligible pilots: beta = 2, beta1 = 1e-4, Gamma = G = 1.
Scenario qpsk_negligible_pilot(double alpha, double sigma2);

/// Canonical named scenarios for the CLI: example1, example2-pilot, example2-jcd, example3,
/// conventional-jcd, qpsk-jcd. Throws std::invalid_argument for unknown names.
Scenario preset(std::string_view name);
std::vector<std::string> preset_names();

/// Non-fatal remarks about a valid scenario (negligible pilots, noiseless ranking).
std::vector<std::string> scenario_warnings(const Scenario& s);

}  // namespace rsmimo
