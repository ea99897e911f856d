#pragma once

#include "rsmimo/priors.hpp"
#include "rsmimo/scenario.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rsmimo {

/// Replica-symmetric state: per-cell channel MSE and effective SNR, per-(cell, phase)
/// symbol MSE and effective SNR. Pinned entries are frozen by the update maps.
struct OrderParams {
    std::vector<double> mse_H;
    std::vector<double> qtilde_H;
    std::vector<std::array<double, kPhases>> mse_X;
    std::vector<std::array<double, kPhases>> qtilde_X;
    std::vector<bool> pinned_H;
    std::vector<std::array<bool, kPhases>> pinned_X;
    /// Set when some effective SNR hit the +inf sentinel (sigma2 = 0, no residual interference).
    bool degenerate = false;

    static OrderParams zeros(std::size_t cells);
    std::size_t cells() const { return mse_H.size(); }
};

/// Effective SNR of the scalar channel; +inf with the flag when the
/// interference-plus-noise denominator vanishes.
struct EffectiveSnr {
    double value = 0.0;
    bool degenerate = false;
};

/// Residual interference of cell c in phase t: mse_H * Gamma_t + mse_X * (G_c - mse_H).
double delta(const Scenario& s, const OrderParams& p, std::size_t c, std::size_t t);

/// sigma2 + sum_l k_l * delta(l, t).
double interference_plus_noise(const Scenario& s, const OrderParams& p, std::size_t t);

EffectiveSnr update_qtilde_H(const Scenario& s, const OrderParams& p, std::size_t c);
EffectiveSnr update_qtilde_X(const Scenario& s, const OrderParams& p, std::size_t c, std::size_t t);

/// Recomputes every effective SNR from the current mse values (Jacobi: all deltas first).
OrderParams refresh_qtilde(const Scenario& s, OrderParams p);

/// One round of the fixed-point map: mse from the current effective SNRs through the
/// scalar kernels (pinned and known entries untouched), then effective SNRs from the new mse.
OrderParams update_mse(const Scenario& s, const OrderParams& p, const QuadratureOptions& quad = {});

/// State at total ignorance (mse at the prior second moments, known symbols at 0).
OrderParams ignorance_state(const Scenario& s);

/// Replica-symmetric free entropy in nats. Known symbols and pinned entries carry no
/// mutual-information or mse*qtilde terms. Throws std::domain_error when sigma2 = 0.
double free_entropy(const Scenario& s, const OrderParams& p, const QuadratureOptions& quad = {});

/// Applies pins: listed mse entries are set and marked frozen. Throws std::domain_error if
/// a value lies outside [0, prior second moment] or an index is out of range.
OrderParams pin(const Scenario& s, OrderParams p, std::span<const Pin> assignments);

}  // namespace rsmimo
