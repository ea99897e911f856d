#include "rsmimo/replica.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rsmimo {
namespace {

void check_index(const Scenario& s, const OrderParams& p, std::size_t c, std::size_t t) {
    if (c >= s.cells() || c >= p.cells() || t >= kPhases)
        throw std::out_of_range("order parameter index (" + std::to_string(c) + ", " + std::to_string(t) +
                                ") out of range");
}

EffectiveSnr ratio(double numerator, double denominator) {
    if (denominator > 0.0) return {numerator / denominator, false};
    if (numerator > 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {0.0, true};
}

}  // namespace

OrderParams OrderParams::zeros(std::size_t cells) {
    OrderParams p;
    p.mse_H.assign(cells, 0.0);
    p.qtilde_H.assign(cells, 0.0);
    p.mse_X.assign(cells, {0.0, 0.0});
    p.qtilde_X.assign(cells, {0.0, 0.0});
    p.pinned_H.assign(cells, false);
    p.pinned_X.assign(cells, {false, false});
    return p;
}

double delta(const Scenario& s, const OrderParams& p, std::size_t c, std::size_t t) {
    check_index(s, p, c, t);
    const double G = s.channel_power(c);
    const double mse_H = p.mse_H[c];
    return mse_H * s.symbol_power(c, t) + p.mse_X[c][t] * (G - mse_H);
}

double interference_plus_noise(const Scenario& s, const OrderParams& p, std::size_t t) {
    double acc = s.sigma2;
    for (std::size_t l = 0; l < s.cells(); ++l) acc += s.k[l] * delta(s, p, l, t);
    return acc;
}

EffectiveSnr update_qtilde_H(const Scenario& s, const OrderParams& p, std::size_t c) {
    check_index(s, p, c, 0);
    EffectiveSnr out;
    for (std::size_t t = 0; t < kPhases; ++t) {
        // A phase with no symbols contributes nothing, even if its denominator vanishes.
        if (s.beta_t[t] == 0.0) continue;
        const auto term = ratio(s.beta_t[t] * (s.symbol_power(c, t) - p.mse_X[c][t]), interference_plus_noise(s, p, t));
        out.value += term.value;
        out.degenerate = out.degenerate || term.degenerate;
    }
    return out;
}

EffectiveSnr update_qtilde_X(const Scenario& s, const OrderParams& p, std::size_t c, std::size_t t) {
    check_index(s, p, c, t);
    return ratio(s.alpha * (s.channel_power(c) - p.mse_H[c]), interference_plus_noise(s, p, t));
}

OrderParams refresh_qtilde(const Scenario& s, OrderParams p) {
    const std::size_t C = s.cells();
    std::vector<double> qH(C);
    std::vector<std::array<double, kPhases>> qX(C);
    bool degenerate = false;
    for (std::size_t c = 0; c < C; ++c) {
        const auto h = update_qtilde_H(s, p, c);
        qH[c] = h.value;
        degenerate = degenerate || h.degenerate;
        for (std::size_t t = 0; t < kPhases; ++t) {
            const auto x = update_qtilde_X(s, p, c, t);
            qX[c][t] = x.value;
            // Only phases that carry symbols can make the state degenerate.
            degenerate = degenerate || (x.degenerate && s.beta_t[t] > 0.0);
        }
    }
    p.qtilde_H = std::move(qH);
    p.qtilde_X = std::move(qX);
    p.degenerate = degenerate;
    return p;
}

OrderParams update_mse(const Scenario& s, const OrderParams& p, const QuadratureOptions& quad) {
    OrderParams next = p;
    for (std::size_t c = 0; c < s.cells(); ++c) {
        if (!p.pinned_H[c]) next.mse_H[c] = scalar_mmse(s.channel_prior(c), p.qtilde_H[c], quad);
        for (std::size_t t = 0; t < kPhases; ++t) {
            if (p.pinned_X[c][t]) continue;
            next.mse_X[c][t] = scalar_mmse(s.priors[c][t], p.qtilde_X[c][t], quad);
        }
    }
    return refresh_qtilde(s, std::move(next));
}

OrderParams ignorance_state(const Scenario& s) {
    OrderParams p = OrderParams::zeros(s.cells());
    for (std::size_t c = 0; c < s.cells(); ++c) {
        p.mse_H[c] = s.channel_power(c);
        for (std::size_t t = 0; t < kPhases; ++t)
            p.mse_X[c][t] = s.priors[c][t].is_known() ? 0.0 : s.symbol_power(c, t);
    }
    return p;
}

double free_entropy(const Scenario& s, const OrderParams& p, const QuadratureOptions& quad) {
    if (!(s.sigma2 > 0.0)) throw std::domain_error("free entropy is not defined for sigma2 = 0");
    double phi = 0.0;
    for (std::size_t t = 0; t < kPhases; ++t) {
        if (s.beta_t[t] == 0.0) continue;
        double load = 0.0;
        for (std::size_t c = 0; c < s.cells(); ++c) load += s.k[c] * delta(s, p, c, t);
        phi -= s.alpha * s.beta_t[t] * std::log1p(load / s.sigma2);
    }
    phi -= s.alpha * s.beta();
    for (std::size_t c = 0; c < s.cells(); ++c) {
        if (!p.pinned_H[c]) {
            const double qH = p.qtilde_H[c];
            phi += s.alpha * s.k[c] * (p.mse_H[c] * qH - scalar_mi(s.channel_prior(c), qH, quad));
        }
        for (std::size_t t = 0; t < kPhases; ++t) {
            if (s.beta_t[t] == 0.0 || p.pinned_X[c][t] || s.priors[c][t].is_known()) continue;
            const double qX = p.qtilde_X[c][t];
            phi += s.beta_t[t] * s.k[c] * (p.mse_X[c][t] * qX - scalar_mi(s.priors[c][t], qX, quad));
        }
    }
    return phi;
}

OrderParams pin(const Scenario& s, OrderParams p, std::span<const Pin> assignments) {
    for (const auto& a : assignments) {
        if (a.cell >= s.cells() || a.cell >= p.cells() || (a.field == PinField::SymbolMse && a.phase >= kPhases))
            throw std::domain_error("pin " + format_pin(a) + " references a cell or phase that does not exist");
        const double cap = a.field == PinField::ChannelMse ? s.channel_power(a.cell) : s.symbol_power(a.cell, a.phase);
        const double value = a.value.value_or(cap);
        if (!(value >= 0.0 && value <= cap))
            throw std::domain_error("pin " + format_pin(a) + " outside [0, " + std::to_string(cap) + "]");
        if (a.field == PinField::ChannelMse) {
            p.mse_H[a.cell] = value;
            p.pinned_H[a.cell] = true;
        } else {
            p.mse_X[a.cell][a.phase] = value;
            p.pinned_X[a.cell][a.phase] = true;
        }
    }
    return p;
}

}  // namespace rsmimo
