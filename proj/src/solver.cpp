#include "rsmimo/solver.hpp"

#include "rsmimo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsmimo {
namespace {

// Below this residual interference a sigma2 = 0 state is the noiseless perfect-recovery limit.
constexpr double kDegenerateInterference = 1e-8;

bool is_free_X(const Scenario& s, const OrderParams& p, std::size_t c, std::size_t t) {
    return !p.pinned_X[c][t] && !s.priors[c][t].is_known();
}

double max_change(const Scenario& s, const OrderParams& a, const OrderParams& b) {
    double worst = 0.0;
    for (std::size_t c = 0; c < s.cells(); ++c) {
        if (!a.pinned_H[c]) worst = std::max(worst, std::abs(a.mse_H[c] - b.mse_H[c]));
        for (std::size_t t = 0; t < kPhases; ++t)
            if (is_free_X(s, a, c, t)) worst = std::max(worst, std::abs(a.mse_X[c][t] - b.mse_X[c][t]));
    }
    // NaN never compares greater, so propagate it explicitly.
    for (std::size_t c = 0; c < s.cells(); ++c)
        if (std::isnan(b.mse_H[c]) || std::isnan(b.mse_X[c][0]) || std::isnan(b.mse_X[c][1]))
            return std::numeric_limits<double>::quiet_NaN();
    return worst;
}

bool is_degenerate(const Scenario& s, const OrderParams& p) {
    if (s.sigma2 > 0.0) return false;
    if (p.degenerate) return true;
    for (std::size_t t = 0; t < kPhases; ++t)
        if (s.beta_t[t] > 0.0 && interference_plus_noise(s, p, t) <= kDegenerateInterference) return true;
    return false;
}

bool same_state(const OrderParams& a, const OrderParams& b, double tol) {
    for (std::size_t c = 0; c < a.cells(); ++c) {
        if (std::abs(a.mse_H[c] - b.mse_H[c]) > tol) return false;
        for (std::size_t t = 0; t < kPhases; ++t)
            if (std::abs(a.mse_X[c][t] - b.mse_X[c][t]) > tol) return false;
    }
    return true;
}

void check_grid(std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
    if (grid.size() < 2) return;
    const bool up = grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const bool ok = up ? grid[i] > grid[i - 1] : grid[i] < grid[i - 1];
        if (!ok) throw std::invalid_argument("sweep grid must be strictly monotone");
    }
}

}  // namespace

void SolverConfig::validate() const {
    if (!(damping >= 0.0 && damping < 1.0))
        throw std::invalid_argument("damping must be in [0, 1), got " + std::to_string(damping));
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (inits.empty()) throw std::invalid_argument("at least one initialization is required");
    for (const auto& init : inits)
        if (init.kind == InitKind::Custom && !init.params)
            throw std::invalid_argument("custom initialization '" + init.label + "' has no state");
    if (quadrature.hermite_nodes < 1 || quadrature.discrete_nodes < 1)
        throw std::invalid_argument("quadrature node counts must be >= 1");
}

OrderParams initial_state(const Scenario& s, const Initialization& init) {
    OrderParams p = ignorance_state(s);
    switch (init.kind) {
        case InitKind::Ignorance:
            break;
        case InitKind::Oracle:
            for (std::size_t c = 0; c < s.cells(); ++c) {
                p.mse_H[c] = std::min(kOracleNudge, s.channel_power(c));
                for (std::size_t t = 0; t < kPhases; ++t)
                    if (!s.priors[c][t].is_known()) p.mse_X[c][t] = std::min(kOracleNudge, s.symbol_power(c, t));
            }
            break;
        case InitKind::Custom: {
            const auto& src = *init.params;
            if (src.cells() != s.cells())
                throw std::invalid_argument("custom initialization has " + std::to_string(src.cells()) +
                                            " cells, scenario has " + std::to_string(s.cells()));
            for (std::size_t c = 0; c < s.cells(); ++c) {
                p.mse_H[c] = std::clamp(src.mse_H[c], 0.0, s.channel_power(c));
                for (std::size_t t = 0; t < kPhases; ++t)
                    if (!s.priors[c][t].is_known())
                        p.mse_X[c][t] = std::clamp(src.mse_X[c][t], 0.0, s.symbol_power(c, t));
            }
            break;
        }
    }
    return p;
}

FixedPointResult iterate(const Scenario& s, const OrderParams& start, const SolverConfig& config, std::string label) {
    OrderParams cleared = start;
    cleared.pinned_H.assign(s.cells(), false);
    cleared.pinned_X.assign(s.cells(), {false, false});
    OrderParams state = refresh_qtilde(s, pin(s, std::move(cleared), s.pins));

    FixedPointResult result;
    result.init_label = std::move(label);
    result.residual = std::numeric_limits<double>::infinity();

    const double d = config.damping;
    for (int it = 1; it <= config.max_iter; ++it) {
        OrderParams proposed = update_mse(s, state, config.quadrature);
        const double change = max_change(s, state, proposed);
        result.iterations = it;
        result.residual = change;
        if (std::isnan(change)) break;
        if (change <= config.tol) {
            result.converged = true;
            break;
        }
        if (d == 0.0) {
            state = std::move(proposed);
            continue;
        }
        for (std::size_t c = 0; c < s.cells(); ++c) {
            if (!state.pinned_H[c]) state.mse_H[c] = (1.0 - d) * proposed.mse_H[c] + d * state.mse_H[c];
            for (std::size_t t = 0; t < kPhases; ++t)
                if (is_free_X(s, state, c, t))
                    state.mse_X[c][t] = (1.0 - d) * proposed.mse_X[c][t] + d * state.mse_X[c][t];
        }
        state = refresh_qtilde(s, std::move(state));
    }

    result.degenerate = is_degenerate(s, state);
    if (s.sigma2 > 0.0) result.phi = free_entropy(s, state, config.quadrature);
    result.params = std::move(state);
    return result;
}

std::vector<FixedPointResult> solve(const Scenario& s, const SolverConfig& config) {
    config.validate();
    validate(s);
    std::vector<FixedPointResult> out;
    for (const auto& init : config.inits) {
        FixedPointResult r = iterate(s, initial_state(s, init), config, init.label);
        if (r.converged) {
            auto dup = std::find_if(out.begin(), out.end(), [&](const FixedPointResult& o) {
                return o.converged && same_state(o.params, r.params, 10.0 * config.tol);
            });
            if (dup != out.end()) {
                dup->init_label += "+" + r.init_label;
                continue;
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

double total_mse(const Scenario& s, const OrderParams& p) {
    double sum = 0.0;
    for (std::size_t c = 0; c < s.cells(); ++c) {
        if (!p.pinned_H[c]) sum += p.mse_H[c];
        for (std::size_t t = 0; t < kPhases; ++t)
            if (is_free_X(s, p, c, t)) sum += p.mse_X[c][t];
    }
    return sum;
}

Selection select_fixed_point(const Scenario& s, std::span<const FixedPointResult> results) {
    if (results.empty()) throw std::invalid_argument("no fixed points to select from");
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < results.size(); ++i)
        if (results[i].converged) pool.push_back(i);
    Selection sel;
    sel.multiple = pool.size() > 1;
    if (pool.empty())
        for (std::size_t i = 0; i < results.size(); ++i) pool.push_back(i);

    if (s.sigma2 > 0.0) {
        sel.by_free_entropy = true;
        sel.index = *std::max_element(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
            return results[a].phi.value_or(-INFINITY) < results[b].phi.value_or(-INFINITY);
        });
        return sel;
    }

    sel.by_free_entropy = false;
    std::vector<std::size_t> proper;
    for (auto i : pool)
        if (!results[i].degenerate) proper.push_back(i);
    const auto& candidates = proper.empty() ? pool : proper;
    sel.index = *std::min_element(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        return total_mse(s, results[a].params) < total_mse(s, results[b].params);
    });
    return sel;
}

std::vector<SweepPoint> sweep(const Scenario& base, std::string_view axis, std::span<const double> grid,
                              const SolverConfig& config, const SweepOptions& options) {
    check_grid(grid);
    config.validate();
    std::vector<SweepPoint> out(grid.size());

    auto scenario_at = [&](double value) {
        Scenario s = base;
        set_parameter(s, axis, value);
        validate(s);
        return s;
    };

    if (!options.warm_start) {
        parallel_for(grid.size(), options.threads, [&](std::size_t i) {
            const Scenario s = scenario_at(grid[i]);
            out[i].value = grid[i];
            out[i].points = solve(s, config);
            out[i].selection = select_fixed_point(s, out[i].points);
        });
        return out;
    }

    std::optional<OrderParams> previous;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Scenario s = scenario_at(grid[i]);
        SolverConfig local = config;
        if (previous) local.inits.push_back(Initialization::custom(*previous, "warm"));
        out[i].value = grid[i];
        out[i].points = solve(s, local);
        out[i].selection = select_fixed_point(s, out[i].points);
        previous = out[i].selected().params;
    }
    return out;
}

TransitionReport locate_transition(const Scenario& base, std::string_view axis, double low, double high,
                                   const SolverConfig& config, const TransitionOptions& options) {
    if (!(low <= high))
        throw std::invalid_argument("transition bracket is reversed: [" + std::to_string(low) + ", " +
                                    std::to_string(high) + "]");
    if (!(options.width_target > 0.0)) throw std::invalid_argument("width target must be > 0");

    TransitionReport report;
    report.axis = std::string(axis);
    report.low = low;
    report.high = high;

    auto observe = [&](double value) {
        Scenario s = base;
        set_parameter(s, axis, value);
        const auto points = solve(s, config);
        const auto sel = select_fixed_point(s, points);
        ++report.evaluations;
        return points[sel.index].params.mse_X.at(options.cell).at(options.phase);
    };

    report.mse_low = observe(low);
    if (low == high) {
        report.mse_high = report.mse_low;
        return report;
    }
    report.mse_high = observe(high);
    report.jump_size = std::abs(report.mse_high - report.mse_low);
    report.resolved_to = high - low;
    if (report.jump_size <= options.jump_threshold) return report;

    // Coarse scan first: a steep but continuous stretch can outweigh the jump over a wide
    // bracket, so bisection starts from the grid interval with the largest change.
    if (options.scan_intervals > 1) {
        const std::size_t n = options.scan_intervals;
        std::vector<double> xs(n + 1), ms(n + 1);
        xs.front() = low;
        xs.back() = high;
        ms.front() = report.mse_low;
        ms.back() = report.mse_high;
        for (std::size_t i = 1; i < n; ++i) {
            xs[i] = low + (high - low) * static_cast<double>(i) / static_cast<double>(n);
            ms[i] = observe(xs[i]);
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(ms[i + 1] - ms[i]) > std::abs(ms[best + 1] - ms[best])) best = i;
        report.low = xs[best];
        report.high = xs[best + 1];
        report.mse_low = ms[best];
        report.mse_high = ms[best + 1];
    }

    while (report.high - report.low > options.width_target) {
        const double mid = 0.5 * (report.low + report.high);
        const double m = observe(mid);
        if (std::abs(m - report.mse_low) >= std::abs(report.mse_high - m)) {
            report.high = mid;
            report.mse_high = m;
        } else {
            report.low = mid;
            report.mse_low = m;
        }
    }
    report.jump_size = std::abs(report.mse_high - report.mse_low);
    report.resolved_to = report.high - report.low;
    report.found = report.jump_size > options.jump_threshold;
    return report;
}

}  // namespace rsmimo
