#pragma once

#include "rsmimo/priors.hpp"
#include "rsmimo/replica.hpp"
#include "rsmimo/scenario.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rsmimo {

enum class InitKind { Ignorance, Oracle, Custom };

struct Initialization {
    InitKind kind = InitKind::Ignorance;
    std::string label = "ignorance";
    std::optional<OrderParams> params;  // Custom only; only the mse fields are used

    static Initialization ignorance() { return {InitKind::Ignorance, "ignorance", std::nullopt}; }
    static Initialization oracle() { return {InitKind::Oracle, "oracle", std::nullopt}; }
    static Initialization custom(OrderParams p, std::string label = "custom") {
        return {InitKind::Custom, std::move(label), std::move(p)};
    }
};

/// Starting value for "oracle" entries; exactly zero would make the sigma2 = 0 denominators vanish.
inline constexpr double kOracleNudge = 1e-12;

struct SolverConfig {
    double damping = 0.0;  // new = (1 - d) * proposed + d * previous, on mse fields
    double tol = 1e-10;    // max |undamped change| over free mse entries
    int max_iter = 10000;
    std::vector<Initialization> inits{Initialization::ignorance(), Initialization::oracle()};
    QuadratureOptions quadrature{};

    /// Throws std::invalid_argument.
    void validate() const;
};

struct FixedPointResult {
    OrderParams params;
    int iterations = 0;
    double residual = 0.0;
    std::optional<double> phi;  // absent when sigma2 = 0
    bool converged = false;
    std::string init_label;
    /// sigma2 = 0 and the residual interference collapsed: the noiseless perfect-recovery limit.
    bool degenerate = false;
};

/// Runs the damped Jacobi iteration from one starting state (pins are re-applied).
FixedPointResult iterate(const Scenario& s, const OrderParams& start, const SolverConfig& config,
                         std::string label);

/// Starting state for one initialization.
OrderParams initial_state(const Scenario& s, const Initialization& init);

/// One result per initialization, converged duplicates (mse within 10 * tol) merged with
/// their labels joined by '+'. Non-convergence is reported through the flag, not thrown.
std::vector<FixedPointResult> solve(const Scenario& s, const SolverConfig& config);

struct Selection {
    std::size_t index = 0;
    bool by_free_entropy = true;  // false: smallest total mse (sigma2 = 0)
    bool multiple = false;        // more than one distinct converged fixed point
};

/// Largest free entropy among converged results (all results when none converged). For
/// sigma2 = 0 the smallest total free mse wins, and degenerate noiseless limits are only
/// chosen when no proper fixed point exists.
Selection select_fixed_point(const Scenario& s, std::span<const FixedPointResult> results);

/// Sum of the free (unpinned, unknown) mse entries.
double total_mse(const Scenario& s, const OrderParams& p);

struct SweepPoint {
    double value = 0.0;
    std::vector<FixedPointResult> points;
    Selection selection;

    const FixedPointResult& selected() const { return points.at(selection.index); }
};

struct SweepOptions {
    bool warm_start = false;  // seed each point with the previous selection, plus the standard inits
    int threads = 0;          // 0: RSMIMO_THREADS or hardware concurrency; ignored with warm_start
};

/// Solves at every grid value of one parameter. The grid must be non-empty and strictly monotone.
std::vector<SweepPoint> sweep(const Scenario& base, std::string_view axis, std::span<const double> grid,
                              const SolverConfig& config, const SweepOptions& options = {});

struct TransitionOptions {
    double jump_threshold = 0.1;
    double width_target = 1e-4;
    std::size_t scan_intervals = 32;  // uniform pre-scan before bisection; <= 1 disables it
    std::size_t cell = 0;           // observable: selected mse_X[cell][phase]
    std::size_t phase = kDataPhase;
};

struct TransitionReport {
    std::string axis;
    bool found = false;
    double low = 0.0;
    double high = 0.0;
    double mse_low = 0.0;
    double mse_high = 0.0;
    double jump_size = 0.0;
    double resolved_to = 0.0;  // final bracket width
    int evaluations = 0;
};

/// Uniform pre-scan, then bisection on the selected mse inside the scan interval with the
/// largest change, keeping the half with the larger change. A jump is reported
/// only if the change across the final bracket still exceeds the threshold. Throws
/// std::invalid_argument if low > high.
TransitionReport locate_transition(const Scenario& base, std::string_view axis, double low, double high,
                                   const SolverConfig& config, const TransitionOptions& options = {});

}  // namespace rsmimo
