#include "oracles.hpp"
#include "rsmimo/presets.hpp"
#include "rsmimo/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace rsmimo;

namespace {

const FixedPointResult& selected(const Scenario& s, const std::vector<FixedPointResult>& r) {
    return r[select_fixed_point(s, r).index];
}

double max_mse_change(const OrderParams& a, const OrderParams& b) {
    double m = 0.0;
    for (std::size_t c = 0; c < a.cells(); ++c) {
        m = std::max(m, std::abs(a.mse_H[c] - b.mse_H[c]));
        for (std::size_t t = 0; t < kPhases; ++t) m = std::max(m, std::abs(a.mse_X[c][t] - b.mse_X[c][t]));
    }
    return m;
}

}  // namespace

TEST_CASE("perfect-csi closed forms") {
    const SolverConfig config;
    const auto s1 = example1_perfect_csi(1.0, 1.0, 1.0, Prior::gaussian(1.0));
    const auto r1 = solve(s1, config);
    CHECK(selected(s1, r1).converged);
    CHECK(std::abs(selected(s1, r1).params.mse_X[0][1] - oracle::golden_root()) <= 1e-9);

    // alpha = 4: m^2 + 4m - 1 = 0.
    const auto s4 = example1_perfect_csi(4.0, 1.0, 1.0, Prior::gaussian(1.0));
    CHECK(std::abs(selected(s4, solve(s4, config)).params.mse_X[0][1] - (std::sqrt(5.0) - 2.0)) <= 1e-9);
}

TEST_CASE("pilot-only channel estimate closed form") {
    const auto r = example2_pilot_only(SingleCellParams{});
    CHECK(r.channel.converged);
    CHECK(std::abs(r.mse_H - oracle::golden_root()) <= 1e-9);
    // The data stage sees the frozen channel error.
    CHECK(r.data.params.mse_H[0] == r.mse_H);
    CHECK(r.mse_X2 > 0.0);
    CHECK(r.mse_X2 < 1.0);
    SingleCellParams none;
    none.beta1 = 0.0;
    CHECK_THROWS_AS(example2_pilot_only(none), std::invalid_argument);
}

TEST_CASE("joint estimation beats pilot-only and trails perfect csi") {
    for (double alpha : {0.5, 1.0, 4.0, 16.0}) {
        SingleCellParams p;
        p.alpha = alpha;
        const auto jcd = example2_jcd(p);
        const double x_jcd = selected(jcd, solve(jcd, {})).params.mse_X[0][1];
        const double x_pilot = example2_pilot_only(p).mse_X2;
        const auto perfect = example1_perfect_csi(alpha, 1.0, 1.0, Prior::gaussian(1.0), 4.0);
        const double x_perfect = selected(perfect, solve(perfect, {})).params.mse_X[0][1];
        CAPTURE(alpha);
        CHECK(x_jcd <= x_pilot + 1e-12);
        CHECK(x_perfect <= x_jcd + 1e-12);
    }
}

TEST_CASE("channel error saturates while data error vanishes at large antenna ratios") {
    SingleCellParams p;
    p.alpha = 1e4;
    const auto s = example2_jcd(p);
    const auto results = solve(s, {});
    const auto& r = selected(s, results);
    CHECK(r.params.mse_X[0][1] < 1e-3);
    const double floor = oracle::jcd_channel_floor(1.0, 4.0, 1.0, 1.0, 1.0, 1.0);
    CHECK(floor == doctest::Approx((-5.0 + std::sqrt(29.0)) / 2.0).epsilon(1e-12));
    CHECK(std::abs(r.params.mse_H[0] - floor) < 1e-3);
}

TEST_CASE("converged results are fixed points of the undamped map") {
    for (const auto& name : preset_names()) {
        const auto s = preset(name);
        SolverConfig config;
        for (const auto& r : solve(s, config)) {
            if (!r.converged) continue;
            CAPTURE(name);
            const auto next = update_mse(s, r.params, config.quadrature);
            CHECK(max_mse_change(next, r.params) <= config.tol);
        }
    }
}

TEST_CASE("damping does not change the fixed point") {
    for (const auto& name : {"example1", "example2-jcd", "example3", "qpsk-jcd"}) {
        const auto s = preset(name);
        for (const auto& init : {Initialization::ignorance(), Initialization::oracle()}) {
            std::vector<OrderParams> found;
            for (double d : {0.0, 0.3, 0.7}) {
                SolverConfig config;
                config.damping = d;
                config.max_iter = 100000;
                config.inits = {init};
                const auto r = solve(s, config);
                REQUIRE(r.size() == 1);
                REQUIRE(r[0].converged);
                found.push_back(r[0].params);
            }
            CAPTURE(name);
            CHECK(max_mse_change(found[0], found[1]) <= 100 * SolverConfig{}.tol);
            CHECK(max_mse_change(found[0], found[2]) <= 100 * SolverConfig{}.tol);
        }
    }
}

TEST_CASE("pinned entries never move") {
    auto s = preset("example3");
    s.pins = {parse_pin("mseH:1=0.05"), parse_pin("mseX:1:1=0.4")};
    for (const auto& r : solve(s, {})) {
        CHECK(r.params.mse_H[1] == 0.05);
        CHECK(r.params.mse_X[1][1] == 0.4);
    }
    SolverConfig short_run;
    short_run.max_iter = 3;
    for (const auto& r : solve(s, short_run)) CHECK(r.params.mse_H[1] == 0.05);
}

TEST_CASE("non-convergence is reported, not thrown") {
    SolverConfig config;
    config.max_iter = 2;
    const auto r = solve(preset("example2-jcd"), config);
    REQUIRE_FALSE(r.empty());
    CHECK_FALSE(r[0].converged);
    CHECK(r[0].iterations == 2);
}

TEST_CASE("coinciding starts are merged") {
    const auto s = preset("example1");
    const auto r = solve(s, {});
    REQUIRE(r.size() == 1);
    CHECK(r[0].init_label == "ignorance+oracle");
}

TEST_CASE("bistable qpsk point selects the larger free entropy") {
    const auto s = qpsk_negligible_pilot(1.2, 0.1);
    const auto r = solve(s, {});
    REQUIRE(r.size() == 2);
    const auto sel = select_fixed_point(s, r);
    CHECK(sel.multiple);
    CHECK(sel.by_free_entropy);
    for (const auto& x : r) CHECK(*x.phi <= *r[sel.index].phi);
}

TEST_CASE("noiseless selection skips the degenerate perfect-recovery limit") {
    const auto s = qpsk_negligible_pilot(0.8, 0.0);
    const auto r = solve(s, {});
    const auto sel = select_fixed_point(s, r);
    CHECK_FALSE(sel.by_free_entropy);
    CHECK_FALSE(r[sel.index].degenerate);
    CHECK(r[sel.index].params.mse_X[0][1] > 0.1);
    bool any_degenerate = false;
    for (const auto& x : r) any_degenerate = any_degenerate || x.degenerate;
    CHECK(any_degenerate);
}

TEST_CASE("solver configuration is validated") {
    SolverConfig c;
    c.damping = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.tol = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.inits.clear();
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("perfect-csi mse decreases strictly along alpha") {
    const auto s = preset("example1");
    std::vector<double> grid;
    for (int i = 0; i < 30; ++i) grid.push_back(0.1 * std::pow(200.0, i / 29.0));
    const auto rows = sweep(s, "alpha", grid, {});
    REQUIRE(rows.size() == grid.size());
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].selected().params.mse_X[0][1] < rows[i - 1].selected().params.mse_X[0][1]);
    for (const auto& row : rows) {
        CHECK(row.selected().params.mse_X[0][1] >= 0.0);
        CHECK(row.selected().params.mse_X[0][1] <= 1.0);
    }
}

TEST_CASE("more data symbols never hurt channel estimation") {
    const auto s = preset("example2-jcd");
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(0.25 * (i + 1));
    const auto rows = sweep(s, "beta2", grid, {});
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i].selected().params.qtilde_H[0] >= rows[i - 1].selected().params.qtilde_H[0] - 1e-9);
}

TEST_CASE("sweep grid handling") {
    const auto s = preset("example1");
    const std::vector<double> single{2.0};
    const auto one = sweep(s, "alpha", single, {});
    REQUIRE(one.size() == 1);
    CHECK(one[0].value == 2.0);
    const std::vector<double> empty;
    CHECK_THROWS_AS(sweep(s, "alpha", empty, {}), std::invalid_argument);
    const std::vector<double> zigzag{1.0, 2.0, 1.5};
    CHECK_THROWS_AS(sweep(s, "alpha", zigzag, {}), std::invalid_argument);
    const std::vector<double> ok{1.0, 2.0};
    CHECK_THROWS(sweep(s, "nonsense", ok, {}));
}

TEST_CASE("warm starts agree with cold starts away from transitions") {
    const auto s = preset("example3");
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i) grid.push_back(0.5 + i);
    const auto cold = sweep(s, "alpha", grid, {}, SweepOptions{false, 2});
    const auto warm = sweep(s, "alpha", grid, {}, SweepOptions{true, 0});
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(max_mse_change(cold[i].selected().params, warm[i].selected().params) <= 100 * SolverConfig{}.tol);
}

TEST_CASE("qpsk transition is located and sharpened") {
    const auto s = qpsk_negligible_pilot(1.0, 0.1);
    const auto r = locate_transition(s, "alpha", 0.05, 4.0, {});
    CHECK(r.found);
    CHECK(r.jump_size > 0.1);
    CHECK(r.high - r.low <= 1e-4);
    CHECK(r.low > 0.05);
    CHECK(r.high < 4.0);
    CHECK(r.mse_low > r.mse_high);
}

TEST_CASE("gaussian control has no transition") {
    SingleCellParams p;
    p.beta1 = 1e-4;
    p.beta2 = 2.0 - 1e-4;
    p.sigma2 = 0.1;
    const auto r = locate_transition(example2_jcd(p), "alpha", 0.05, 4.0, {});
    CHECK_FALSE(r.found);
}

TEST_CASE("transition bracket edge cases") {
    const auto s = qpsk_negligible_pilot(1.0, 0.1);
    const auto same = locate_transition(s, "alpha", 1.3, 1.3, {});
    CHECK_FALSE(same.found);
    CHECK(same.jump_size == 0.0);
    CHECK_THROWS_AS(locate_transition(s, "alpha", 2.0, 1.0, {}), std::invalid_argument);
}
