#include "oracles.hpp"
#include "rsmimo/presets.hpp"
#include "rsmimo/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace rsmimo;

namespace {

OrderParams selected_params(const Scenario& s) {
    const auto r = solve(s, {});
    return r[select_fixed_point(s, r).index].params;
}

constexpr double kAgree = 1e-8;

}  // namespace

TEST_CASE("pinning the channel reproduces perfect csi") {
    for (double alpha : {0.5, 2.0, 8.0}) {
        SingleCellParams p;
        p.alpha = alpha;
        auto jcd = example2_jcd(p);
        jcd.pins.push_back(parse_pin("mseH:0=0"));
        const auto perfect = example1_perfect_csi(alpha, p.sigma2, p.G, Prior::gaussian(1.0));
        CHECK(std::abs(selected_params(jcd).mse_X[0][1] - selected_params(perfect).mse_X[0][1]) < kAgree);
    }
}

TEST_CASE("pilot-only channel stage is joint estimation without data") {
    SingleCellParams p;
    p.beta1 = 2.0;
    p.sigma2 = 0.5;
    const auto r = example2_pilot_only(p);
    // q = 2/(0.5 + m), m = 1/(1 + q)  ->  m^2 + 1.5 m - 0.5 = 0.
    CHECK(r.mse_H == doctest::Approx((-1.5 + std::sqrt(4.25)) / 2.0).epsilon(1e-9));
    CHECK(r.channel_stage.beta_t[kDataPhase] == 0.0);
    CHECK(r.data_stage.pins.size() == 1);
}

TEST_CASE("an empty interfering cell is the single-cell joint problem") {
    TwoCellParams tp;
    tp.k1 = 1.0;
    tp.k2 = 0.0;
    tp.alpha = 3.0;
    SingleCellParams sp;
    sp.alpha = 3.0;
    sp.beta1 = tp.beta1;
    sp.beta2 = tp.beta2;
    const auto two = selected_params(example3_two_cell(tp));
    const auto one = selected_params(example2_jcd(sp));
    CHECK(std::abs(two.mse_H[0] - one.mse_H[0]) < kAgree);
    CHECK(std::abs(two.mse_X[0][1] - one.mse_X[0][1]) < kAgree);
}

TEST_CASE("a silent interferer rescales the single-cell problem by the load") {
    // With G2 = 0 the target sees sigma2 + k1 Delta_1, i.e. the single cell at
    // alpha / k1, beta_t / k1, sigma2 / k1.
    for (double alpha : {1.0, 4.0}) {
        TwoCellParams tp;
        tp.alpha = alpha;
        tp.G2 = 0.0;
        SingleCellParams sp;
        sp.alpha = alpha / tp.k1;
        sp.beta1 = tp.beta1 / tp.k1;
        sp.beta2 = tp.beta2 / tp.k1;
        sp.sigma2 = tp.sigma2 / tp.k1;
        const auto two = selected_params(example3_two_cell(tp));
        const auto conv = selected_params(conventional_jcd_two_cell(tp));
        const auto one = selected_params(example2_jcd(sp));
        CHECK(std::abs(two.mse_X[0][1] - one.mse_X[0][1]) < kAgree);
        CHECK(std::abs(two.mse_H[0] - one.mse_H[0]) < kAgree);
        CHECK(std::abs(conv.mse_X[0][1] - one.mse_X[0][1]) < kAgree);
    }
}

TEST_CASE("treating the interferer as noise never beats the joint estimator") {
    for (double g2 : {0.1, 1.0}) {
        for (double alpha : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
            TwoCellParams tp;
            tp.alpha = alpha;
            tp.G2 = g2;
            const auto bayes = selected_params(example3_two_cell(tp));
            const auto conv = selected_params(conventional_jcd_two_cell(tp));
            CAPTURE(alpha);
            CAPTURE(g2);
            CHECK(bayes.mse_X[0][1] <= conv.mse_X[0][1] + 1e-9);
            // The conventional receiver keeps the interferer at total ignorance.
            CHECK(conv.mse_H[1] == g2);
            CHECK(conv.mse_X[1][0] == 1.0);
            CHECK(conv.mse_X[1][1] == 1.0);
        }
    }
}

TEST_CASE("presets carry their documented parameters") {
    const auto q = preset("qpsk-jcd");
    CHECK(q.beta() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(q.beta_t[0] == 1e-4);
    CHECK(q.priors[0][1] == Prior::qpsk(1.0));
    const auto e3 = preset("example3");
    CHECK(e3.G[1] == 0.1);
    CHECK(e3.k[0] == 0.5);
    CHECK_FALSE(e3.priors[1][0].is_known());
    const auto e1 = preset("example1");
    CHECK(e1.beta_t[0] == 0.0);
    CHECK(e1.pins.size() == 1);
}

TEST_CASE("warnings flag negligible pilots and the noiseless ranking") {
    auto s = preset("example2-jcd");
    CHECK(scenario_warnings(s).empty());
    s.beta_t[0] = 1e-8;
    CHECK(scenario_warnings(s).size() == 1);
    s.sigma2 = 0.0;
    CHECK(scenario_warnings(s).size() == 2);
}
