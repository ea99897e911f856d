#include "rsmimo/presets.hpp"

#include <stdexcept>

namespace rsmimo {

Scenario example1_perfect_csi(double alpha, double sigma2, double G, const Prior& data_prior, double beta) {
    Scenario s;
    s.k = {1.0};
    s.alpha = alpha;
    s.beta_t = {0.0, beta};
    s.sigma2 = sigma2;
    s.G = {G};
    const double gamma = second_moment(data_prior);
    s.priors = {{Prior::known(gamma), data_prior}};
    s.pins = {Pin{PinField::ChannelMse, 0, 0, 0.0}};
    validate(s);
    return s;
}

Scenario example2_jcd(const SingleCellParams& p) {
    Scenario s;
    s.k = {1.0};
    s.alpha = p.alpha;
    s.beta_t = {p.beta1, p.beta2};
    s.sigma2 = p.sigma2;
    s.G = {p.G};
    s.priors = {{Prior::known(p.Gamma1), p.data_prior.with_power(p.Gamma2)}};
    validate(s);
    return s;
}

PilotOnlyResult example2_pilot_only(const SingleCellParams& p, const SolverConfig& config) {
    if (!(p.beta1 > 0.0)) throw std::invalid_argument("pilot-only estimation needs beta1 > 0");
    PilotOnlyResult out;

    out.channel_stage = example2_jcd(p);
    out.channel_stage.beta_t[kDataPhase] = 0.0;
    validate(out.channel_stage);
    {
        const auto points = solve(out.channel_stage, config);
        out.channel = points[select_fixed_point(out.channel_stage, points).index];
    }
    out.mse_H = out.channel.params.mse_H[0];

    out.data_stage = example2_jcd(p);
    out.data_stage.pins = {Pin{PinField::ChannelMse, 0, 0, out.mse_H}};
    {
        const auto points = solve(out.data_stage, config);
        out.data = points[select_fixed_point(out.data_stage, points).index];
    }
    out.mse_X2 = out.data.params.mse_X[0][kDataPhase];
    return out;
}

Scenario example3_two_cell(const TwoCellParams& p) {
    Scenario s;
    s.k = {p.k1, p.k2};
    s.alpha = p.alpha;
    s.beta_t = {p.beta1, p.beta2};
    s.sigma2 = p.sigma2;
    s.G = {p.G1, p.G2};
    s.priors = {
        {Prior::known(p.Gamma1), p.target_prior.with_power(p.Gamma2)},
        {p.interferer_prior.with_power(p.Gamma1), p.interferer_prior.with_power(p.Gamma2)},
    };
    validate(s);
    return s;
}

Scenario conventional_jcd_two_cell(const TwoCellParams& p) {
    Scenario s = example3_two_cell(p);
    s.pins = {
        Pin{PinField::ChannelMse, 1, 0, std::nullopt},
        Pin{PinField::SymbolMse, 1, kTrainingPhase, std::nullopt},
        Pin{PinField::SymbolMse, 1, kDataPhase, std::nullopt},
    };
    validate(s);
    return s;
}

Scenario qpsk_negligible_pilot(double alpha, double sigma2) {
    SingleCellParams p;
    p.alpha = alpha;
    p.beta1 = 1e-4;
    p.beta2 = 2.0 - 1e-4;
    p.sigma2 = sigma2;
    p.data_prior = Prior::qpsk(1.0);
    return example2_jcd(p);
}

Scenario preset(std::string_view name) {
    if (name == "example1") return example1_perfect_csi(1.0, 1.0, 1.0, Prior::gaussian(1.0));
    if (name == "example2-pilot") {
        Scenario s = example2_jcd(SingleCellParams{});
        s.beta_t[kDataPhase] = 0.0;
        return s;
    }
    if (name == "example2-jcd") return example2_jcd(SingleCellParams{});
    if (name == "example3") return example3_two_cell(TwoCellParams{});
    if (name == "conventional-jcd") return conventional_jcd_two_cell(TwoCellParams{});
    if (name == "qpsk-jcd") return qpsk_negligible_pilot(1.0, 0.1);
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
    return {"example1", "example2-pilot", "example2-jcd", "example3", "conventional-jcd", "qpsk-jcd"};
}

std::vector<std::string> scenario_warnings(const Scenario& s) {
    std::vector<std::string> out;
    const double b1 = s.beta_t[kTrainingPhase];
    if (b1 > 0.0 && b1 < kNegligiblePilotFloor)
        out.push_back("beta1 = " + std::to_string(b1) +
                      " is below the negligible-pilot floor; pilot-based ambiguity removal is not modeled");
    if (s.sigma2 == 0.0)
        out.push_back("sigma2 = 0: free entropy undefined, fixed points ranked by smallest total mse");
    return out;
}

}  // namespace rsmimo
