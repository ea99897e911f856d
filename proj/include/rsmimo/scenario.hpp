#pragma once

#include "rsmimo/priors.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rsmimo {

/// Phase index: 0 is the training (pilot) phase, 1 the data phase.
inline constexpr std::size_t kTrainingPhase = 0;
inline constexpr std::size_t kDataPhase = 1;
inline constexpr std::size_t kPhases = 2;

enum class PinField { ChannelMse, SymbolMse };

/// Freezes one mse entry. An empty value means "at the prior second moment",
/// i.e. the entry is never estimated and stays at total ignorance.
struct Pin {
    PinField field = PinField::ChannelMse;
    std::size_t cell = 0;
    std::size_t phase = 0;  // ignored for ChannelMse
    std::optional<double> value;

    bool operator==(const Pin&) const = default;
};

/// Parses "mseH:<c>=<v>" or "mseX:<c>:<t>=<v>"; <v> may be "prior".
Pin parse_pin(std::string_view text);
std::string format_pin(const Pin& pin);

/// Large-system parameterization: all sizes enter through ratios to the total user count K.
struct Scenario {
    std::vector<double> k;                   // K_c / K, sums to 1
    double alpha = 1.0;                      // N / K
    std::array<double, kPhases> beta_t{};    // T_t / K
    double sigma2 = 1.0;                     // noise variance
    std::vector<double> G;                   // large-scale fading per cell
    std::vector<std::array<Prior, kPhases>> priors;  // symbol priors per (cell, phase)
    std::vector<Pin> pins;

    std::size_t cells() const { return G.size(); }
    double beta() const { return beta_t[0] + beta_t[1]; }
    double channel_power(std::size_t c) const { return G.at(c); }
    double symbol_power(std::size_t c, std::size_t t) const { return second_moment(priors.at(c).at(t)); }
    Prior channel_prior(std::size_t c) const { return Prior::gaussian(G.at(c)); }
};

/// Throws std::invalid_argument naming the offending field and value.
void validate(const Scenario& s);

/// Sets a scalar parameter by dotted path: alpha, beta, beta1, beta2, sigma2,
/// G.<c>, k.<c>, Gamma.<t>. Setting beta keeps beta1 and moves beta2.
/// Gamma.<t> rescales every prior of phase t. Does not re-validate.
void set_parameter(Scenario& s, std::string_view path, double value);
double get_parameter(const Scenario& s, std::string_view path);

}  // namespace rsmimo
