#include "rsmimo/scenario.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rsmimo {
namespace {

std::size_t parse_index(std::string_view text, std::string_view context) {
    std::size_t idx = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, idx);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw std::invalid_argument("bad index '" + std::string(text) + "' in '" + std::string(context) + "'");
    return idx;
}

double parse_double(std::string_view text, std::string_view context) {
    std::string buf(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(buf, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != buf.size() || buf.empty())
        throw std::invalid_argument("bad number '" + buf + "' in '" + std::string(context) + "'");
    return v;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

Pin parse_pin(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
        throw std::invalid_argument("pin '" + std::string(text) + "' must look like mseH:<c>=<v> or mseX:<c>:<t>=<v>");
    const auto lhs = text.substr(0, eq);
    const auto rhs = text.substr(eq + 1);

    Pin pin;
    if (rhs != "prior") pin.value = parse_double(rhs, text);

    const auto colon = lhs.find(':');
    const auto field = lhs.substr(0, colon);
    if (colon == std::string_view::npos) throw std::invalid_argument("pin '" + std::string(text) + "' has no cell index");
    const auto rest = lhs.substr(colon + 1);
    if (field == "mseH") {
        pin.field = PinField::ChannelMse;
        pin.cell = parse_index(rest, text);
    } else if (field == "mseX") {
        pin.field = PinField::SymbolMse;
        const auto c2 = rest.find(':');
        if (c2 == std::string_view::npos)
            throw std::invalid_argument("pin '" + std::string(text) + "' needs mseX:<cell>:<phase>");
        pin.cell = parse_index(rest.substr(0, c2), text);
        pin.phase = parse_index(rest.substr(c2 + 1), text);
    } else {
        throw std::invalid_argument("pin '" + std::string(text) + "': unknown field '" + std::string(field) +
                                    "' (expected mseH or mseX)");
    }
    return pin;
}

std::string format_pin(const Pin& pin) {
    std::string out = pin.field == PinField::ChannelMse
                          ? "mseH:" + std::to_string(pin.cell)
                          : "mseX:" + std::to_string(pin.cell) + ":" + std::to_string(pin.phase);
    return out + "=" + (pin.value ? num(*pin.value) : std::string("prior"));
}

void validate(const Scenario& s) {
    const std::size_t C = s.cells();
    require(C >= 1, "scenario needs at least one cell");
    require(s.k.size() == C, "k has " + std::to_string(s.k.size()) + " entries but there are " + std::to_string(C) +
                                 " cells");
    require(s.priors.size() == C, "priors has " + std::to_string(s.priors.size()) + " entries but there are " +
                                      std::to_string(C) + " cells");
    double ksum = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        require(std::isfinite(s.k[c]) && s.k[c] >= 0.0, "k." + std::to_string(c) + " = " + num(s.k[c]) + " must be >= 0");
        ksum += s.k[c];
        require(std::isfinite(s.G[c]) && s.G[c] >= 0.0, "G." + std::to_string(c) + " = " + num(s.G[c]) + " must be >= 0");
    }
    require(std::abs(ksum - 1.0) <= 1e-12, "k must sum to 1, sums to " + num(ksum));
    require(std::isfinite(s.alpha) && s.alpha > 0.0, "alpha = " + num(s.alpha) + " must be > 0");
    require(std::isfinite(s.beta_t[0]) && s.beta_t[0] >= 0.0, "beta1 = " + num(s.beta_t[0]) + " must be >= 0");
    require(std::isfinite(s.beta_t[1]) && s.beta_t[1] >= 0.0, "beta2 = " + num(s.beta_t[1]) + " must be >= 0");
    require(s.beta() > 0.0, "beta = beta1 + beta2 must be > 0");
    require(std::isfinite(s.sigma2) && s.sigma2 >= 0.0, "sigma2 = " + num(s.sigma2) + " must be >= 0");

    for (const auto& pin : s.pins) {
        require(pin.cell < C, "pin " + format_pin(pin) + " references cell " + std::to_string(pin.cell) +
                                  " but there are " + std::to_string(C) + " cells");
        if (pin.field == PinField::SymbolMse)
            require(pin.phase < kPhases, "pin " + format_pin(pin) + " references phase " + std::to_string(pin.phase));
        if (pin.value) {
            const double cap = pin.field == PinField::ChannelMse ? s.G[pin.cell]
                                                                 : s.symbol_power(pin.cell, pin.phase);
            require(*pin.value >= 0.0 && *pin.value <= cap,
                    "pin " + format_pin(pin) + " outside [0, " + num(cap) + "]");
        }
    }
}

void set_parameter(Scenario& s, std::string_view path, double value) {
    const auto dot = path.find('.');
    const auto head = path.substr(0, dot);
    if (dot == std::string_view::npos) {
        if (head == "alpha") {
            s.alpha = value;
        } else if (head == "beta") {
            s.beta_t[1] = value - s.beta_t[0];
        } else if (head == "beta1") {
            s.beta_t[0] = value;
        } else if (head == "beta2") {
            s.beta_t[1] = value;
        } else if (head == "sigma2") {
            s.sigma2 = value;
        } else {
            throw std::invalid_argument("unknown parameter '" + std::string(path) + "'");
        }
        return;
    }
    const std::size_t idx = parse_index(path.substr(dot + 1), path);
    if (head == "G") {
        if (idx >= s.G.size()) throw std::invalid_argument("parameter '" + std::string(path) + "': no such cell");
        s.G[idx] = value;
    } else if (head == "k") {
        if (idx >= s.k.size()) throw std::invalid_argument("parameter '" + std::string(path) + "': no such cell");
        s.k[idx] = value;
    } else if (head == "Gamma") {
        if (idx >= kPhases) throw std::invalid_argument("parameter '" + std::string(path) + "': no such phase");
        for (auto& cell : s.priors) cell[idx] = cell[idx].with_power(value);
    } else {
        throw std::invalid_argument("unknown parameter '" + std::string(path) + "'");
    }
}

double get_parameter(const Scenario& s, std::string_view path) {
    if (path == "alpha") return s.alpha;
    if (path == "beta") return s.beta();
    if (path == "beta1") return s.beta_t[0];
    if (path == "beta2") return s.beta_t[1];
    if (path == "sigma2") return s.sigma2;
    const auto dot = path.find('.');
    if (dot == std::string_view::npos) throw std::invalid_argument("unknown parameter '" + std::string(path) + "'");
    const auto head = path.substr(0, dot);
    const std::size_t idx = parse_index(path.substr(dot + 1), path);
    if (head == "G" && idx < s.G.size()) return s.G[idx];
    if (head == "k" && idx < s.k.size()) return s.k[idx];
    if (head == "Gamma" && idx < kPhases && !s.priors.empty()) return s.symbol_power(0, idx);
    throw std::invalid_argument("unknown parameter '" + std::string(path) + "'");
}

}  // namespace rsmimo
