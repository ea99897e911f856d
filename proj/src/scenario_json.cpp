#include "rsmimo/scenario_json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rsmimo {
namespace {

using nlohmann::json;

const std::set<std::string> kKeys{"cells", "k", "alpha", "beta", "beta1", "sigma2", "G", "Gamma", "priors", "pins"};

[[noreturn]] void fail(const std::string& message) { throw ScenarioFileError(message); }

const json& field(const json& doc, const char* key) {
    if (!doc.contains(key)) fail(std::string("missing key '") + key + "'");
    return doc.at(key);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail("'" + where + "' must be a number, got " + v.dump());
    return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& where, std::size_t expected) {
    if (!v.is_array()) fail("'" + where + "' must be an array, got " + v.dump());
    if (v.size() != expected)
        fail("'" + where + "' has " + std::to_string(v.size()) + " entries, expected " + std::to_string(expected));
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Prior prior_from(const json& v, double power, const std::string& where) {
    if (v.is_string()) {
        const auto kind = v.get<std::string>();
        if (kind == "gaussian") return Prior::gaussian(power);
        if (kind == "qpsk") return Prior::qpsk(power);
        if (kind == "known") return Prior::known(power);
        fail("'" + where + "': unknown prior '" + kind + "' (expected gaussian, qpsk, known or a discrete object)");
    }
    if (!v.is_object() || v.value("kind", "") != "discrete")
        fail("'" + where + "' must be a prior name or {\"kind\": \"discrete\", ...}, got " + v.dump());
    for (const auto& [key, _] : v.items())
        if (key != "kind" && key != "points" && key != "probs") fail("'" + where + "': unknown key '" + key + "'");
    const auto& pts = field(v, "points");
    if (!pts.is_array()) fail("'" + where + ".points' must be an array");
    std::vector<cplx> points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!p.is_array() || p.size() != 2)
            fail("'" + where + ".points[" + std::to_string(i) + "]' must be [re, im], got " + p.dump());
        points.emplace_back(number(p[0], where + ".points"), number(p[1], where + ".points"));
    }
    const auto probs = numbers(field(v, "probs"), where + ".probs", points.size());
    Prior prior;
    try {
        prior = Prior::discrete(points, probs);
    } catch (const std::invalid_argument& e) {
        fail("'" + where + "': " + e.what());
    }
    const double m2 = second_moment(prior);
    if (std::abs(m2 - power) > 1e-9 * std::max(1.0, power))
        fail("'" + where + "': discrete second moment " + std::to_string(m2) + " does not match Gamma " +
             std::to_string(power));
    return prior;
}

json prior_to(const Prior& p) {
    if (const auto* d = std::get_if<DiscretePrior>(&p.kind())) {
        json pts = json::array();
        for (const auto& x : d->points) pts.push_back({x.real(), x.imag()});
        return {{"kind", "discrete"}, {"points", pts}, {"probs", d->probs}};
    }
    return p.name();
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
    if (!doc.is_object()) fail("scenario document must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (!kKeys.count(key)) fail("unknown key '" + key + "'");

    const auto& cells_v = field(doc, "cells");
    if (!cells_v.is_number_integer() || cells_v.get<long long>() < 1)
        fail("'cells' must be a positive integer, got " + cells_v.dump());
    const auto C = static_cast<std::size_t>(cells_v.get<long long>());

    Scenario s;
    s.k = numbers(field(doc, "k"), "k", C);
    s.alpha = number(field(doc, "alpha"), "alpha");
    const double beta = number(field(doc, "beta"), "beta");
    const double beta1 = number(field(doc, "beta1"), "beta1");
    s.beta_t = {beta1, beta - beta1};
    s.sigma2 = number(field(doc, "sigma2"), "sigma2");
    s.G = numbers(field(doc, "G"), "G", C);
    const auto gamma = numbers(field(doc, "Gamma"), "Gamma", kPhases);
    for (std::size_t t = 0; t < kPhases; ++t)
        if (!(gamma[t] >= 0.0)) fail("'Gamma[" + std::to_string(t) + "]' = " + std::to_string(gamma[t]) + " must be >= 0");

    const auto& pri = field(doc, "priors");
    if (!pri.is_array() || pri.size() != C)
        fail("'priors' must be an array with one [training, data] pair per cell (" + std::to_string(C) + ")");
    for (std::size_t c = 0; c < C; ++c) {
        const auto& pair = pri[c];
        if (!pair.is_array() || pair.size() != kPhases)
            fail("'priors[" + std::to_string(c) + "]' must be a [training, data] pair, got " + pair.dump());
        std::array<Prior, kPhases> cell;
        for (std::size_t t = 0; t < kPhases; ++t)
            cell[t] = prior_from(pair[t], gamma[t], "priors[" + std::to_string(c) + "][" + std::to_string(t) + "]");
        s.priors.push_back(cell);
    }

    if (doc.contains("pins")) {
        const auto& pins = doc.at("pins");
        if (!pins.is_array()) fail("'pins' must be an array of strings like \"mseH:0=0\"");
        for (const auto& p : pins) {
            if (!p.is_string()) fail("'pins' entries must be strings, got " + p.dump());
            try {
                s.pins.push_back(parse_pin(p.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                fail(e.what());
            }
        }
    }

    try {
        validate(s);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    if (beta1 > beta) fail("'beta1' = " + std::to_string(beta1) + " exceeds 'beta' = " + std::to_string(beta));
    return s;
}

json scenario_to_json(const Scenario& s) {
    json priors = json::array();
    for (const auto& cell : s.priors) priors.push_back({prior_to(cell[0]), prior_to(cell[1])});
    json pins = json::array();
    for (const auto& p : s.pins) pins.push_back(format_pin(p));
    std::array<double, kPhases> gamma{};
    if (!s.priors.empty())
        for (std::size_t t = 0; t < kPhases; ++t) gamma[t] = s.symbol_power(0, t);
    return {{"cells", s.cells()}, {"k", s.k},         {"alpha", s.alpha}, {"beta", s.beta()},
            {"beta1", s.beta_t[0]}, {"sigma2", s.sigma2}, {"G", s.G},         {"Gamma", gamma},
            {"priors", priors},   {"pins", pins}};
}

Scenario parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        throw ScenarioFileError("invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(col) +
                                    ": " + e.what(),
                                line, col);
    }
    return scenario_from_json(doc);
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioFileError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace rsmimo
