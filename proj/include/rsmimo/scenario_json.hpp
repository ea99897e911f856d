#pragma once

#include "rsmimo/scenario.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsmimo {

/// Malformed or invalid scenario document. For syntax errors line and column are 1-based;
/// for schema errors they are 0.
class ScenarioFileError : public std::invalid_argument {
public:
    ScenarioFileError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
        : std::invalid_argument(message), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/*
 * Scenario document:
 *
 *   {
 *     "cells": 2,
 *     "k": [0.5, 0.5],
 *     "alpha": 4.0,
 *     "beta": 10.0,
 *     "beta1": 1.0,
 *     "sigma2": 1.0,
 *     "G": [1.0, 0.1],
 *     "Gamma": [1.0, 1.0],
 *     "priors": [["known", "gaussian"], ["gaussian", "gaussian"]],
 *     "pins": ["mseH:1=prior"]
 *   }
 *
 * priors[c][t] is "gaussian", "qpsk", "known", or
 * {"kind": "discrete", "points": [[re, im], ...], "probs": [...]} whose second moment
 * must equal Gamma[t]. beta2 = beta - beta1. "pins" is optional; every other key is required
 * and unknown keys are rejected.
 */
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& s);

/// Parses text; syntax errors carry the line and column.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

}  // namespace rsmimo
