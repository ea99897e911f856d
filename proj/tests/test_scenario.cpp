#include "rsmimo/presets.hpp"
#include "rsmimo/scenario.hpp"
#include "rsmimo/scenario_json.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

using namespace rsmimo;

namespace {

const char* kTwoCell = R"({
  "cells": 2,
  "k": [0.5, 0.5],
  "alpha": 4.0,
  "beta": 10.0,
  "beta1": 1.0,
  "sigma2": 1.0,
  "G": [1.0, 0.1],
  "Gamma": [1.0, 1.0],
  "priors": [["known", "gaussian"], ["gaussian", "qpsk"]],
  "pins": ["mseH:1=prior"]
})";

}  // namespace

TEST_CASE("pin specs parse and format") {
    const auto a = parse_pin("mseH:0=0.25");
    CHECK(a.field == PinField::ChannelMse);
    CHECK(a.cell == 0);
    CHECK(*a.value == 0.25);
    const auto b = parse_pin("mseX:1:0=prior");
    CHECK(b.field == PinField::SymbolMse);
    CHECK(b.cell == 1);
    CHECK(b.phase == 0);
    CHECK_FALSE(b.value.has_value());
    CHECK(parse_pin(format_pin(a)) == a);
    CHECK(parse_pin(format_pin(b)) == b);
    CHECK_THROWS(parse_pin("mseH=0"));
    CHECK_THROWS(parse_pin("mseX:0=1"));
    CHECK_THROWS(parse_pin("mseQ:0=1"));
    CHECK_THROWS(parse_pin("mseH:0=abc"));
}

TEST_CASE("canonical presets validate") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        CHECK_NOTHROW(validate(preset(name)));
    }
    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("validation rejects inconsistent scenarios") {
    auto s = preset("example3");
    s.k = {0.5, 0.6};
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s = preset("example3");
    s.alpha = 0.0;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s = preset("example3");
    s.sigma2 = -1.0;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s = preset("example3");
    s.pins.push_back({PinField::ChannelMse, 5, 0, 0.0});
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s = preset("example3");
    s.pins.push_back({PinField::ChannelMse, 0, 0, 2.0});  // above G_1
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
}

TEST_CASE("parameter paths round-trip") {
    auto s = preset("example3");
    for (const char* path : {"alpha", "beta1", "beta2", "sigma2", "G.1", "k.0"}) {
        set_parameter(s, path, 0.375);
        CHECK(get_parameter(s, path) == 0.375);
    }
    s = preset("example2-jcd");
    set_parameter(s, "beta", 7.0);
    CHECK(s.beta_t[0] == 1.0);
    CHECK(s.beta_t[1] == 6.0);
    set_parameter(s, "Gamma.1", 2.0);
    CHECK(s.symbol_power(0, 1) == 2.0);
    CHECK_THROWS(set_parameter(s, "gamma", 1.0));
    CHECK_THROWS(get_parameter(s, "G.9"));
}

TEST_CASE("scenario json round-trips") {
    const auto s = parse_scenario(kTwoCell);
    CHECK(s.cells() == 2);
    CHECK(s.beta_t[0] == 1.0);
    CHECK(s.beta_t[1] == 9.0);
    CHECK(s.priors[0][0].is_known());
    CHECK(s.priors[1][1] == Prior::qpsk(1.0));
    REQUIRE(s.pins.size() == 1);
    const auto again = scenario_from_json(scenario_to_json(s));
    CHECK(again.k == s.k);
    CHECK(again.G == s.G);
    CHECK(again.priors == s.priors);
    CHECK(again.pins == s.pins);
}

TEST_CASE("discrete priors in json") {
    std::string text = kTwoCell;
    const std::string from = R"(["gaussian", "qpsk"])";
    text.replace(text.find(from), from.size(),
                 R"(["gaussian", {"kind": "discrete", "points": [[1, 0], [-1, 0]], "probs": [0.5, 0.5]}])");
    const auto s = parse_scenario(text);
    CHECK(second_moment(s.priors[1][1]) == 1.0);
    const std::string bad_power = [&] {
        std::string t = text;
        t.replace(t.find("[[1, 0], [-1, 0]]"), 17, "[[2, 0], [-2, 0]]");
        return t;
    }();
    CHECK_THROWS_AS(parse_scenario(bad_power), ScenarioFileError);
}

TEST_CASE("syntax errors report line and column") {
    std::string text = kTwoCell;
    text.replace(text.find("\"alpha\": 4.0,"), 13, "\"alpha\": 4.0,,");
    try {
        parse_scenario(text);
        FAIL("expected a parse error");
    } catch (const ScenarioFileError& e) {
        CHECK(e.line() == 4);
        CHECK(e.column() > 0);
    }
}

TEST_CASE("schema errors") {
    auto replaced = [](std::string from, std::string to) {
        std::string t = kTwoCell;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    CHECK_THROWS_AS(parse_scenario(replaced("\"sigma2\": 1.0,", "\"sigma2\": 1.0, \"extra\": 1,")), ScenarioFileError);
    CHECK_THROWS_AS(parse_scenario(replaced("\"beta1\": 1.0,", "\"beta1\": 11.0,")), ScenarioFileError);
    CHECK_THROWS_AS(parse_scenario(replaced("\"known\"", "\"laplace\"")), ScenarioFileError);
    CHECK_THROWS_AS(parse_scenario(replaced("\"cells\": 2,", "")), ScenarioFileError);
    CHECK_THROWS_AS(parse_scenario(replaced("\"k\": [0.5, 0.5]", "\"k\": [0.5, 0.4]")), std::invalid_argument);
    CHECK_NOTHROW(parse_scenario(replaced(",\n  \"pins\": [\"mseH:1=prior\"]", "")));
}

TEST_CASE("scenario files load from disk") {
    const std::string path = "test_scenario_tmp.json";
    {
        std::ofstream f(path);
        f << kTwoCell;
    }
    CHECK(load_scenario_file(path).alpha == 4.0);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_scenario_file("does/not/exist.json"), ScenarioFileError);
}
