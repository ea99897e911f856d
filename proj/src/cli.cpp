#include "rsmimo/cli.hpp"

#include "rsmimo/montecarlo.hpp"
#include "rsmimo/presets.hpp"
#include "rsmimo/scenario_json.hpp"
#include "rsmimo/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rsmimo {
namespace {

using nlohmann::json;

struct CommonOptions {
    std::string scenario_file;
    std::string preset_name;
    std::vector<std::string> overrides;
    std::vector<std::string> pins;
    double damping = 0.0;
    double tol = 1e-10;
    int max_iter = 10000;
    std::vector<std::string> inits{"ignorance", "oracle"};
    int threads = 0;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
    auto* file = cmd.add_option("--scenario", o.scenario_file, "Scenario JSON file");
    auto* name = cmd.add_option("--preset", o.preset_name, "Named canonical scenario");
    file->excludes(name);
    cmd.add_option("--set", o.overrides, "Parameter override key=value (repeatable)");
    cmd.add_option("--pin", o.pins, "Pin mseH:<c>=<v> or mseX:<c>:<t>=<v>, <v> may be 'prior' (repeatable)");
    cmd.add_option("--damping", o.damping, "Damping on mse updates, in [0, 1)");
    cmd.add_option("--tol", o.tol, "Convergence tolerance on the mse change");
    cmd.add_option("--max-iter", o.max_iter, "Iteration cap per initialization");
    cmd.add_option("--init", o.inits, "Initializations: ignorance, oracle (repeatable)");
    cmd.add_option("--threads", o.threads, "Worker threads (0: RSMIMO_THREADS or all cores)");
}

double parse_number(std::string_view text, std::string_view what) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw std::invalid_argument("invalid number '" + std::string(text) + "' in " + std::string(what));
    return v;
}

Scenario load_scenario(const CommonOptions& o) {
    Scenario s;
    if (!o.scenario_file.empty())
        s = load_scenario_file(o.scenario_file);
    else if (!o.preset_name.empty())
        s = preset(o.preset_name);
    else
        throw std::invalid_argument("one of --scenario or --preset is required");
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        set_parameter(s, kv.substr(0, eq), parse_number(std::string_view(kv).substr(eq + 1), "--set"));
    }
    for (const auto& p : o.pins) s.pins.push_back(parse_pin(p));
    validate(s);
    return s;
}

SolverConfig solver_config(const CommonOptions& o) {
    SolverConfig c;
    c.damping = o.damping;
    c.tol = o.tol;
    c.max_iter = o.max_iter;
    c.inits.clear();
    for (const auto& name : o.inits) {
        if (name == "ignorance")
            c.inits.push_back(Initialization::ignorance());
        else if (name == "oracle")
            c.inits.push_back(Initialization::oracle());
        else
            throw std::invalid_argument("unknown initialization '" + name + "' (expected ignorance or oracle)");
    }
    c.validate();
    return c;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(fmt(v)); }

json fixed_point_json(const FixedPointResult& r, bool selected) {
    json mse_X = json::array(), q_X = json::array();
    for (std::size_t c = 0; c < r.params.cells(); ++c) {
        mse_X.push_back({number(r.params.mse_X[c][0]), number(r.params.mse_X[c][1])});
        q_X.push_back({number(r.params.qtilde_X[c][0]), number(r.params.qtilde_X[c][1])});
    }
    json mse_H = json::array(), q_H = json::array();
    for (std::size_t c = 0; c < r.params.cells(); ++c) {
        mse_H.push_back(number(r.params.mse_H[c]));
        q_H.push_back(number(r.params.qtilde_H[c]));
    }
    return {{"selected", selected},
            {"init", r.init_label},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"residual", number(r.residual)},
            {"phi", r.phi ? number(*r.phi) : json(nullptr)},
            {"degenerate", r.degenerate},
            {"mse_H", mse_H},
            {"qtilde_H", q_H},
            {"mse_X", mse_X},
            {"qtilde_X", q_X}};
}

// Writes to path via a temporary sibling so that failures never leave a partial file.
void write_atomically(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) {
            std::filesystem::remove(tmp);
            throw std::runtime_error("failed writing '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, target);
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        write_atomically(path, content);
}

int cmd_solve(const CommonOptions& o, std::ostream& out) {
    const Scenario s = load_scenario(o);
    const auto config = solver_config(o);
    const auto points = solve(s, config);
    const auto sel = select_fixed_point(s, points);
    json doc;
    doc["scenario"] = scenario_to_json(s);
    doc["selection"] = sel.by_free_entropy ? "free_entropy" : "min_total_mse";
    doc["multiple_fixed_points"] = sel.multiple;
    doc["warnings"] = scenario_warnings(s);
    doc["fixed_points"] = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) doc["fixed_points"].push_back(fixed_point_json(points[i], i == sel.index));
    out << doc.dump(2) << '\n';
    return points[sel.index].converged ? kExitOk : kExitNotConverged;
}

std::string sweep_csv(const Scenario& s, const std::string& axis, const std::vector<SweepPoint>& rows) {
    std::ostringstream csv;
    csv << "axis,value";
    for (std::size_t c = 0; c < s.cells(); ++c) csv << ",mse_H_" << c;
    for (std::size_t c = 0; c < s.cells(); ++c)
        for (std::size_t t = 0; t < kPhases; ++t) csv << ",mse_X_" << c << '_' << t;
    csv << ",phi,converged,init_label,n_fixed_points\n";
    for (const auto& row : rows) {
        const auto& r = row.selected();
        csv << axis << ',' << fmt(row.value);
        for (std::size_t c = 0; c < s.cells(); ++c) csv << ',' << fmt(r.params.mse_H[c]);
        for (std::size_t c = 0; c < s.cells(); ++c)
            for (std::size_t t = 0; t < kPhases; ++t) csv << ',' << fmt(r.params.mse_X[c][t]);
        csv << ',' << (r.phi ? fmt(*r.phi) : "") << ',' << (r.converged ? 1 : 0) << ',' << r.init_label << ','
            << row.points.size() << '\n';
    }
    return csv.str();
}

int cmd_sweep(const CommonOptions& o, const std::string& axis, const std::string& range, const std::string& out_path,
              bool warm, std::ostream& out) {
    const Scenario s = load_scenario(o);
    const auto config = solver_config(o);
    get_parameter(s, axis);  // rejects unknown axes before any work
    const auto grid = parse_range(range);
    const auto rows = sweep(s, axis, grid, config, SweepOptions{warm, o.threads});
    emit(out_path, sweep_csv(s, axis, rows), out);
    return kExitOk;
}

int cmd_transition(const CommonOptions& o, const std::string& axis, const std::string& bracket, double jump,
                   double width, std::size_t cell, std::ostream& out) {
    const Scenario s = load_scenario(o);
    const auto config = solver_config(o);
    get_parameter(s, axis);
    const auto [lo, hi] = parse_bracket(bracket);
    TransitionOptions opts;
    opts.jump_threshold = jump;
    opts.width_target = width;
    opts.cell = cell;
    const auto r = locate_transition(s, axis, lo, hi, config, opts);
    json doc{{"axis", r.axis},
             {"found", r.found},
             {"low", number(r.low)},
             {"high", number(r.high)},
             {"mse_low", number(r.mse_low)},
             {"mse_high", number(r.mse_high)},
             {"jump_size", number(r.jump_size)},
             {"width", number(r.resolved_to)},
             {"evaluations", r.evaluations},
             {"warnings", scenario_warnings(s)}};
    out << doc.dump(2) << '\n';
    return kExitOk;
}

std::string optional_field(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

int cmd_mc(const CommonOptions& o, const std::string& scheme, std::size_t K, std::size_t trials, std::uint64_t seed,
           std::size_t rank, const std::string& out_path, std::ostream& out) {
    const Scenario s = load_scenario(o);
    McConfig config;
    config.scheme = parse_scheme(scheme);
    config.K = K;
    config.trials = trials;
    config.seed = seed;
    config.svd_rank = rank;
    config.threads = o.threads;
    config.solver = solver_config(o);
    const auto r = run_monte_carlo(s, config);

    auto mean = [](const std::optional<Statistic>& st) { return st ? fmt(st->mean) : std::string(); };
    auto se = [](const std::optional<Statistic>& st) { return st ? fmt(st->std_error) : std::string(); };
    std::ostringstream csv;
    csv << "scheme,K,N,T1,T2,trials,seed,mse_H,mse_H_se,mse_X,mse_X_se,cond_mse_H,cond_mse_X,replica_mse_H,"
           "replica_mse_X,ci_infinite,flagged_trials\n";
    csv << scheme_name(r.scheme) << ',' << r.dims.K << ',' << r.dims.N << ',' << r.dims.T[0] << ',' << r.dims.T[1]
        << ',' << r.trials << ',' << r.seed << ',' << mean(r.mse_H) << ',' << se(r.mse_H) << ',' << mean(r.mse_X)
        << ',' << se(r.mse_X) << ',' << mean(r.conditional_mse_H) << ',' << mean(r.conditional_mse_X) << ','
        << optional_field(r.replica_mse_H) << ',' << optional_field(r.replica_mse_X) << ','
        << (r.ci_infinite() ? 1 : 0) << ',' << r.flagged_trials << '\n';
    emit(out_path, csv.str(), out);
    return kExitOk;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::vector<double> parse_range(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:linN or start:stop:logN, got '" + spec + "'");
    const double start = parse_number(parts[0], "range start");
    const double stop = parse_number(parts[1], "range stop");
    const std::string& kind = parts[2];
    if (kind.size() < 4 || (kind.rfind("lin", 0) != 0 && kind.rfind("log", 0) != 0))
        throw std::invalid_argument("range step must be linN or logN, got '" + kind + "'");
    const double count = parse_number(std::string_view(kind).substr(3), "range count");
    if (count < 1 || count != std::floor(count)) throw std::invalid_argument("range yields an empty grid: '" + spec + "'");
    const auto n = static_cast<std::size_t>(count);
    const bool log = kind[1] == 'o';
    if (log && !(start > 0.0 && stop > 0.0)) throw std::invalid_argument("log range needs positive endpoints");
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        grid[i] = log ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start))) : start + f * (stop - start);
    }
    if (n > 1) {
        grid.front() = start;
        grid.back() = stop;
    }
    return grid;
}

std::pair<double, double> parse_bracket(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.size() != 2) throw std::invalid_argument("bracket must be low:high, got '" + spec + "'");
    return {parse_number(parts[0], "bracket"), parse_number(parts[1], "bracket")};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Replica analysis and finite-size simulation of joint channel and data estimation"};
    app.name(args.empty() ? "rsmimo" : args.front());
    app.require_subcommand(1);

    CommonOptions solve_opts, sweep_opts, trans_opts, mc_opts;
    auto* solve_cmd = app.add_subcommand("solve", "Fixed points of one scenario, as JSON");
    add_common(*solve_cmd, solve_opts);

    std::string sweep_axis, sweep_range, sweep_out;
    bool warm = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Selected fixed point along a parameter grid, as CSV");
    add_common(*sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--axis", sweep_axis, "Parameter path, e.g. alpha or G.1")->required();
    sweep_cmd->add_option("--range", sweep_range, "start:stop:linN or start:stop:logN")->required();
    sweep_cmd->add_option("--out", sweep_out, "Output CSV path (default stdout)");
    sweep_cmd->add_flag("--warm-start", warm, "Seed each point with the previous selection");

    std::string trans_axis, trans_bracket;
    double jump = 0.1, width = 1e-4;
    std::size_t trans_cell = 0;
    auto* trans_cmd = app.add_subcommand("transition", "Locate a discontinuity of the selected data mse, as JSON");
    add_common(*trans_cmd, trans_opts);
    trans_cmd->add_option("--axis", trans_axis, "Parameter path")->required();
    trans_cmd->add_option("--bracket", trans_bracket, "low:high")->required();
    trans_cmd->add_option("--jump", jump, "Minimum jump in the data mse");
    trans_cmd->add_option("--width", width, "Target bracket width");
    trans_cmd->add_option("--cell", trans_cell, "Cell whose data mse is observed");

    std::string scheme = "perfect-csi", mc_out;
    std::size_t K = 10, trials = 1, rank = 0;
    std::uint64_t seed = 0;
    auto* mc_cmd = app.add_subcommand("mc", "Finite-size Monte Carlo of a baseline estimator, as CSV");
    add_common(*mc_cmd, mc_opts);
    mc_cmd->add_option("--scheme", scheme, "perfect-csi, pilot-channel, pilot-then-data or svd-blind");
    mc_cmd->add_option("--K", K, "Total number of users");
    mc_cmd->add_option("--trials", trials, "Number of independent trials");
    mc_cmd->add_option("--seed", seed, "Base seed");
    mc_cmd->add_option("--rank", rank, "Signal-subspace rank for svd-blind (0: target-cell users)");
    mc_cmd->add_option("--out", mc_out, "Output CSV path (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (*solve_cmd) return cmd_solve(solve_opts, out);
        if (*sweep_cmd) return cmd_sweep(sweep_opts, sweep_axis, sweep_range, sweep_out, warm, out);
        if (*trans_cmd) return cmd_transition(trans_opts, trans_axis, trans_bracket, jump, width, trans_cell, out);
        if (*mc_cmd) return cmd_mc(mc_opts, scheme, K, trials, seed, rank, mc_out, out);
    } catch (const ScenarioFileError& e) {
        err << "error: " << e.what();
        if (e.line() > 0) err << " (line " << e.line() << ", column " << e.column() << ")";
        err << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace rsmimo
