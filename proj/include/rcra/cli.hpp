#ifndef RCRA_CLI_HPP_
#define RCRA_CLI_HPP_

// Commands behind the rcra executable. Each runs every configuration,
// then writes all of its files at once into the output directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcra/collision_sim.hpp"
#include "rcra/config.hpp"
#include "rcra/equilibrium.hpp"
#include "rcra/report.hpp"

namespace rcra {

enum ExitCode : int { kExitOk = 0, kExitGateFailed = 1, kExitConfig = 2, kExitOutput = 3, kExitOracle = 4 };

class output_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Command-line overrides; set fields win over the config file.
struct CommandOptions {
    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<std::uint64_t> horizon;
    std::optional<SimMode> mode;
    std::string out_dir = "out";
    std::ostream* log = &std::cerr;
};

struct CommandResult {
    int exit_code = kExitOk;
    RunManifest manifest;
    std::vector<PointResult> points;
    std::vector<OracleRow> oracle;
};

namespace detail {

inline void apply_overrides(ScenarioConfig& c, const CommandOptions& o) {
    if (o.seed) c.seed = *o.seed;
    if (o.replications) c.replications = *o.replications;
    if (o.horizon) c.horizon = *o.horizon;
    if (o.mode) c.mode = *o.mode;
}

inline void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw output_error(dir.string() + ": " + ec.message());
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f) throw output_error(path.string() + ": write failed");
}

/// Fails the rate gate if any user misses its target by more than `tol`.
inline bool rate_gate(const std::vector<PointResult>& points, double tol, std::ostream& log) {
    double worst = 0.0;
    for (const auto& p : points)
        for (const auto& s : p.metrics.summary)
            worst = std::max(worst, std::abs(s.achieved_rate - s.target_rate) / s.target_rate);
    const bool ok = worst <= tol;
    log << "gate rate_tolerance: " << (ok ? "PASS" : "FAIL") << " (worst " << fmt(worst) << ", limit " << fmt(tol)
        << ")\n";
    return ok;
}

/// Writes outputs and the manifest; returns the manifest.
inline RunManifest emit(const std::string& command, const std::vector<PointResult>& points,
                        const std::vector<std::pair<std::string, std::string>>& files, const CommandOptions& o) {
    RunManifest m;
    m.command = command;
    for (const auto& p : points) m.configs.push_back(to_config_text(RunConfig{p.config, {}}));
    m.seeds = replication_seeds(points.front().config);
    for (const auto& [name, _] : files) m.outputs.push_back(name);
    m.outputs.push_back("manifest.txt");
    for (const auto& [name, content] : files) write_file(o.out_dir, name, content);
    write_file(o.out_dir, "manifest.txt", m.text());
    return m;
}

inline CommandResult finish_simulation(const std::string& command, std::vector<PointResult> points, const Gates& gates,
                                       const CommandOptions& o, bool sweep) {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& p : points) {
        std::ostringstream ts;
        write_timeseries(ts, p);
        files.emplace_back(sweep ? "timeseries_p" + std::to_string(p.index) + ".csv" : "timeseries.csv", ts.str());
    }
    std::ostringstream sum;
    write_summary(sum, points);
    files.emplace_back("summary.csv", sum.str());

    CommandResult res;
    res.manifest = emit(command, points, files, o);
    if (gates.rate_tolerance && !rate_gate(points, *gates.rate_tolerance, *o.log)) res.exit_code = kExitGateFailed;
    if (gates.theta_tolerance || gates.power_tolerance)
        *o.log << "note: theta/power gates apply to the oracle command only\n";
    res.points = std::move(points);
    return res;
}

/// Runs a sweep built from `points` (config and swept value). A config
/// file may override any setting except the user list.
inline CommandResult sweep(const std::string& command, const std::vector<std::pair<ScenarioConfig, double>>& sweep_points,
                           const CommandOptions& o) {
    RunConfig base{sweep_points.front().first, {}};
    base.scenario.users.clear();
    if (o.config_path) base = load_config_file(*o.config_path, base);
    if (!base.scenario.users.empty()) throw config_error(command + ": sweep commands define their own users");
    std::vector<PointResult> points;
    for (std::size_t k = 0; k < sweep_points.size(); ++k) {
        RunConfig rc = base;
        rc.scenario.users = sweep_points[k].first.users;
        apply_overrides(rc.scenario, o);
        validate_config(rc);
        *o.log << command << ": point " << k + 1 << "/" << sweep_points.size() << '\n';
        points.push_back({static_cast<int>(k), sweep_points[k].second, rc.scenario, run_scenario(rc.scenario)});
    }
    return finish_simulation(command, std::move(points), base.gates, o, true);
}

inline RunConfig load_single(const std::string& command, const CommandOptions& o) {
    if (!o.config_path) throw config_error(command + ": --config is required");
    RunConfig rc = load_config_file(*o.config_path);
    apply_overrides(rc.scenario, o);
    validate_config(rc);
    return rc;
}

}  // namespace detail

/// Single configuration: timeseries.csv, summary.csv, manifest.txt.
inline CommandResult cmd_run(const CommandOptions& o) {
    const RunConfig rc = detail::load_single("run", o);
    std::vector<PointResult> points{{0, 0.0, rc.scenario, run_scenario(rc.scenario)}};
    return detail::finish_simulation("run", std::move(points), rc.gates, o, false);
}

/// Group 2's rate target swept 50..110 kbps; sweep_value is that rate.
inline CommandResult cmd_sweep_scenario1(const CommandOptions& o) {
    std::vector<std::pair<ScenarioConfig, double>> pts;
    const auto cfgs = scenario1_configs();
    const auto rates = scenario1_rates();
    for (std::size_t k = 0; k < cfgs.size(); ++k) pts.emplace_back(cfgs[k], rates[k]);
    return detail::sweep("sweep1", pts, o);
}

/// Group 2's mean gain swept 0.05..1.3867; sweep_value is that gain.
inline CommandResult cmd_sweep_scenario2(const CommandOptions& o) {
    std::vector<std::pair<ScenarioConfig, double>> pts;
    const auto cfgs = scenario2_configs();
    const auto gains = scenario2_gains();
    for (std::size_t k = 0; k < cfgs.size(); ++k) pts.emplace_back(cfgs[k], gains[k]);
    return detail::sweep("sweep2", pts, o);
}

/// Simulation plus the Nash fixed point of the same users: oracle.csv
/// alongside the run outputs. The theta and power gates apply here.
inline CommandResult cmd_oracle(const CommandOptions& o) {
    const RunConfig rc = detail::load_single("oracle", o);
    const ScenarioConfig& cfg = rc.scenario;
    Metrics m = run_scenario(cfg);

    NashOptions nopt;
    nopt.response.theta_min = cfg.ttsga.theta_min;
    nopt.response.omega = cfg.ttsga.omega;
    std::vector<double> targets;
    for (const auto& u : cfg.users) targets.push_back(u.rate_target);
    const EquilibriumProfile eq = nash_fixed_point(cfg.channels(), targets, nopt);
    auto rows = oracle_rows(cfg, m, eq);

    std::vector<PointResult> points{{0, 0.0, cfg, std::move(m)}};
    std::ostringstream ts, sum, orc;
    write_timeseries(ts, points.front());
    write_summary(sum, points);
    write_oracle(orc, rows);

    CommandResult res;
    res.manifest = detail::emit("oracle", points,
                                {{"timeseries.csv", ts.str()}, {"summary.csv", sum.str()}, {"oracle.csv", orc.str()}}, o);
    std::ostream& log = *o.log;
    if (!eq.converged) {
        log << "oracle: best-response iteration did not converge (last change " << fmt(eq.last_change) << ")\n";
        if (rc.gates.theta_tolerance || rc.gates.power_tolerance) res.exit_code = kExitOracle;
    }
    if (rc.gates.rate_tolerance && !detail::rate_gate(points, *rc.gates.rate_tolerance, log))
        res.exit_code = kExitGateFailed;
    if (rc.gates.theta_tolerance) {
        double worst = 0.0;
        for (const auto& r : rows) worst = std::max(worst, r.theta_abs_delta());
        const bool ok = worst <= *rc.gates.theta_tolerance;
        log << "gate theta_tolerance: " << (ok ? "PASS" : "FAIL") << " (worst " << fmt(worst) << ", limit "
            << fmt(*rc.gates.theta_tolerance) << ")\n";
        if (!ok) res.exit_code = kExitGateFailed;
    }
    if (rc.gates.power_tolerance) {
        double worst = 0.0;
        for (const auto& r : rows) worst = std::max(worst, std::abs(r.power_rel_delta()));
        const bool ok = worst <= *rc.gates.power_tolerance;
        log << "gate power_tolerance: " << (ok ? "PASS" : "FAIL") << " (worst " << fmt(worst) << ", limit "
            << fmt(*rc.gates.power_tolerance) << ")\n";
        if (!ok) res.exit_code = kExitGateFailed;
    }
    res.points = std::move(points);
    res.oracle = std::move(rows);
    return res;
}

}  // namespace rcra

#endif  // RCRA_CLI_HPP_
