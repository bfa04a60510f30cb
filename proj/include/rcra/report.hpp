#ifndef RCRA_REPORT_HPP_
#define RCRA_REPORT_HPP_

// CSV emission and run manifests. Numbers are printed with %.10g and '.'
// as decimal separator; rows come out in a fixed order.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcra/config.hpp"
#include "rcra/equilibrium.hpp"
#include "rcra/scenario.hpp"

namespace rcra {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// One simulated configuration of a command; sweeps have several.
struct PointResult {
    int index = 0;             // sweep point, 0 for a single run
    double sweep_value = 0.0;  // swept quantity, 0 for a single run
    ScenarioConfig config;
    Metrics metrics;
};

inline constexpr const char* kTimeseriesHeader = "sweep_point,slot,user,theta,lambda,rate_avg,power_avg";
inline constexpr const char* kSummaryHeader =
    "sweep_point,sweep_value,mode,user,group,mean_gain,target_rate,converged_theta,lambda,achieved_rate,power_total,"
    "tail_rate,tail_power";
inline constexpr const char* kOracleHeader =
    "user,group,mean_gain,target_rate,theta_sim,theta_star,theta_abs_delta,beta_star,lambda_sim,lambda_star,"
    "power_sim,power_analytic,power_rel_delta,power_per_success,power_waterfilled,converged";

/// Rows ordered by slot, then user.
inline void write_timeseries(std::ostream& out, const PointResult& r) {
    out << kTimeseriesHeader << '\n';
    for (const TimePoint& tp : r.metrics.series)
        for (std::size_t i = 0; i < tp.theta.size(); ++i)
            out << r.index << ',' << tp.slot << ',' << i << ',' << fmt(tp.theta[i]) << ',' << fmt(tp.lambda[i]) << ','
                << fmt(tp.rate_avg[i]) << ',' << fmt(tp.power_avg[i]) << '\n';
}

/// One row per user per point, ordered by (sweep_point, user). `points`
/// must already be in sweep order.
inline void write_summary(std::ostream& out, const std::vector<PointResult>& points) {
    out << kSummaryHeader << '\n';
    for (const PointResult& r : points) {
        const auto& users = r.config.users;
        for (std::size_t i = 0; i < r.metrics.summary.size(); ++i) {
            const UserSummary& s = r.metrics.summary[i];
            out << r.index << ',' << fmt(r.sweep_value) << ',' << to_string(r.config.mode) << ',' << i << ','
                << users[i].group << ',' << fmt(users[i].mean_gain) << ',' << fmt(s.target_rate) << ','
                << fmt(s.converged_theta) << ',' << fmt(s.lambda) << ',' << fmt(s.achieved_rate) << ','
                << fmt(s.achieved_power) << ',' << fmt(s.tail_rate) << ',' << fmt(s.tail_power) << '\n';
        }
    }
}

/// Simulated versus analytic values for one user.
struct OracleRow {
    std::size_t user = 0;
    int group = 0;
    double mean_gain = 0.0;
    double target_rate = 0.0;
    double theta_sim = 0.0;
    double theta_star = 0.0;
    double beta_star = 0.0;
    double lambda_sim = 0.0;
    double lambda_star = 0.0;
    double power_sim = 0.0;
    double power_analytic = 0.0;     // per unit time at theta*
    double power_per_success = 0.0;  // (theta / beta) * useful power
    double power_waterfilled = 0.0;  // re-waterfilled at beta*
    bool converged = false;

    double theta_abs_delta() const { return std::abs(theta_sim - theta_star); }
    double power_rel_delta() const { return (power_sim - power_analytic) / power_analytic; }
};

inline std::vector<OracleRow> oracle_rows(const ScenarioConfig& cfg, const Metrics& m, const EquilibriumProfile& eq) {
    const auto channels = cfg.channels();
    std::vector<OracleRow> rows;
    for (std::size_t i = 0; i < cfg.users.size(); ++i) {
        OracleRow r;
        r.user = i;
        r.group = cfg.users[i].group;
        r.mean_gain = cfg.users[i].mean_gain;
        r.target_rate = cfg.users[i].rate_target;
        r.theta_sim = m.summary[i].converged_theta;
        r.theta_star = eq.theta_star[i];
        r.beta_star = eq.beta_star[i];
        r.lambda_sim = m.summary[i].lambda;
        r.lambda_star = eq.lambda_star[i];
        r.power_sim = m.summary[i].achieved_power;
        r.power_analytic = eq.power_average[i];
        r.power_per_success = eq.power_total[i];
        r.power_waterfilled = waterfilled_total_power(eq.theta_star, i, channels[i], r.target_rate);
        r.converged = eq.converged;
        rows.push_back(r);
    }
    return rows;
}

inline void write_oracle(std::ostream& out, const std::vector<OracleRow>& rows) {
    out << kOracleHeader << '\n';
    for (const OracleRow& r : rows)
        out << r.user << ',' << r.group << ',' << fmt(r.mean_gain) << ',' << fmt(r.target_rate) << ','
            << fmt(r.theta_sim) << ',' << fmt(r.theta_star) << ',' << fmt(r.theta_abs_delta()) << ','
            << fmt(r.beta_star) << ',' << fmt(r.lambda_sim) << ',' << fmt(r.lambda_star) << ',' << fmt(r.power_sim)
            << ',' << fmt(r.power_analytic) << ',' << fmt(r.power_rel_delta()) << ',' << fmt(r.power_per_success)
            << ',' << fmt(r.power_waterfilled) << ',' << (r.converged ? 1 : 0) << '\n';
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Everything a command's outputs depend on.
struct RunManifest {
    std::string command;
    std::vector<std::string> configs;  // canonical text per sweep point
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> outputs;  // file names relative to the output directory

    /// Hash of command, configs and seeds, as 16 hex digits.
    std::string run_id() const {
        std::string blob = "command=" + command + '\n';
        for (const auto& c : configs) blob += "config\n" + c;
        for (auto s : seeds) blob += "seed=" + std::to_string(s) + '\n';
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(blob)));
        return buf;
    }

    std::string text() const {
        std::ostringstream o;
        o << "run_id = " << run_id() << '\n' << "command = " << command << '\n' << "seeds =";
        for (auto s : seeds) o << ' ' << s;
        o << '\n' << "outputs =";
        for (const auto& f : outputs) o << ' ' << f;
        o << '\n';
        for (std::size_t k = 0; k < configs.size(); ++k) o << "\n# sweep point " << k << '\n' << configs[k];
        return o.str();
    }
};

/// Seeds a config's replications run with.
inline std::vector<std::uint64_t> replication_seeds(const ScenarioConfig& cfg) {
    std::vector<std::uint64_t> s;
    for (int r = 0; r < cfg.replications; ++r) s.push_back(cfg.seed + static_cast<std::uint64_t>(r));
    return s;
}

}  // namespace rcra

#endif  // RCRA_REPORT_HPP_
