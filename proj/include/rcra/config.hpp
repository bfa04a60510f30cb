#ifndef RCRA_CONFIG_HPP_
#define RCRA_CONFIG_HPP_

// Plain-text scenario configuration.
//
//   # comment (also after a value)
//   [users]
//   user  = <mean_gain> <rate_target>            one user
//   group = <count> <mean_gain> <rate_target>    count identical users
//   [ttsga]    omega delta theta_min theta0 lambda0 lambda_gain cost_sample
//              relative_gradient exp_a exp_b exp_c scale_a scale_b scale_c
//   [channel]  noise_power bandwidth packet_bits
//   [run]      horizon replications seed mode power_mode constant_power
//              phase_order sample_interval
//   [protocol] rts cts data ack timeout idle_gap rts_energy_fraction
//   [gates]    rate_tolerance theta_tolerance power_tolerance
//
// Every `user` or `group` line opens a new group, numbered from 1 in file
// order. Unknown sections and keys are errors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rcra/scenario.hpp"
#include "rcra/ttsga.hpp"

namespace rcra {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pass/fail thresholds checked after a command finishes; unset gates are
/// not checked.
struct Gates {
    std::optional<double> rate_tolerance;   // |achieved - target| / target, every user
    std::optional<double> theta_tolerance;  // |theta_sim - theta*|, oracle only
    std::optional<double> power_tolerance;  // relative power gap, oracle only
};

struct RunConfig {
    ScenarioConfig scenario;
    Gates gates;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& field, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw config_error(field + ": expected a number, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) throw config_error(field + ": expected a number, got '" + text + "'");
    return v;
}

inline std::uint64_t parse_count(const std::string& field, const std::string& text) {
    const double v = parse_double(field, text);
    if (v < 0.0 || v != std::floor(v) || v > 9.0e15) throw config_error(field + ": expected a nonnegative integer");
    return static_cast<std::uint64_t>(v);
}

inline bool parse_bool(const std::string& field, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw config_error(field + ": expected true or false, got '" + text + "'");
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

inline std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline const char* to_string(SimMode m) { return m == SimMode::slotted ? "slotted" : "protocol"; }
inline const char* to_string(PowerMode m) { return m == PowerMode::waterfilling ? "waterfilling" : "constant"; }
inline const char* to_string(PhaseOrder m) { return m == PhaseOrder::random ? "random" : "parity"; }
inline const char* to_string(CostSample m) { return m == CostSample::lagrangian ? "lagrangian" : "power"; }

inline SimMode parse_mode(const std::string& field, const std::string& v) {
    if (v == "slotted") return SimMode::slotted;
    if (v == "protocol") return SimMode::protocol;
    throw config_error(field + ": expected slotted or protocol, got '" + v + "'");
}

/// Parses config text on top of `base`; fields the text does not mention
/// keep the base value. `origin` prefixes error messages.
inline RunConfig parse_config(const std::string& text, const std::string& origin = "config", RunConfig base = {}) {
    using namespace detail;
    RunConfig rc = std::move(base);
    ScenarioConfig& c = rc.scenario;
    std::istringstream in(text);
    std::string section;
    int group = 0;
    for (const auto& u : c.users) group = std::max(group, u.group);
    int line_no = 0;

    using Setter = std::function<void(const std::string& field, const std::string& value)>;
    auto num = [](double& dst) -> Setter { return [&dst](const std::string& f, const std::string& v) { dst = parse_double(f, v); }; };
    auto cnt = [](std::uint64_t& dst) -> Setter {
        return [&dst](const std::string& f, const std::string& v) { dst = parse_count(f, v); };
    };
    auto opt = [](std::optional<double>& dst) -> Setter {
        return [&dst](const std::string& f, const std::string& v) { dst = parse_double(f, v); };
    };
    const std::map<std::string, std::map<std::string, Setter>> keys{
        {"ttsga",
         {{"omega", num(c.ttsga.omega)},
          {"delta", num(c.ttsga.delta)},
          {"theta_min", num(c.ttsga.theta_min)},
          {"theta0", num(c.ttsga.theta0)},
          {"lambda0", num(c.ttsga.lambda0)},
          {"lambda_gain", num(c.ttsga.lambda_gain)},
          {"cost_sample",
           [&c](const std::string& f, const std::string& v) {
               if (v == "lagrangian") c.ttsga.cost_sample = CostSample::lagrangian;
               else if (v == "power") c.ttsga.cost_sample = CostSample::power;
               else throw config_error(f + ": expected lagrangian or power, got '" + v + "'");
           }},
          {"relative_gradient",
           [&c](const std::string& f, const std::string& v) { c.ttsga.relative_gradient = parse_bool(f, v); }},
          {"exp_a", num(c.schedule.exp_a)},
          {"exp_b", num(c.schedule.exp_b)},
          {"exp_c", num(c.schedule.exp_c)},
          {"scale_a", num(c.schedule.scale_a)},
          {"scale_b", num(c.schedule.scale_b)},
          {"scale_c", num(c.schedule.scale_c)}}},
        {"channel",
         {{"noise_power", num(c.noise_power)}, {"bandwidth", num(c.bandwidth)}, {"packet_bits", num(c.packet_bits)}}},
        {"run",
         {{"horizon", cnt(c.horizon)},
          {"replications",
           [&c](const std::string& f, const std::string& v) {
               const auto r = parse_count(f, v);
               if (r > 1000000) throw config_error(f + ": too many replications");
               c.replications = static_cast<int>(r);
           }},
          {"seed", cnt(c.seed)},
          {"mode", [&c](const std::string& f, const std::string& v) { c.mode = parse_mode(f, v); }},
          {"power_mode",
           [&c](const std::string& f, const std::string& v) {
               if (v == "waterfilling") c.power_mode = PowerMode::waterfilling;
               else if (v == "constant") c.power_mode = PowerMode::constant;
               else throw config_error(f + ": expected waterfilling or constant, got '" + v + "'");
           }},
          {"constant_power", num(c.constant_power)},
          {"phase_order",
           [&c](const std::string& f, const std::string& v) {
               if (v == "random") c.phase_order = PhaseOrder::random;
               else if (v == "parity") c.phase_order = PhaseOrder::parity;
               else throw config_error(f + ": expected random or parity, got '" + v + "'");
           }},
          {"sample_interval", cnt(c.sample_interval)}}},
        {"protocol",
         {{"rts", num(c.timing.rts)},
          {"cts", num(c.timing.cts)},
          {"data", num(c.timing.data)},
          {"ack", num(c.timing.ack)},
          {"timeout", num(c.timing.timeout)},
          {"idle_gap", num(c.timing.idle_gap)},
          {"rts_energy_fraction", num(c.timing.rts_energy_fraction)}}},
        {"gates",
         {{"rate_tolerance", opt(rc.gates.rate_tolerance)},
          {"theta_tolerance", opt(rc.gates.theta_tolerance)},
          {"power_tolerance", opt(rc.gates.power_tolerance)}}},
    };

    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        std::string line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error(where + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "users" && !keys.count(section)) throw config_error(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw config_error(where + ": key '" + key + "' outside any section");
        const std::string field = where + ": " + section + "." + key;
        if (value.empty()) throw config_error(field + ": missing value");
        if (section == "users") {
            const auto w = split_ws(value);
            if (key == "user") {
                if (w.size() != 2) throw config_error(field + ": expected <mean_gain> <rate_target>");
                ++group;
                c.users.push_back({parse_double(field + " mean_gain", w[0]), parse_double(field + " rate_target", w[1]), group});
            } else if (key == "group") {
                if (w.size() != 3) throw config_error(field + ": expected <count> <mean_gain> <rate_target>");
                const auto n = parse_count(field + " count", w[0]);
                if (n < 1 || n > 100000) throw config_error(field + " count: must be in [1, 100000]");
                ++group;
                const double g = parse_double(field + " mean_gain", w[1]);
                const double r = parse_double(field + " rate_target", w[2]);
                for (std::uint64_t k = 0; k < n; ++k) c.users.push_back({g, r, group});
            } else {
                throw config_error(field + ": unknown key (expected user or group)");
            }
            continue;
        }
        const auto& table = keys.at(section);
        const auto it = table.find(key);
        if (it == table.end()) throw config_error(field + ": unknown key");
        it->second(field, value);
    }
    return rc;
}

/// Reads and parses a config file; the scenario is not yet validated.
inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream f(path);
    if (!f) throw config_error(path + ": cannot open");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path, std::move(base));
}

/// Validation with the config's field names in the message.
inline void validate_config(const RunConfig& rc) {
    try {
        rc.scenario.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("invalid config: ") + e.what());
    }
    for (const auto& [name, g] : {std::pair{"gates.rate_tolerance", rc.gates.rate_tolerance},
                                  std::pair{"gates.theta_tolerance", rc.gates.theta_tolerance},
                                  std::pair{"gates.power_tolerance", rc.gates.power_tolerance}})
        if (g && !(*g >= 0.0)) throw config_error(std::string("invalid config: ") + name + " must be >= 0");
}

/// load_config_file followed by validate_config.
inline RunConfig load_config(const std::string& path) {
    RunConfig rc = load_config_file(path);
    validate_config(rc);
    return rc;
}

/// Canonical text of a config: every field, fixed order, one user per
/// line. parse_config(to_config_text(c)) reproduces c.
inline std::string to_config_text(const RunConfig& rc) {
    using detail::fmt_num;
    const ScenarioConfig& c = rc.scenario;
    std::ostringstream o;
    o << "[users]\n";
    int last_group = -1;
    for (std::size_t i = 0; i < c.users.size(); ++i) {
        // Consecutive users of one group collapse into a group line.
        if (c.users[i].group == last_group) continue;
        std::size_t j = i;
        while (j + 1 < c.users.size() && c.users[j + 1].group == c.users[i].group &&
               c.users[j + 1].mean_gain == c.users[i].mean_gain && c.users[j + 1].rate_target == c.users[i].rate_target)
            ++j;
        o << "group = " << (j - i + 1) << ' ' << fmt_num(c.users[i].mean_gain) << ' ' << fmt_num(c.users[i].rate_target)
          << '\n';
        last_group = c.users[i].group;
        i = j;
    }
    o << "\n[ttsga]\n"
      << "omega = " << fmt_num(c.ttsga.omega) << '\n'
      << "delta = " << fmt_num(c.ttsga.delta) << '\n'
      << "theta_min = " << fmt_num(c.ttsga.theta_min) << '\n'
      << "theta0 = " << fmt_num(c.ttsga.initial_theta()) << '\n'
      << "lambda0 = " << fmt_num(c.ttsga.lambda0) << '\n'
      << "lambda_gain = " << fmt_num(c.ttsga.lambda_gain) << '\n'
      << "cost_sample = " << to_string(c.ttsga.cost_sample) << '\n'
      << "relative_gradient = " << (c.ttsga.relative_gradient ? "true" : "false") << '\n'
      << "exp_a = " << fmt_num(c.schedule.exp_a) << '\n'
      << "exp_b = " << fmt_num(c.schedule.exp_b) << '\n'
      << "exp_c = " << fmt_num(c.schedule.exp_c) << '\n'
      << "scale_a = " << fmt_num(c.schedule.scale_a) << '\n'
      << "scale_b = " << fmt_num(c.schedule.scale_b) << '\n'
      << "scale_c = " << fmt_num(c.schedule.scale_c) << '\n'
      << "\n[channel]\n"
      << "noise_power = " << fmt_num(c.noise_power) << '\n'
      << "bandwidth = " << fmt_num(c.bandwidth) << '\n'
      << "packet_bits = " << fmt_num(c.packet_bits) << '\n'
      << "\n[run]\n"
      << "horizon = " << c.horizon << '\n'
      << "replications = " << c.replications << '\n'
      << "seed = " << c.seed << '\n'
      << "mode = " << to_string(c.mode) << '\n'
      << "power_mode = " << to_string(c.power_mode) << '\n'
      << "constant_power = " << fmt_num(c.constant_power) << '\n'
      << "phase_order = " << to_string(c.phase_order) << '\n'
      << "sample_interval = " << c.sample_interval << '\n'
      << "\n[protocol]\n"
      << "rts = " << fmt_num(c.timing.rts) << '\n'
      << "cts = " << fmt_num(c.timing.cts) << '\n'
      << "data = " << fmt_num(c.timing.data) << '\n'
      << "ack = " << fmt_num(c.timing.ack) << '\n'
      << "timeout = " << fmt_num(c.timing.timeout) << '\n'
      << "idle_gap = " << fmt_num(c.timing.idle_gap) << '\n'
      << "rts_energy_fraction = " << fmt_num(c.timing.rts_energy_fraction) << '\n';
    if (rc.gates.rate_tolerance || rc.gates.theta_tolerance || rc.gates.power_tolerance) {
        o << "\n[gates]\n";
        if (rc.gates.rate_tolerance) o << "rate_tolerance = " << fmt_num(*rc.gates.rate_tolerance) << '\n';
        if (rc.gates.theta_tolerance) o << "theta_tolerance = " << fmt_num(*rc.gates.theta_tolerance) << '\n';
        if (rc.gates.power_tolerance) o << "power_tolerance = " << fmt_num(*rc.gates.power_tolerance) << '\n';
    }
    return o.str();
}

}  // namespace rcra

#endif  // RCRA_CONFIG_HPP_
