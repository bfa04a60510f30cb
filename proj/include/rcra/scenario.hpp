#ifndef RCRA_SCENARIO_HPP_
#define RCRA_SCENARIO_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcra/channel.hpp"
#include "rcra/ttsga.hpp"

namespace rcra {

struct UserSpec {
    double mean_gain;    // linear
    double rate_target;  // bits per second (= bits per slot)
    int group = 0;
};

enum class PowerMode { waterfilling, constant };
enum class SimMode { slotted, protocol };

/// How a user orders the plus and minus slot of each perturbation pair.
/// `parity` is the literal odd-plus / even-minus pattern shared by all
/// users; `random` draws the order per user per pair so one user's
/// perturbation is uncorrelated with the others'.
enum class PhaseOrder { random, parity };

/// Durations of the frames in one contention round. Rounds are counted in
/// units where the data part of a round lasts `data`.
struct FrameTiming {
    double rts = 0.01;
    double cts = 0.01;
    double data = 1.0;
    double ack = 0.01;
    double timeout = 0.02;   // wait after an unanswered RTS
    double idle_gap = 0.01;  // length of a round nobody contends in
    double rts_energy_fraction = 0.01;  // RTS energy relative to the data energy

    double success_length() const { return rts + cts + data + ack; }
    double collision_length() const { return rts + timeout; }

    /// Timing under which a round costs exactly one slot whatever happens.
    static FrameTiming degenerate() { return {0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0}; }

    void validate() const {
        if (!(rts >= 0.0 && cts >= 0.0 && ack >= 0.0 && rts_energy_fraction >= 0.0))
            throw std::invalid_argument("timing: rts, cts, ack and rts_energy_fraction must be >= 0");
        if (!(data > 0.0 && timeout > 0.0 && idle_gap > 0.0))
            throw std::invalid_argument("timing: data, timeout and idle_gap must be > 0");
    }
};

struct ScenarioConfig {
    std::vector<UserSpec> users;
    TtsgaParams ttsga;
    StepSchedule schedule;
    std::uint64_t horizon = 100000;
    int replications = 20;
    std::uint64_t seed = 1;
    PowerMode power_mode = PowerMode::waterfilling;
    double constant_power = 1.0;  // watts, used when power_mode == constant
    SimMode mode = SimMode::slotted;
    PhaseOrder phase_order = PhaseOrder::random;
    double noise_power = kDefaultNoisePower;
    double bandwidth = kDefaultBandwidth;
    double packet_bits = 2000.0;
    std::uint64_t sample_interval = 100;
    FrameTiming timing;

    void validate() const {
        if (users.empty()) throw std::invalid_argument("config: at least one user is required");
        for (std::size_t i = 0; i < users.size(); ++i) {
            if (!(users[i].mean_gain > 0.0))
                throw std::invalid_argument("config: user " + std::to_string(i) + " mean_gain must be > 0");
            if (!(users[i].rate_target > 0.0))
                throw std::invalid_argument("config: user " + std::to_string(i) + " rate_target must be > 0");
        }
        ttsga.validate();
        schedule.validate();
        if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
        if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
        if (power_mode == PowerMode::constant && !(constant_power > 0.0))
            throw std::invalid_argument("config: constant_power must be > 0");
        if (!(noise_power > 0.0)) throw std::invalid_argument("config: noise_power must be > 0");
        if (!(bandwidth > 0.0)) throw std::invalid_argument("config: bandwidth must be > 0");
        if (!(packet_bits > 0.0)) throw std::invalid_argument("config: packet_bits must be > 0");
        if (sample_interval < 1) throw std::invalid_argument("config: sample_interval must be >= 1");
        timing.validate();
    }

    std::vector<ChannelModel> channels() const {
        std::vector<ChannelModel> out;
        out.reserve(users.size());
        for (const auto& u : users) out.push_back(default_channel(u.mean_gain, noise_power, bandwidth));
        return out;
    }
};

inline std::vector<UserState> initial_users(const ScenarioConfig& cfg) {
    std::vector<UserState> users;
    users.reserve(cfg.users.size());
    for (const auto& u : cfg.users)
        users.emplace_back(cfg.ttsga, u.rate_target, lambda_unit(cfg.noise_power, u.mean_gain, u.rate_target));
    return users;
}

struct UserSummary {
    double converged_theta = 0.0;  // mean of theta over the final 5% of slots
    double lambda = 0.0;           // final threshold
    double achieved_rate = 0.0;    // bits per unit time, whole run
    double achieved_power = 0.0;   // watts, whole run
    double tail_rate = 0.0;        // same, final 5% of slots
    double tail_power = 0.0;
    double target_rate = 0.0;
};

struct TimePoint {
    std::uint64_t slot;
    std::vector<double> theta;
    std::vector<double> lambda;
    std::vector<double> rate_avg;
    std::vector<double> power_avg;
};

/// Time series plus end-of-run summary; after `run_scenario` every value
/// is the mean over replications.
struct Metrics {
    std::vector<TimePoint> series;
    std::vector<UserSummary> summary;
    int replications = 0;
};

/// Fold of per-replication metrics into their mean. Replications must have
/// identical shapes.
inline Metrics average_metrics(const std::vector<Metrics>& runs) {
    if (runs.empty()) throw std::invalid_argument("average_metrics: nothing to average");
    Metrics out = runs.front();
    const double inv = 1.0 / static_cast<double>(runs.size());
    auto scale_all = [inv](std::vector<double>& v) {
        for (double& x : v) x *= inv;
    };
    for (std::size_t r = 1; r < runs.size(); ++r) {
        const Metrics& m = runs[r];
        if (m.series.size() != out.series.size() || m.summary.size() != out.summary.size())
            throw std::invalid_argument("average_metrics: replication shapes differ");
        for (std::size_t t = 0; t < out.series.size(); ++t) {
            for (std::size_t i = 0; i < out.series[t].theta.size(); ++i) {
                out.series[t].theta[i] += m.series[t].theta[i];
                out.series[t].lambda[i] += m.series[t].lambda[i];
                out.series[t].rate_avg[i] += m.series[t].rate_avg[i];
                out.series[t].power_avg[i] += m.series[t].power_avg[i];
            }
        }
        for (std::size_t i = 0; i < out.summary.size(); ++i) {
            auto& a = out.summary[i];
            const auto& b = m.summary[i];
            a.converged_theta += b.converged_theta;
            a.lambda += b.lambda;
            a.achieved_rate += b.achieved_rate;
            a.achieved_power += b.achieved_power;
            a.tail_rate += b.tail_rate;
            a.tail_power += b.tail_power;
        }
    }
    for (auto& tp : out.series) {
        scale_all(tp.theta);
        scale_all(tp.lambda);
        scale_all(tp.rate_avg);
        scale_all(tp.power_avg);
    }
    for (auto& s : out.summary) {
        s.converged_theta *= inv;
        s.lambda *= inv;
        s.achieved_rate *= inv;
        s.achieved_power *= inv;
        s.tail_rate *= inv;
        s.tail_power *= inv;
    }
    out.replications = static_cast<int>(runs.size());
    return out;
}

/// Accumulates time series and tail statistics while a run progresses.
class MetricsRecorder {
public:
    MetricsRecorder(std::size_t num_users, std::uint64_t horizon, std::uint64_t sample_interval)
        : horizon_{horizon},
          interval_{sample_interval},
          tail_start_{horizon - (horizon + 19) / 20},
          theta_tail_(num_users, 0.0),
          rate_tail_(num_users, 0.0),
          power_tail_(num_users, 0.0),
          time_tail_(num_users, 0.0) {}

    /// Call after slot n (1-based) has been fully applied. `rate` and
    /// `energy` are what the user delivered and spent in that slot.
    void record(std::uint64_t n, const std::vector<UserState>& users, const std::vector<double>& rate,
                const std::vector<double>& energy, const std::vector<double>& duration) {
        if (n > tail_start_) {
            ++tail_slots_;
            for (std::size_t i = 0; i < users.size(); ++i) {
                theta_tail_[i] += users[i].theta;
                rate_tail_[i] += rate[i];
                power_tail_[i] += energy[i];
                time_tail_[i] += duration[i];
            }
        }
        if (n % interval_ == 0 || n == horizon_) {
            TimePoint tp{n, {}, {}, {}, {}};
            for (const auto& u : users) {
                tp.theta.push_back(u.theta);
                tp.lambda.push_back(u.lambda_lm);
                tp.rate_avg.push_back(u.achieved_rate_avg());
                tp.power_avg.push_back(u.achieved_power_avg());
            }
            series_.push_back(std::move(tp));
        }
    }

    Metrics finish(const std::vector<UserState>& users) const {
        Metrics m;
        m.series = series_;
        m.replications = 1;
        for (std::size_t i = 0; i < users.size(); ++i) {
            UserSummary s;
            s.converged_theta = tail_slots_ ? theta_tail_[i] / static_cast<double>(tail_slots_) : users[i].theta;
            s.lambda = users[i].lambda_lm;
            s.achieved_rate = users[i].achieved_rate_avg();
            s.achieved_power = users[i].achieved_power_avg();
            s.tail_rate = time_tail_[i] > 0.0 ? rate_tail_[i] / time_tail_[i] : 0.0;
            s.tail_power = time_tail_[i] > 0.0 ? power_tail_[i] / time_tail_[i] : 0.0;
            s.target_rate = users[i].rate_target;
            m.summary.push_back(s);
        }
        return m;
    }

private:
    std::uint64_t horizon_;
    std::uint64_t interval_;
    std::uint64_t tail_start_;
    std::uint64_t tail_slots_ = 0;
    std::vector<double> theta_tail_;
    std::vector<double> rate_tail_;
    std::vector<double> power_tail_;
    std::vector<double> time_tail_;
    std::vector<TimePoint> series_;
};

}  // namespace rcra

#endif  // RCRA_SCENARIO_HPP_
