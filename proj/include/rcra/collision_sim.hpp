#ifndef RCRA_COLLISION_SIM_HPP_
#define RCRA_COLLISION_SIM_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rcra/access.hpp"
#include "rcra/channel.hpp"
#include "rcra/protocol.hpp"
#include "rcra/random.hpp"
#include "rcra/scenario.hpp"
#include "rcra/ttsga.hpp"

namespace rcra {

/// Broadcast (0, 1, e) symbol, also used per user: a user that did not
/// attempt sees `idle` from its own point of view.
enum class Feedback { idle, success, collision };

struct UserSlot {
    bool attempted = false;
    Feedback feedback = Feedback::idle;
    double rate_delivered = 0.0;  // bits
    double power_spent = 0.0;     // watts (slot length 1)
    Phase phase = Phase::plus;
    std::size_t state_index = 0;
};

struct SlotOutcome {
    std::uint64_t slot = 0;
    Feedback broadcast = Feedback::idle;
    std::vector<UserSlot> users;
};

/// Collision rule: exactly one attempt succeeds, two or more all fail.
/// Every attempt spends its power whether or not it succeeds.
inline SlotOutcome resolve_slot(const std::vector<Intent>& intents, std::uint64_t n) {
    SlotOutcome out;
    out.slot = n;
    out.users.resize(intents.size());
    std::size_t attempts = 0;
    for (const auto& it : intents) attempts += it.attempt ? 1 : 0;
    out.broadcast = attempts == 0 ? Feedback::idle : attempts == 1 ? Feedback::success : Feedback::collision;
    for (std::size_t i = 0; i < intents.size(); ++i) {
        UserSlot& u = out.users[i];
        u.phase = intents[i].phase;
        u.state_index = intents[i].channel.state_index;
        u.attempted = intents[i].attempt;
        if (!u.attempted) continue;
        u.power_spent = intents[i].power;
        if (attempts == 1) {
            u.feedback = Feedback::success;
            u.rate_delivered = intents[i].rate;
        } else {
            u.feedback = Feedback::collision;
        }
    }
    return out;
}

/// One slot of the slotted system: draw, resolve, update every user.
/// The intended rate drives the multiplier only through J = 1 on success.
inline SlotOutcome run_slot(std::vector<UserState>& users, const std::vector<ChannelModel>& channels,
                            std::uint64_t n, Rng& rng, AccessContext& ctx) {
    const auto intents = draw_intents(users, channels, n, rng, ctx);
    SlotOutcome out = resolve_slot(intents, n);
    for (std::size_t i = 0; i < users.size(); ++i) {
        const UserSlot& s = out.users[i];
        const SlotFeedback fb{s.phase,         s.attempted, s.feedback == Feedback::success, intents[i].rate,
                              s.power_spent,   1.0,         channels[i].bandwidth()};
        apply_feedback(users[i], fb, n, ctx.schedule, ctx.params);
        if (!is_odd(n)) close_epoch(users[i], n - 1, ctx.schedule, ctx.params);
    }
    return out;
}

inline Metrics run_slotted_replication(const ScenarioConfig& cfg, std::uint64_t seed) {
    const auto channels = cfg.channels();
    std::vector<UserState> users = initial_users(cfg);
    AccessContext ctx = AccessContext::from(cfg);
    Rng rng{seed};
    MetricsRecorder rec{users.size(), cfg.horizon, cfg.sample_interval};
    std::vector<double> rate(users.size()), energy(users.size()), duration(users.size(), 1.0);
    for (std::uint64_t n = 1; n <= cfg.horizon; ++n) {
        SlotOutcome s = run_slot(users, channels, n, rng, ctx);
        for (std::size_t i = 0; i < users.size(); ++i) {
            rate[i] = s.users[i].rate_delivered;
            energy[i] = s.users[i].power_spent;
        }
        rec.record(n, users, rate, energy, duration);
    }
    return rec.finish(users);
}

/// Replication r runs with seed + r; the result is the replication mean.
inline Metrics run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    if (cfg.mode == SimMode::protocol) return run_protocol(cfg);
    std::vector<Metrics> runs;
    runs.reserve(static_cast<std::size_t>(cfg.replications));
    for (int r = 0; r < cfg.replications; ++r) runs.push_back(run_slotted_replication(cfg, cfg.seed + r));
    return average_metrics(runs);
}

inline constexpr int kScenarioGroupSize = 10;
inline constexpr double kBaseRate = 50e3;     // bits/s
inline constexpr double kBaseGain = 0.4698;   // -3.28 dB
inline constexpr double kScenarioDelta = 0.03;

/// Paper-scale defaults: 20 users in two groups of 10, omega 0.1,
/// 10^5 slots, 20 replications. delta 0.03 is wide enough for the weakest
/// channel (mean gain 0.05) to settle at omega within the horizon.
inline ScenarioConfig two_group_config(double g1_gain, double g1_rate, double g2_gain, double g2_rate) {
    ScenarioConfig cfg;
    cfg.ttsga.omega = 0.1;
    cfg.ttsga.delta = kScenarioDelta;
    for (int i = 0; i < kScenarioGroupSize; ++i) cfg.users.push_back({g1_gain, g1_rate, 1});
    for (int i = 0; i < kScenarioGroupSize; ++i) cfg.users.push_back({g2_gain, g2_rate, 2});
    return cfg;
}

inline std::vector<double> scenario1_rates() {
    std::vector<double> r;
    for (int k = 0; k < 7; ++k) r.push_back(50e3 + 10e3 * k);
    return r;
}

inline std::vector<double> scenario2_gains() { return {0.05, 0.1422, 0.2877, 0.4698, 0.6934, 0.9817, 1.3867}; }

/// Rate variation: group 2's target sweeps 50..110 kbps.
inline std::vector<ScenarioConfig> scenario1_configs() {
    std::vector<ScenarioConfig> out;
    for (double r : scenario1_rates()) out.push_back(two_group_config(kBaseGain, kBaseRate, kBaseGain, r));
    return out;
}

/// Channel variation: group 2's mean gain sweeps 0.05..1.3867.
inline std::vector<ScenarioConfig> scenario2_configs() {
    std::vector<ScenarioConfig> out;
    for (double g : scenario2_gains()) out.push_back(two_group_config(kBaseGain, kBaseRate, g, kBaseRate));
    return out;
}

/// Trace of the multiplier with the transmission probability frozen: a
/// lone user whose transmissions succeed with probability `beta`.
struct FixedThetaRun {
    std::vector<double> lambda;  // after every slot
    double achieved_rate = 0.0;
    double achieved_power = 0.0;
};

inline FixedThetaRun run_fixed_theta(const ChannelModel& channel, double beta, double rate_target,
                                     const StepSchedule& schedule, double lambda_gain, std::uint64_t horizon,
                                     std::uint64_t seed, double lambda0 = 0.0) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("run_fixed_theta: beta must be in (0, 1]");
    schedule.validate();
    Rng rng{seed};
    FixedThetaRun out;
    out.lambda.reserve(horizon);
    const double k = lambda_gain * lambda_unit(channel.noise_power(), channel.mean_gain(), rate_target);
    double lambda = lambda0, bits = 0.0, energy = 0.0;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        const ChannelSample x = sample_state(channel, rng);
        const double p = waterfill_power(lambda, x.state_gain, channel);
        const double u = rate(p, x.state_gain, channel);
        const bool success = rng.bernoulli(beta) && p > 0.0;
        if (success) {
            bits += u;
            energy += p;
        }
        lambda = update_lambda(lambda, steps(schedule, n).a, success, u * k, rate_target * k);
        out.lambda.push_back(lambda);
    }
    out.achieved_rate = bits / static_cast<double>(horizon);
    out.achieved_power = energy / static_cast<double>(horizon);
    return out;
}

}  // namespace rcra

#endif  // RCRA_COLLISION_SIM_HPP_
