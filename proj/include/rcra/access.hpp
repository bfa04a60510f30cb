#ifndef RCRA_ACCESS_HPP_
#define RCRA_ACCESS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rcra/channel.hpp"
#include "rcra/random.hpp"
#include "rcra/scenario.hpp"
#include "rcra/ttsga.hpp"

namespace rcra {

/// Per-run state shared by the slotted and the frame-level engines.
struct AccessContext {
    TtsgaParams params;
    StepSchedule schedule;
    PowerMode power_mode = PowerMode::waterfilling;
    double constant_power = 1.0;
    PhaseOrder phase_order = PhaseOrder::random;
    std::vector<bool> plus_first;  // per user, order within the current pair

    static AccessContext from(const ScenarioConfig& cfg) {
        return {cfg.ttsga, cfg.schedule, cfg.power_mode, cfg.constant_power, cfg.phase_order,
                std::vector<bool>(cfg.users.size(), true)};
    }
};

/// What one user intends to do in a slot before the collision rule applies.
struct Intent {
    ChannelSample channel;
    Phase phase;
    double prob;    // effective transmission probability
    bool attempt;   // coin came up; contends even when the waterfilling power is zero
    double power;   // watts it would transmit with
    double rate;    // bits it would deliver if alone
};

inline bool is_odd(std::uint64_t n) { return (n & 1u) == 1u; }

/// Draws channel states, perturbation phases and transmission coins for
/// slot n. Random numbers are consumed in user order: [order bit on odd
/// slots], channel gain, coin.
inline std::vector<Intent> draw_intents(const std::vector<UserState>& users, const std::vector<ChannelModel>& channels,
                                        std::uint64_t n, Rng& rng, AccessContext& ctx) {
    std::vector<Intent> out(users.size());
    const TtsgaParams& p = ctx.params;
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (is_odd(n) && ctx.phase_order == PhaseOrder::random) ctx.plus_first[i] = rng.bernoulli(0.5);
        const bool first = is_odd(n);
        const Phase ph = (first == static_cast<bool>(ctx.plus_first[i])) ? Phase::plus : Phase::minus;
        Intent& it = out[i];
        it.channel = sample_state(channels[i], rng);
        it.phase = ph;
        it.prob = effective_prob(users[i].theta, ph, p.delta, p.omega, p.theta_min);
        it.power = ctx.power_mode == PowerMode::constant
                       ? ctx.constant_power
                       : waterfill_power(users[i].lambda_lm, it.channel.state_gain, channels[i]);
        it.rate = rate(it.power, it.channel.state_gain, channels[i]);
        it.attempt = rng.bernoulli(it.prob);
    }
    return out;
}

}  // namespace rcra

#endif  // RCRA_ACCESS_HPP_
