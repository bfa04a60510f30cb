#ifndef RCRA_PROTOCOL_HPP_
#define RCRA_PROTOCOL_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rcra/access.hpp"
#include "rcra/channel.hpp"
#include "rcra/random.hpp"
#include "rcra/scenario.hpp"
#include "rcra/ttsga.hpp"

namespace rcra {

/// Result of one RTS/CTS/DATA/ACK contention round.
struct RoundOutcome {
    std::uint64_t round = 0;
    std::vector<std::size_t> contenders;
    std::optional<std::size_t> winner;
    std::vector<bool> success;           // J per user; true only for the winner
    std::vector<double> delivered_bits;  // whole packets only
    std::vector<double> packets_sent;
    std::vector<double> energy;  // RTS energy for every contender, plus data energy for the winner
    std::vector<double> intended_bits;  // U the winner computed from the CSI in its CTS
    double duration = 0.0;
    bool ack = false;
};

/// Resolves a round from the users' intents. A lone RTS is answered with
/// a CTS carrying that user's CSI; the user sends floor(U / ell) packets
/// and is acknowledged. Two or more RTS go unanswered and time out.
/// Deferral on an overheard CTS needs no modelling in a single cell: the
/// other users simply do not transmit this round.
inline RoundOutcome resolve_round(const std::vector<Intent>& intents, const FrameTiming& timing, double packet_bits,
                                  std::uint64_t round) {
    const std::size_t n_users = intents.size();
    RoundOutcome out;
    out.round = round;
    out.success.assign(n_users, false);
    out.delivered_bits.assign(n_users, 0.0);
    out.packets_sent.assign(n_users, 0.0);
    out.energy.assign(n_users, 0.0);
    out.intended_bits.assign(n_users, 0.0);
    for (std::size_t i = 0; i < n_users; ++i) {
        if (!intents[i].attempt) continue;
        out.contenders.push_back(i);
        out.energy[i] += timing.rts_energy_fraction * intents[i].power * timing.data;
    }
    if (out.contenders.empty()) {
        out.duration = timing.idle_gap;
    } else if (out.contenders.size() == 1) {
        const std::size_t w = out.contenders.front();
        out.winner = w;
        out.ack = true;
        out.success[w] = true;
        out.intended_bits[w] = intents[w].rate * timing.data;
        out.packets_sent[w] = std::floor(out.intended_bits[w] / packet_bits);
        out.delivered_bits[w] = out.packets_sent[w] * packet_bits;
        out.energy[w] += intents[w].power * timing.data;
        out.duration = timing.success_length();
    } else {
        out.duration = timing.collision_length();
    }
    return out;
}

/// One contention round: draw intents, resolve, and feed every user's
/// iterates. Rate targets are charged per unit of elapsed time, so the
/// multiplier enforces the target as a rate over wall time.
inline RoundOutcome contention_round(std::vector<UserState>& users, const std::vector<ChannelModel>& channels,
                                     const FrameTiming& timing, double packet_bits, std::uint64_t n, Rng& rng,
                                     AccessContext& ctx) {
    const auto intents = draw_intents(users, channels, n, rng, ctx);
    RoundOutcome out = resolve_round(intents, timing, packet_bits, n);
    for (std::size_t i = 0; i < users.size(); ++i) {
        const SlotFeedback fb{intents[i].phase, intents[i].attempt, out.success[i],         out.delivered_bits[i],
                              out.energy[i],    out.duration,       channels[i].bandwidth(),
                              false};
        apply_feedback(users[i], fb, n, ctx.schedule, ctx.params);
        if (!is_odd(n)) close_epoch(users[i], n - 1, ctx.schedule, ctx.params);
    }
    return out;
}

/// Single replication in protocol mode; `horizon` counts rounds.
inline Metrics run_protocol_replication(const ScenarioConfig& cfg, std::uint64_t seed) {
    const auto channels = cfg.channels();
    std::vector<UserState> users = initial_users(cfg);
    AccessContext ctx = AccessContext::from(cfg);
    Rng rng{seed};
    MetricsRecorder rec{users.size(), cfg.horizon, cfg.sample_interval};
    std::vector<double> duration(users.size());
    for (std::uint64_t n = 1; n <= cfg.horizon; ++n) {
        RoundOutcome r = contention_round(users, channels, cfg.timing, cfg.packet_bits, n, rng, ctx);
        std::fill(duration.begin(), duration.end(), r.duration);
        rec.record(n, users, r.delivered_bits, r.energy, duration);
    }
    return rec.finish(users);
}

inline Metrics run_protocol(const ScenarioConfig& cfg) {
    cfg.validate();
    std::vector<Metrics> runs;
    for (int r = 0; r < cfg.replications; ++r) runs.push_back(run_protocol_replication(cfg, cfg.seed + r));
    return average_metrics(runs);
}

}  // namespace rcra

#endif  // RCRA_PROTOCOL_HPP_
