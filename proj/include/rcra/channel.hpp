#ifndef RCRA_CHANNEL_HPP_
#define RCRA_CHANNEL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rcra/random.hpp"

namespace rcra {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Eight-bin quantizer for an exponentially distributed power gain.
namespace default_bins {
inline constexpr std::array<double, 7> boundaries_db{-8.47, -5.41, -3.28, -1.59, -0.08, 1.42, 3.18};
inline constexpr std::array<double, 8> states_db{-13.0, -8.47, -5.41, -3.28, -1.59, -0.08, 1.42, 3.18};
}  // namespace default_bins

inline constexpr double kDefaultBandwidth = 10e6;  // Hz
inline constexpr double kDefaultNoisePower = 1.0;  // N0 * W, watts

/// Block-fading channel of one user: |H|^2 is exponential with mean
/// `mean_gain`, quantized into bins whose representative gains are used
/// for power allocation and rate.
///
/// K representative states come with K-1 boundaries partitioning (0, inf).
/// A single-state model has no boundaries and every draw lands in bin 0.
class ChannelModel {
public:
    ChannelModel(double mean_gain, std::vector<double> boundaries, std::vector<double> states,
                 double noise_density, double bandwidth)
        : mean_gain_{mean_gain},
          boundaries_{std::move(boundaries)},
          states_{std::move(states)},
          noise_density_{noise_density},
          bandwidth_{bandwidth} {
        if (!(mean_gain_ > 0.0)) throw std::invalid_argument("channel: mean_gain must be > 0");
        if (!(noise_density_ > 0.0)) throw std::invalid_argument("channel: noise_density must be > 0");
        if (!(bandwidth_ > 0.0)) throw std::invalid_argument("channel: bandwidth must be > 0");
        if (states_.empty()) throw std::invalid_argument("channel: need at least one state");
        if (boundaries_.size() + 1 != states_.size())
            throw std::invalid_argument("channel: need exactly one boundary fewer than states");
        for (std::size_t k = 0; k < states_.size(); ++k) {
            if (!(states_[k] > 0.0)) throw std::invalid_argument("channel: states must be > 0");
            if (k > 0 && !(states_[k] > states_[k - 1]))
                throw std::invalid_argument("channel: states must be strictly increasing");
        }
        for (std::size_t k = 0; k < boundaries_.size(); ++k) {
            if (!(boundaries_[k] > 0.0)) throw std::invalid_argument("channel: boundaries must be > 0");
            if (k > 0 && !(boundaries_[k] > boundaries_[k - 1]))
                throw std::invalid_argument("channel: boundaries must be strictly increasing");
        }
        probs_.resize(states_.size());
        double lo_tail = 1.0;  // P(X >= lo)
        for (std::size_t k = 0; k < states_.size(); ++k) {
            double hi_tail = k < boundaries_.size() ? std::exp(-boundaries_[k] / mean_gain_) : 0.0;
            probs_[k] = lo_tail - hi_tail;
            lo_tail = hi_tail;
        }
    }

    double mean_gain() const { return mean_gain_; }
    const std::vector<double>& bin_boundaries() const { return boundaries_; }
    const std::vector<double>& bin_states() const { return states_; }
    const std::vector<double>& bin_probs() const { return probs_; }
    double noise_density() const { return noise_density_; }
    double bandwidth() const { return bandwidth_; }
    /// Total in-band noise N0 * W.
    double noise_power() const { return noise_density_ * bandwidth_; }
    std::size_t num_states() const { return states_.size(); }

    /// Bin containing a raw gain; bins are [lo, hi).
    std::size_t bin_of(double raw_gain) const {
        return static_cast<std::size_t>(
            std::upper_bound(boundaries_.begin(), boundaries_.end(), raw_gain) - boundaries_.begin());
    }

private:
    double mean_gain_;
    std::vector<double> boundaries_;
    std::vector<double> states_;
    std::vector<double> probs_;
    double noise_density_;
    double bandwidth_;
};

/// The fixed eight-bin quantizer (boundaries -8.47 .. 3.18 dB, states
/// -13 .. 3.18 dB). Bin probabilities follow from `mean_gain`.
inline ChannelModel default_channel(double mean_gain, double noise_power = kDefaultNoisePower,
                                    double bandwidth = kDefaultBandwidth) {
    if (!(mean_gain > 0.0)) throw std::invalid_argument("default_channel: mean_gain must be > 0");
    std::vector<double> bounds, states;
    for (double db : default_bins::boundaries_db) bounds.push_back(db_to_linear(db));
    for (double db : default_bins::states_db) states.push_back(db_to_linear(db));
    return ChannelModel{mean_gain, std::move(bounds), std::move(states), noise_power / bandwidth, bandwidth};
}

struct ChannelSample {
    double raw_gain;
    std::size_t state_index;
    double state_gain;
};

inline ChannelSample quantize(const ChannelModel& model, double raw_gain) {
    std::size_t k = model.bin_of(raw_gain);
    return {raw_gain, k, model.bin_states()[k]};
}

inline ChannelSample sample_state(const ChannelModel& model, Rng& rng) {
    return quantize(model, rng.exponential(model.mean_gain()));
}

/// Waterfilling allocation max(0, lambda - N0W / x).
inline double waterfill_power(double lambda, double state_gain, double noise_power) {
    return std::max(0.0, lambda - noise_power / state_gain);
}

inline double waterfill_power(double lambda, double state_gain, const ChannelModel& model) {
    return waterfill_power(lambda, state_gain, model.noise_power());
}

/// Capacity W log2(1 + P x / (N0 W)) in bits per unit-length slot.
inline double rate(double power, double state_gain, const ChannelModel& model) {
    if (power <= 0.0) return 0.0;
    return model.bandwidth() * std::log2(1.0 + power * state_gain / model.noise_power());
}

/// Power that delivers `bits` in state x: inverse of `rate`.
inline double power_for_rate(double bits, double state_gain, const ChannelModel& model) {
    if (bits <= 0.0) return 0.0;
    return model.noise_power() / state_gain * std::expm1(bits / model.bandwidth() * std::log(2.0));
}

}  // namespace rcra

#endif  // RCRA_CHANNEL_HPP_
