#ifndef RCRA_TTSGA_HPP_
#define RCRA_TTSGA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rcra {

/// Step sizes a_n = scale_a n^-exp_a (multiplier), b_n (cost averages)
/// and c_n (transmission probability). The exponents order the three
/// timescales: a fastest, c slowest.
struct StepSchedule {
    double exp_a = 0.6;
    double exp_b = 0.8;
    double exp_c = 1.0;
    double scale_a = 1.0;
    double scale_b = 1.0;
    double scale_c = 1.0;

    void validate() const {
        if (!(0.5 < exp_a && exp_a < exp_b && exp_b < exp_c && exp_c <= 1.0))
            throw std::invalid_argument("schedule: need 0.5 < exp_a < exp_b < exp_c <= 1");
        if (!(scale_a > 0.0 && scale_b > 0.0 && scale_c > 0.0))
            throw std::invalid_argument("schedule: scales must be > 0");
    }
};

struct Steps {
    double a;
    double b;
    double c;
};

inline Steps steps(const StepSchedule& s, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("steps: slot index starts at 1");
    const double x = static_cast<double>(n);
    return {s.scale_a * std::pow(x, -s.exp_a), s.scale_b * std::pow(x, -s.exp_b),
            s.scale_c * std::pow(x, -s.exp_c)};
}

/// Side of the finite-difference perturbation a slot belongs to.
enum class Phase { plus, minus };

/// Sample fed into the plus/minus cost averages.
///
/// `power` is the bare power spent. At a fixed multiplier its finite
/// difference is always positive, so it walks theta down to theta_min.
/// `lagrangian` charges the waterfilling price lambda ln2 / W for each
/// bit/s the attempt carries, P - lambda ln2 U / W on attempts, whose
/// finite difference estimates the slope of the minimum power in theta.
/// When U is only learned on success (protocol mode) the delivered bits are
/// divided by the user's own clear-attempt ratio instead.
enum class CostSample { power, lagrangian };

/// Per-user algorithm constants.
struct TtsgaParams {
    double omega = 0.1;       // upper bound on the transmission probability
    double delta = 0.005;     // finite-difference perturbation
    double theta_min = 1e-3;  // lower bound, keeps the iterate off zero
    double theta0 = -1.0;     // initial probability; negative means omega / 2
    double lambda0 = 0.0;     // watts
    double lambda_gain = 0.25;  // multiplier step per unit relative rate error, in units of noise / mean gain

    CostSample cost_sample = CostSample::lagrangian;
    /// Divide the finite difference by the user's running power level.
    bool relative_gradient = true;

    double initial_theta() const { return theta0 < 0.0 ? omega / 2.0 : theta0; }

    void validate() const {
        if (!(omega > 0.0 && omega <= 1.0)) throw std::invalid_argument("ttsga: omega must be in (0, 1]");
        if (!(delta > 0.0)) throw std::invalid_argument("ttsga: delta must be > 0");
        if (!(theta_min > 0.0)) throw std::invalid_argument("ttsga: theta_min must be > 0");
        if (!(theta_min + delta <= omega - delta))
            throw std::invalid_argument("ttsga: perturbation window infeasible (need theta_min + delta <= omega - delta)");
        const double t0 = initial_theta();
        if (!(t0 >= theta_min && t0 <= omega))
            throw std::invalid_argument("ttsga: theta0 must lie in [theta_min, omega]");
        if (!(lambda0 >= 0.0)) throw std::invalid_argument("ttsga: lambda0 must be >= 0");
        if (!(lambda_gain > 0.0)) throw std::invalid_argument("ttsga: lambda_gain must be > 0");
    }
};

/// Projection onto [theta_min, omega].
inline double project_theta(double theta, double theta_min, double omega) {
    return std::clamp(theta, theta_min, omega);
}

/// Multiplier (waterfilling threshold) step:
/// max(0, lambda - a (J U - target)). `rate` and `target` share units.
inline double update_lambda(double lambda, double a, bool success, double rate, double target) {
    const double delivered = success ? rate : 0.0;
    return std::max(0.0, lambda - a * (delivered - target));
}

/// Stochastic averaging step A + b (sample - A).
inline double update_average(double avg, double b, double sample) { return avg + b * (sample - avg); }

/// Power average step; the sample is the power spent, zero without a
/// transmission.
inline double update_power_avg(double avg, double b, bool transmitted, double power_spent) {
    return update_average(avg, b, transmitted ? power_spent : 0.0);
}

/// Projected finite-difference step on the transmission probability.
inline double update_theta(double theta, double c, double cost_plus, double cost_minus, double delta, double omega,
                           double theta_min) {
    const double gradient = (cost_plus - cost_minus) / (2.0 * delta);
    return project_theta(theta - c * gradient, theta_min, omega);
}

/// Literal slot pattern: odd slots perturb up, even slots down.
inline Phase parity_phase(std::uint64_t n) { return (n & 1u) == 1u ? Phase::plus : Phase::minus; }

inline double effective_prob(double theta, Phase phase, double delta, double omega, double theta_min) {
    return project_theta(phase == Phase::plus ? theta + delta : theta - delta, theta_min, omega);
}

/// Watts of multiplier step per bit/s of rate error when lambda_gain is 1:
/// noise power over mean gain, per unit of target rate.
inline double lambda_unit(double noise_power, double mean_gain, double rate_target) {
    return noise_power / (mean_gain * rate_target);
}

/// Iterates of one user.
struct UserState {
    double theta = 0.0;
    double lambda_lm = 0.0;
    double pavg_plus = 0.0;    // power average over plus-phase slots
    double pavg_minus = 0.0;   // same, minus-phase slots
    double cost_plus = 0.0;    // cost-sample average over plus-phase slots
    double cost_minus = 0.0;   // same, minus-phase slots
    double power_level = 0.0;  // running power average over all slots
    double clear_ratio = 1.0;  // running fraction of attempts that went through
    double rate_target = 0.0;  // bits per unit time
    double unit = 0.0;         // lambda step per bit of rate error (before gain)
    std::uint64_t slot_count = 0;
    double rate_sum = 0.0;   // bits delivered
    double power_sum = 0.0;  // energy spent
    double time_sum = 0.0;   // elapsed time (slots, or frame time in protocol mode)

    UserState() = default;
    UserState(const TtsgaParams& p, double target, double step_unit)
        : theta{p.initial_theta()}, lambda_lm{p.lambda0}, rate_target{target}, unit{step_unit} {}

    double& pavg(Phase ph) { return ph == Phase::plus ? pavg_plus : pavg_minus; }
    double& cost(Phase ph) { return ph == Phase::plus ? cost_plus : cost_minus; }

    double achieved_rate_avg() const { return time_sum > 0.0 ? rate_sum / time_sum : 0.0; }
    double achieved_power_avg() const { return time_sum > 0.0 ? power_sum / time_sum : 0.0; }
};

/// Per-slot (or per-round) feedback applied to one user's iterates.
struct SlotFeedback {
    Phase phase;
    bool attempted;
    bool success;
    double rate;          // bits that were or would have been delivered
    double power_spent;   // energy charged this slot
    double duration = 1;  // time the slot occupied
    double bandwidth = 1;  // Hz, converts the multiplier into a price per bit
    bool rate_known = true;  // U was known before the attempt, not only on success
};

/// Multiplier, cost-average and bookkeeping updates for slot n. The
/// target is charged per unit of elapsed time.
inline void apply_feedback(UserState& u, const SlotFeedback& fb, std::uint64_t n, const StepSchedule& sched,
                           const TtsgaParams& p) {
    const Steps st = steps(sched, n);
    const double target = u.rate_target * fb.duration;
    const double delivered = fb.success ? fb.rate : 0.0;
    if (fb.attempted) u.clear_ratio = update_average(u.clear_ratio, st.b, fb.success ? 1.0 : 0.0);
    double cost = fb.power_spent;
    if (p.cost_sample == CostSample::lagrangian) {
        const double price = u.lambda_lm * std::log(2.0) / fb.bandwidth;
        if (fb.rate_known) {
            if (fb.attempted) cost -= price * fb.rate;
        } else if (u.clear_ratio > 0.0) {
            cost -= price * delivered / u.clear_ratio;
        }
    }
    const double k = p.lambda_gain * u.unit;
    u.lambda_lm = update_lambda(u.lambda_lm, st.a, fb.success, fb.rate * k, target * k);
    u.pavg(fb.phase) = update_power_avg(u.pavg(fb.phase), st.b, fb.attempted, fb.power_spent);
    u.cost(fb.phase) = update_average(u.cost(fb.phase), st.b, cost);
    u.power_level = update_average(u.power_level, st.b, fb.power_spent);
    u.slot_count = n;
    u.time_sum += fb.duration;
    if (fb.success) u.rate_sum += fb.rate;
    u.power_sum += fb.power_spent;
}

/// Theta step closing the perturbation pair that started at `odd_slot`.
inline void close_epoch(UserState& u, std::uint64_t odd_slot, const StepSchedule& sched, const TtsgaParams& p) {
    double c = steps(sched, odd_slot).c;
    if (p.relative_gradient) c = u.power_level > 0.0 ? c / u.power_level : 0.0;
    if (p.cost_sample == CostSample::power)
        u.theta = update_theta(u.theta, c, u.pavg_plus, u.pavg_minus, p.delta, p.omega, p.theta_min);
    else
        u.theta = update_theta(u.theta, c, u.cost_plus, u.cost_minus, p.delta, p.omega, p.theta_min);
}

}  // namespace rcra

#endif  // RCRA_TTSGA_HPP_
