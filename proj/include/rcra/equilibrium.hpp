#ifndef RCRA_EQUILIBRIUM_HPP_
#define RCRA_EQUILIBRIUM_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcra/channel.hpp"

namespace rcra {

/// Raised when a rate target cannot be met or an equilibrium search fails.
class infeasible_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// beta_i = theta_i * prod_{j != i} (1 - theta_j).
inline double collision_factor(const std::vector<double>& thetas, std::size_t i) {
    if (i >= thetas.size()) throw std::out_of_range("collision_factor: user index out of range");
    double eps = 1.0;
    for (std::size_t j = 0; j < thetas.size(); ++j)
        if (j != i) eps *= 1.0 - thetas[j];
    return eps;
}

inline double success_prob(const std::vector<double>& thetas, std::size_t i) {
    if (i >= thetas.size()) throw std::out_of_range("success_prob: user index out of range");
    for (double t : thetas)
        if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("success_prob: probabilities must be in [0, 1]");
    return thetas[i] * collision_factor(thetas, i);
}

/// Expected bits per successful slot under threshold lambda.
inline double waterfill_rate(const ChannelModel& ch, double lambda) {
    double f = 0.0;
    for (std::size_t k = 0; k < ch.num_states(); ++k) {
        const double x = ch.bin_states()[k];
        f += ch.bin_probs()[k] * rate(waterfill_power(lambda, x, ch), x, ch);
    }
    return f;
}

/// Expected power per transmission under threshold lambda.
inline double waterfill_mean_power(const ChannelModel& ch, double lambda) {
    double p = 0.0;
    for (std::size_t k = 0; k < ch.num_states(); ++k)
        p += ch.bin_probs()[k] * waterfill_power(lambda, ch.bin_states()[k], ch);
    return p;
}

/// Threshold lambda with beta * waterfill_rate(lambda) = rate_target,
/// by bisection to relative residual 1e-8 or better.
inline double single_user_threshold(const ChannelModel& ch, double rate_target, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("single_user_threshold: beta must be in (0, 1]");
    if (!(rate_target > 0.0)) throw std::invalid_argument("single_user_threshold: rate_target must be > 0");
    const double need = rate_target / beta;
    // Below the water level of the best state nothing is transmitted.
    double lo = ch.noise_power() / ch.bin_states().back();
    double hi = std::max(2.0 * lo, 1.0);
    constexpr double kLambdaCap = 1e30;
    while (waterfill_rate(ch, hi) < need) {
        hi *= 2.0;
        if (hi > kLambdaCap)
            throw infeasible_error("single_user_threshold: rate target unreachable at this success probability");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (waterfill_rate(ch, mid) < need ? lo : hi) = mid;
    }
    const double lambda = hi;
    const double residual = std::abs(beta * waterfill_rate(ch, lambda) - rate_target) / rate_target;
    if (residual > 1e-8) throw infeasible_error("single_user_threshold: bisection did not reach 1e-8 residual");
    return lambda;
}

/// Per-state rates at beta = 1 that meet the target exactly.
struct RateProfile {
    std::vector<double> state_rates;  // bits per slot, one per channel state
    double rate_target = 0.0;
    double lambda = 0.0;  // threshold that produced it
};

inline RateProfile rate_profile(const ChannelModel& ch, double rate_target) {
    RateProfile rp;
    rp.rate_target = rate_target;
    rp.lambda = single_user_threshold(ch, rate_target, 1.0);
    for (double x : ch.bin_states()) rp.state_rates.push_back(rate(waterfill_power(rp.lambda, x, ch), x, ch));
    return rp;
}

/// Power needed in successful slots when the beta = 1 profile is stretched
/// by 1/beta: sum_x p(x) (N0W / x) (2^{r(x) / (beta W)} - 1).
inline double useful_power(double beta, const RateProfile& rp, const ChannelModel& ch) {
    if (!(beta > 0.0)) throw std::invalid_argument("useful_power: beta must be > 0");
    double p = 0.0;
    for (std::size_t k = 0; k < ch.num_states(); ++k) {
        const double r = rp.state_rates[k];
        if (r <= 0.0) continue;
        p += ch.bin_probs()[k] * ch.noise_power() / ch.bin_states()[k] *
             std::expm1(r / (beta * ch.bandwidth()) * std::numbers::ln2);
    }
    return p;
}

struct PowerSplit {
    double beta;
    double useful;  // spent in slots that succeed
    double wasted;  // spent in collisions
    double total;   // (theta / beta) * useful
};

/// Average power of user i at probability vector `thetas`. Each attempt
/// costs useful / beta on average; a fraction beta / theta of attempts
/// succeed.
inline PowerSplit power_split(const std::vector<double>& thetas, std::size_t i, const RateProfile& rp,
                              const ChannelModel& ch) {
    const double beta = success_prob(thetas, i);
    if (!(beta > 0.0)) throw infeasible_error("total_power: success probability is zero");
    const double useful = useful_power(beta, rp, ch);
    const double total = thetas[i] / beta * useful;
    return {beta, useful, total - useful, total};
}

inline double total_power(const std::vector<double>& thetas, std::size_t i, const RateProfile& rp,
                          const ChannelModel& ch) {
    return power_split(thetas, i, rp, ch).total;
}

/// Power per unit time: attempts happen with probability theta and each
/// costs useful_power(beta). Equals beta * total_power, which is energy per
/// successful slot. This is the quantity a simulator measures.
inline double average_power(const std::vector<double>& thetas, std::size_t i, const RateProfile& rp,
                            const ChannelModel& ch) {
    const double beta = success_prob(thetas, i);
    if (!(beta > 0.0)) throw infeasible_error("average_power: success probability is zero");
    return thetas[i] * useful_power(beta, rp, ch);
}

namespace detail {

/// f(beta) = useful_power(beta) and its first two beta-derivatives.
struct UsefulDerivs {
    double f;
    double df;
    double d2f;
};

inline UsefulDerivs useful_derivs(double beta, const RateProfile& rp, const ChannelModel& ch) {
    constexpr double ln2 = std::numbers::ln2;
    UsefulDerivs d{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < ch.num_states(); ++k) {
        const double s = rp.state_rates[k] / ch.bandwidth();  // bits per Hz at beta = 1
        if (s <= 0.0) continue;
        const double c = ch.bin_probs()[k] * ch.noise_power() / ch.bin_states()[k];
        const double g = std::exp2(s / beta);
        d.f += c * (g - 1.0);
        d.df -= c * g * ln2 * s / (beta * beta);
        d.d2f += c * g * ln2 * s * (ln2 * s + 2.0 * beta) / std::pow(beta, 4);
    }
    return d;
}

}  // namespace detail

/// d total_power_i / d theta_i (own-probability gradient).
inline double own_gradient(const std::vector<double>& thetas, std::size_t i, const RateProfile& rp,
                           const ChannelModel& ch) {
    const double beta = success_prob(thetas, i);
    return detail::useful_derivs(beta, rp, ch).df;
}

/// Second-derivative matrix H[i][k] = d^2 total_power_i / (d theta_i d theta_k).
/// Row i uses user i's rate profile and channel.
///
/// With eps_i = prod_{j != i}(1 - theta_j), total_power_i = f(beta_i) / eps_i,
/// so H[i][i] = eps_i f''(beta_i) and H[i][k] = -theta_i eps_i f''(beta_i) / (1 - theta_k).
inline Eigen::MatrixXd hessian(const std::vector<double>& thetas, const std::vector<RateProfile>& profiles,
                               const std::vector<ChannelModel>& channels) {
    const std::size_t n = thetas.size();
    if (profiles.size() != n || channels.size() != n) throw std::invalid_argument("hessian: size mismatch");
    for (double t : thetas)
        if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("hessian: probabilities must lie in (0, 1)");
    Eigen::MatrixXd h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = collision_factor(thetas, i);
        const double beta = thetas[i] * eps;
        const double d2f = detail::useful_derivs(beta, profiles[i], channels[i]).d2f;
        for (std::size_t k = 0; k < n; ++k) {
            h(i, k) = k == i ? eps * d2f : -thetas[i] * eps * d2f / (1.0 - thetas[k]);
        }
    }
    return h;
}

/// The same off-diagonal entry reached the other way round: differentiate
/// d total_power_i / d theta_k = -theta_i f'(beta) / (1 - theta_k) + f(beta) / (eps (1 - theta_k))
/// with respect to theta_i.
inline double hessian_mixed_alt(const std::vector<double>& thetas, std::size_t i, std::size_t k,
                                const RateProfile& rp, const ChannelModel& ch) {
    if (i == k) throw std::invalid_argument("hessian_mixed_alt: needs i != k");
    const double eps = collision_factor(thetas, i);
    const double beta = thetas[i] * eps;
    const auto d = detail::useful_derivs(beta, rp, ch);
    const double one_minus = 1.0 - thetas[k];
    // d/dtheta_i [-theta_i f'(beta) / (1 - theta_k)]
    const double first = -(d.df + thetas[i] * d.d2f * eps) / one_minus;
    // d/dtheta_i [f(beta) / (eps (1 - theta_k))]
    const double second = d.df * eps / (eps * one_minus);
    return first + second;
}

/// Sufficient condition for a positive definite Hessian:
/// 1 / theta_i - sum_{k != i} 1 / (1 - theta_k) > 0 for every i.
inline bool check_dominance(const std::vector<double>& thetas) {
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        double s = 1.0 / thetas[i];
        for (std::size_t k = 0; k < thetas.size(); ++k)
            if (k != i) s -= 1.0 / (1.0 - thetas[k]);
        if (!(s > 0.0)) return false;
    }
    return true;
}

inline double omega_bound(std::size_t n_users) {
    if (n_users < 1) throw std::invalid_argument("omega_bound: need at least one user");
    return 1.0 / static_cast<double>(n_users);
}

/// omega < 1 / N (strict).
inline bool omega_accepts(double omega, std::size_t n_users) { return omega < omega_bound(n_users); }

struct BestResponseOptions {
    double theta_min = 1e-3;
    double omega = 0.1;
    double grid_step = 1e-4;
};

/// Grid argmin of user i's total power over [theta_min, omega] with the
/// others fixed; ties go to the smaller theta. Coarse pass then a fine
/// pass around the coarse winner.
inline double best_response(std::size_t i, std::vector<double> thetas, const RateProfile& rp, const ChannelModel& ch,
                            const BestResponseOptions& opt) {
    if (!(opt.grid_step > 0.0)) throw std::invalid_argument("best_response: grid_step must be > 0");
    if (!(opt.theta_min <= opt.omega)) throw std::invalid_argument("best_response: empty search interval");
    if (i >= thetas.size()) throw std::out_of_range("best_response: user index out of range");
    const auto grid_count = static_cast<long>(std::floor((opt.omega - opt.theta_min) / opt.grid_step + 1e-9));
    auto grid_point = [&](long g) { return std::min(opt.omega, opt.theta_min + static_cast<double>(g) * opt.grid_step); };
    auto eval = [&](long g) {
        thetas[i] = grid_point(g);
        const double beta = success_prob(thetas, i);
        if (!(beta > 0.0)) return std::numeric_limits<double>::infinity();
        return total_power(thetas, i, rp, ch);
    };
    long best = -1;
    double best_val = std::numeric_limits<double>::infinity();
    auto scan = [&](long from, long to, long stride) {
        for (long g = from; g <= to; g += stride) {
            const double v = eval(g);
            if (v < best_val) {
                best_val = v;
                best = g;
            }
        }
    };
    // Coarse stride keeps the search near-linear in the number of grid points
    // divided by the stride; the fine pass covers one coarse cell either side.
    const long stride = std::max<long>(1, grid_count / 200);
    scan(0, grid_count, stride);
    if (grid_count % stride != 0) scan(grid_count, grid_count, 1);
    if (best < 0) throw infeasible_error("best_response: every grid point has zero success probability");
    const long lo = std::max<long>(0, best - stride), hi = std::min(grid_count, best + stride);
    best = -1;
    best_val = std::numeric_limits<double>::infinity();
    scan(lo, hi, 1);
    return grid_point(best);
}

struct EquilibriumProfile {
    std::vector<double> theta_star;
    std::vector<double> beta_star;
    std::vector<double> collision_factor;
    std::vector<double> lambda_star;  // waterfilling threshold meeting the target at beta_star
    std::vector<double> power_useful;
    std::vector<double> power_wasted;
    std::vector<double> power_total;
    std::vector<double> power_average;  // per unit time, see average_power
    int iterations = 0;
    bool converged = false;
    double last_change = 0.0;
};

struct NashOptions {
    BestResponseOptions response;
    double tol = 1e-4;
    int max_iterations = 500;
    /// Start point; empty means every user at omega / 2.
    std::vector<double> start;
};

/// Gauss-Seidel iterated best response. Non-convergence is reported via
/// `converged = false`, not thrown.
inline EquilibriumProfile nash_fixed_point(const std::vector<ChannelModel>& channels,
                                           const std::vector<double>& rate_targets, const NashOptions& opt = {}) {
    const std::size_t n = channels.size();
    if (n == 0 || rate_targets.size() != n) throw std::invalid_argument("nash_fixed_point: size mismatch");
    std::vector<RateProfile> profiles;
    for (std::size_t i = 0; i < n; ++i) profiles.push_back(rate_profile(channels[i], rate_targets[i]));
    std::vector<double> thetas = opt.start.empty() ? std::vector<double>(n, opt.response.omega / 2.0) : opt.start;
    if (thetas.size() != n) throw std::invalid_argument("nash_fixed_point: start has wrong size");

    EquilibriumProfile eq;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = best_response(i, thetas, profiles[i], channels[i], opt.response);
            change = std::max(change, std::abs(next - thetas[i]));
            thetas[i] = next;
        }
        eq.iterations = it;
        eq.last_change = change;
        if (change < opt.tol) {
            eq.converged = true;
            break;
        }
    }
    eq.theta_star = thetas;
    for (std::size_t i = 0; i < n; ++i) {
        const PowerSplit ps = power_split(thetas, i, profiles[i], channels[i]);
        eq.beta_star.push_back(ps.beta);
        eq.collision_factor.push_back(collision_factor(thetas, i));
        eq.lambda_star.push_back(single_user_threshold(channels[i], rate_targets[i], ps.beta));
        eq.power_useful.push_back(ps.useful);
        eq.power_wasted.push_back(ps.wasted);
        eq.power_total.push_back(ps.total);
        eq.power_average.push_back(ps.beta * ps.total);
    }
    return eq;
}

/// Average power when each success re-waterfills at the actual success
/// probability: theta * E[P_w(lambda*(beta))]. Companion to `total_power`,
/// which stretches the beta = 1 profile instead and is never lower.
inline double waterfilled_total_power(const std::vector<double>& thetas, std::size_t i, const ChannelModel& ch,
                                      double rate_target) {
    const double beta = success_prob(thetas, i);
    if (!(beta > 0.0)) throw infeasible_error("waterfilled_total_power: success probability is zero");
    const double lambda = single_user_threshold(ch, rate_target, beta);
    return thetas[i] * waterfill_mean_power(ch, lambda);
}

}  // namespace rcra

#endif  // RCRA_EQUILIBRIUM_HPP_
