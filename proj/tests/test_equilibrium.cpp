#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rcra/equilibrium.hpp"
#include "rcra/random.hpp"

using namespace rcra;

namespace {

// One state at gain 1 with N0W = 1 and W = 1.
ChannelModel unit_channel() { return ChannelModel{1.0, {}, {1.0}, 1.0, 1.0}; }

}  // namespace

TEST(SuccessProb, Examples) {
    EXPECT_DOUBLE_EQ(success_prob({0.3}, 0), 0.3);
    EXPECT_NEAR(success_prob({0.1, 0.1}, 0), 0.09, 1e-15);
    EXPECT_DOUBLE_EQ(success_prob({0.5, 1.0}, 0), 0.0);
    EXPECT_THROW(success_prob({0.1}, 1), std::out_of_range);
    EXPECT_THROW(success_prob({1.5}, 0), std::invalid_argument);
}

TEST(SingleUserThreshold, ClosedFormSingleState) {
    // log2(1 + (lambda - 1)) = 1 gives lambda = 2.
    EXPECT_NEAR(single_user_threshold(unit_channel(), 1.0, 1.0), 2.0, 1e-8);
    // log2(lambda) = 3 / beta at beta = 0.5 gives 2^6.
    EXPECT_NEAR(single_user_threshold(unit_channel(), 3.0, 0.5), 64.0, 64e-8);
}

TEST(SingleUserThreshold, ResidualAndMonotoneInBeta) {
    const auto ch = default_channel(0.4698);
    double prev = 0.0;
    for (double beta : {1.0, 0.75, 0.5, 0.25, 0.1}) {
        const double lam = single_user_threshold(ch, 50e3, beta);
        EXPECT_LE(std::abs(beta * waterfill_rate(ch, lam) - 50e3) / 50e3, 1e-8);
        EXPECT_GT(lam, prev);
        prev = lam;
    }
}

TEST(SingleUserThreshold, Errors) {
    EXPECT_THROW(single_user_threshold(unit_channel(), 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(single_user_threshold(unit_channel(), 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(single_user_threshold(unit_channel(), 200.0, 1.0), infeasible_error);
}

TEST(RateProfile, MeetsTargetAndIsOrdered) {
    for (double a : {0.05, 0.4698, 1.3867}) {
        const auto ch = default_channel(a);
        const auto rp = rate_profile(ch, 80e3);
        double sum = 0.0;
        for (std::size_t k = 0; k < ch.num_states(); ++k) {
            EXPECT_GE(rp.state_rates[k], 0.0);
            if (k > 0) { EXPECT_GE(rp.state_rates[k], rp.state_rates[k - 1]); }
            sum += ch.bin_probs()[k] * rp.state_rates[k];
        }
        EXPECT_NEAR(sum, 80e3, 1e-9 * 80e3);
    }
    const auto single = rate_profile(unit_channel(), 1.0);
    EXPECT_NEAR(single.state_rates[0], 1.0, 1e-9);
}

TEST(UsefulPower, Examples) {
    const auto ch = unit_channel();
    const auto rp = rate_profile(ch, 1.0);
    EXPECT_NEAR(useful_power(1.0, rp, ch), 1.0, 1e-8);
    EXPECT_NEAR(useful_power(0.5, rp, ch), 3.0, 1e-7);
    RateProfile zero{{0.0}, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(useful_power(0.7, zero, ch), 0.0);
    EXPECT_THROW(useful_power(0.0, rp, ch), std::invalid_argument);
}

// At beta = 1 the stretched profile is the waterfilling optimum itself.
TEST(UsefulPower, EqualsWaterfillingPowerAtFullSuccess) {
    const auto ch = default_channel(0.6934);
    const auto rp = rate_profile(ch, 60e3);
    EXPECT_NEAR(useful_power(1.0, rp, ch), waterfill_mean_power(ch, rp.lambda), 1e-9);
}

TEST(UsefulPower, DecreasingAndConvexInBeta) {
    const auto ch = default_channel(0.4698);
    const auto rp = rate_profile(ch, 50e3);
    std::vector<double> f;
    for (int k = 1; k <= 10; ++k) f.push_back(useful_power(0.1 * k, rp, ch));
    for (std::size_t k = 1; k < f.size(); ++k) EXPECT_LT(f[k] - f[k - 1], 0.0);
    for (std::size_t k = 2; k < f.size(); ++k) EXPECT_GT(f[k] - 2 * f[k - 1] + f[k - 2], 0.0);
}

TEST(TotalPower, Examples) {
    const auto ch = default_channel(0.4698);
    const auto rp = rate_profile(ch, 50e3);
    EXPECT_NEAR(total_power({0.3}, 0, rp, ch), useful_power(0.3, rp, ch), 1e-12);
    EXPECT_NEAR(total_power({0.1, 0.1}, 0, rp, ch), 0.1 / 0.09 * useful_power(0.09, rp, ch), 1e-9);
    EXPECT_THROW(total_power({0.5, 1.0}, 0, rp, ch), infeasible_error);
    double prev = total_power({0.001}, 0, rp, ch);
    for (double t = 0.002; t <= 0.1; t += 0.001) {
        const double cur = total_power({t}, 0, rp, ch);
        EXPECT_LT(cur, prev);
        prev = cur;
    }
}

TEST(TotalPower, SplitAndAverage) {
    const auto ch = default_channel(0.4698);
    const auto rp = rate_profile(ch, 50e3);
    const std::vector<double> th{0.2, 0.1, 0.15};
    const auto s = power_split(th, 0, rp, ch);
    EXPECT_NEAR(s.useful + s.wasted, s.total, 1e-12);
    EXPECT_GE(s.wasted, 0.0);
    EXPECT_NEAR(average_power(th, 0, rp, ch), s.beta * s.total, 1e-12);
    // Re-waterfilling at the actual success probability never costs more.
    EXPECT_LE(waterfilled_total_power(th, 0, ch, 50e3), average_power(th, 0, rp, ch) * (1 + 1e-12));
}

TEST(Hessian, DiagonalPositiveAndMixedFormsAgree) {
    const std::vector<double> th{0.1, 0.2, 0.05};
    std::vector<ChannelModel> chs{default_channel(0.4698), default_channel(1.0), default_channel(0.1422)};
    std::vector<RateProfile> rps;
    for (auto& c : chs) rps.push_back(rate_profile(c, 60e3));
    const auto h = hessian(th, rps, chs);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_GT(h(i, i), 0.0);
        for (std::size_t k = 0; k < 3; ++k)
            if (k != i) { EXPECT_NEAR(hessian_mixed_alt(th, i, k, rps[i], chs[i]), h(i, k), 1e-12 * std::abs(h(i, k))); }
    }
    EXPECT_THROW(hessian({0.0, 0.2, 0.1}, rps, chs), std::invalid_argument);
}

TEST(Hessian, MatchesFiniteDifferences) {
    Rng rng{31};
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + rng.bits() % 5;
        std::vector<double> th;
        std::vector<ChannelModel> chs;
        std::vector<RateProfile> rps;
        for (std::size_t i = 0; i < n; ++i) {
            th.push_back(0.01 + 0.29 * rng.uniform());
            chs.push_back(default_channel(0.1 + 1.3 * rng.uniform()));
            rps.push_back(rate_profile(chs.back(), 2e4 + 1e5 * rng.uniform()));
        }
        const auto h = hessian(th, rps, chs);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const double fd = oracle::hessian_fd(th, i, k, rps[i], chs[i], 1e-5);
                EXPECT_NEAR(h(i, k), fd, 1e-4 * std::abs(fd)) << "entry " << i << "," << k;
            }
    }
}

TEST(Dominance, Examples) {
    EXPECT_TRUE(check_dominance({0.2, 0.2}));
    EXPECT_FALSE(check_dominance(std::vector<double>(20, 0.1)));
    EXPECT_TRUE(check_dominance({0.7}));
}

TEST(Dominance, ImpliesPositiveLeadingMinors) {
    Rng rng{8};
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.bits() % 5;
        std::vector<double> th;
        std::vector<ChannelModel> chs;
        std::vector<RateProfile> rps;
        for (std::size_t i = 0; i < n; ++i) {
            th.push_back(0.01 + 0.4 * rng.uniform());
            chs.push_back(default_channel(0.4698));
            rps.push_back(rate_profile(chs.back(), 50e3));
        }
        if (!check_dominance(th)) continue;
        ++checked;
        EXPECT_TRUE(oracle::leading_minors_positive(hessian(th, rps, chs)));
    }
    EXPECT_GT(checked, 20);
}

TEST(OmegaBound, Examples) {
    EXPECT_DOUBLE_EQ(omega_bound(20), 0.05);
    EXPECT_FALSE(omega_accepts(0.1, 20));
    EXPECT_DOUBLE_EQ(omega_bound(2), 0.5);
    EXPECT_TRUE(omega_accepts(0.49, 2));
    for (std::size_t n = 1; n <= 50; ++n) EXPECT_FALSE(omega_accepts(1.0 / static_cast<double>(n), n));
    EXPECT_THROW(omega_bound(0), std::invalid_argument);
}

TEST(BestResponse, LoneUserPicksOmega) {
    const auto ch = default_channel(0.4698);
    const auto rp = rate_profile(ch, 50e3);
    EXPECT_NEAR(best_response(0, {0.05}, rp, ch, {1e-3, 0.1, 1e-4}), 0.1, 1e-12);
}

TEST(BestResponse, ArgminAgainstFinerGrid) {
    const auto ch = default_channel(0.4698);
    const auto rp = rate_profile(ch, 50e3);
    const BestResponseOptions opt{1e-3, 0.45, 1e-3};
    const double br = best_response(0, {0.2, 0.45}, rp, ch, opt);
    const double at = total_power({br, 0.45}, 0, rp, ch);
    for (double t = opt.theta_min; t <= opt.omega; t += opt.grid_step / 10.0)
        EXPECT_LE(at, total_power({t, 0.45}, 0, rp, ch) + 1e-9 * at);
    for (double d : {-opt.grid_step, opt.grid_step}) {
        const double t = std::clamp(br + d, opt.theta_min, opt.omega);
        EXPECT_LE(at, total_power({t, 0.45}, 0, rp, ch));
    }
}

TEST(BestResponse, Errors) {
    const auto ch = default_channel(0.4698);
    const auto rp = rate_profile(ch, 50e3);
    EXPECT_THROW(best_response(0, {0.1}, rp, ch, {1e-3, 0.1, 0.0}), std::invalid_argument);
    EXPECT_THROW(best_response(0, {0.1, 1.0}, rp, ch, {1e-3, 0.1, 1e-3}), infeasible_error);
}

TEST(Nash, LoneUserAtOmega) {
    NashOptions opt;
    opt.response = {1e-3, 0.3, 1e-4};
    const auto eq = nash_fixed_point({default_channel(0.4698)}, {50e3}, opt);
    EXPECT_TRUE(eq.converged);
    EXPECT_NEAR(eq.theta_star[0], 0.3, 1e-12);
}

TEST(Nash, SymmetricAndStable) {
    for (std::size_t n : {2u, 3u, 4u}) {
        NashOptions opt;
        opt.response = {1e-3, 0.9 / static_cast<double>(n), 1e-4};
        std::vector<ChannelModel> chs(n, default_channel(1.0));
        std::vector<double> targets(n, 1e5);
        const auto eq = nash_fixed_point(chs, targets, opt);
        ASSERT_TRUE(eq.converged);
        for (std::size_t i = 1; i < n; ++i) EXPECT_NEAR(eq.theta_star[i], eq.theta_star[0], opt.tol);
        EXPECT_TRUE(check_dominance(eq.theta_star));
        const RateProfile rp = rate_profile(chs[0], 1e5);
        const double single = useful_power(1.0, rp, chs[0]);
        for (std::size_t i = 0; i < n; ++i) {
            // Complementary slackness at the reported threshold.
            EXPECT_NEAR(eq.beta_star[i] * waterfill_rate(chs[i], eq.lambda_star[i]), 1e5, 1e-6 * 1e5);
            EXPECT_GE(eq.power_total[i], single);
            EXPECT_NEAR(eq.power_average[i], eq.beta_star[i] * eq.power_total[i], 1e-12 * eq.power_total[i]);
            const double base = eq.power_total[i];
            for (double d : {-0.01, 0.01}) {
                std::vector<double> t = eq.theta_star;
                t[i] = std::clamp(t[i] + d, opt.response.theta_min, opt.response.omega);
                EXPECT_GE(total_power(t, i, rp, chs[i]), base - 1e-6);
            }
        }
    }
}

TEST(Nash, HeterogeneousUsersConvergeUnderDominance) {
    NashOptions opt;
    opt.response = {1e-3, 0.3, 1e-4};
    const auto eq = nash_fixed_point({default_channel(0.1422), default_channel(0.4698), default_channel(1.3867)},
                                     {40e3, 80e3, 120e3}, opt);
    EXPECT_TRUE(eq.converged);
    EXPECT_TRUE(check_dominance(eq.theta_star));
    EXPECT_LT(eq.iterations, opt.max_iterations);
}

TEST(Nash, NonConvergenceIsReported) {
    NashOptions opt;
    opt.response = {1e-3, 0.9, 1e-4};
    opt.max_iterations = 1;
    opt.start = {0.5, 0.5};
    const auto eq = nash_fixed_point({default_channel(1.0), default_channel(1.0)}, {1e5, 1e5}, opt);
    EXPECT_FALSE(eq.converged);
    EXPECT_EQ(eq.iterations, 1);
}
