#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rcra/channel.hpp"
#include "rcra/random.hpp"

using namespace rcra;

namespace {

// Composite Simpson integral of the exponential density on [lo, hi].
double integrate_exp_pdf(double mean, double lo, double hi) {
    const int n = 20000;
    const double h = (hi - lo) / n;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double x = lo + k * h;
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        s += w * std::exp(-x / mean) / mean;
    }
    return s * h / 3.0;
}

ChannelModel unit_channel() { return ChannelModel{1.0, {}, {1.0}, 1.0, 1.0}; }

}  // namespace

TEST(DefaultChannel, BoundariesInLinear) {
    const auto ch = default_channel(0.4698);
    ASSERT_EQ(ch.bin_boundaries().size(), 7u);
    EXPECT_NEAR(ch.bin_boundaries()[0], 0.1422, 1e-4);
    EXPECT_NEAR(ch.bin_boundaries()[2], 0.4698, 1e-4);
    EXPECT_NEAR(ch.bin_boundaries()[4], 0.9817, 1e-4);
    ASSERT_EQ(ch.bin_states().size(), 8u);
    EXPECT_NEAR(ch.bin_states()[0], 0.0501, 1e-4);
    EXPECT_NEAR(ch.bin_states()[7], 2.0797, 1e-4);
}

TEST(DefaultChannel, StructuralInvariants) {
    for (double a : {0.05, 0.1422, 0.4698, 1.0, 1.3867, 10.0}) {
        const auto ch = default_channel(a);
        double sum = 0.0;
        for (std::size_t k = 0; k < 8; ++k) {
            EXPECT_GE(ch.bin_probs()[k], 0.0);
            sum += ch.bin_probs()[k];
            EXPECT_GT(ch.bin_states()[k], 0.0);
            if (k > 0) { EXPECT_GT(ch.bin_states()[k], ch.bin_states()[k - 1]); }
            if (k > 0 && k < 7) { EXPECT_GT(ch.bin_boundaries()[k], ch.bin_boundaries()[k - 1]); }
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(DefaultChannel, BinProbsMatchIntegratedDensity) {
    for (double a : {0.05, 0.4698, 1.0, 1.3867}) {
        const auto ch = default_channel(a);
        std::vector<double> edges{0.0};
        for (double b : ch.bin_boundaries()) edges.push_back(b);
        edges.push_back(60.0 * a);  // tail beyond this is below 1e-26
        for (std::size_t k = 0; k < 8; ++k)
            EXPECT_NEAR(ch.bin_probs()[k], integrate_exp_pdf(a, edges[k], edges[k + 1]), 1e-9) << "mean " << a;
    }
}

TEST(DefaultChannel, BinsAreEqualProbabilityAtUnitMean) {
    const auto ch = default_channel(1.0);
    for (double p : ch.bin_probs()) EXPECT_NEAR(p, 0.125, 0.01);
    // At the base mean the lower bins carry more mass.
    const auto base = default_channel(0.4698);
    EXPECT_GT(base.bin_probs()[0], 0.25);
    EXPECT_LT(base.bin_probs()[7], 0.02);
}

TEST(DefaultChannel, RejectsNonPositiveMean) {
    EXPECT_THROW(default_channel(0.0), std::invalid_argument);
    EXPECT_THROW(default_channel(-1.0), std::invalid_argument);
}

TEST(ChannelModel, RejectsBadShapes) {
    EXPECT_THROW((ChannelModel{1.0, {0.5}, {1.0}, 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW((ChannelModel{1.0, {0.5}, {1.0, 0.9}, 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW((ChannelModel{1.0, {0.5, 0.4}, {0.1, 0.5, 0.9}, 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW((ChannelModel{1.0, {}, {1.0}, 0.0, 1.0}), std::invalid_argument);
    EXPECT_THROW((ChannelModel{1.0, {}, {1.0}, 1.0, 0.0}), std::invalid_argument);
}

TEST(Quantize, Examples) {
    const auto ch = default_channel(0.4698);
    auto s = quantize(ch, 0.30);
    EXPECT_EQ(s.state_index, 2u);
    EXPECT_NEAR(s.state_gain, 0.2877, 1e-4);
    s = quantize(ch, 0.01);
    EXPECT_EQ(s.state_index, 0u);
    EXPECT_NEAR(s.state_gain, 0.0501, 1e-4);
    s = quantize(ch, 5.0);
    EXPECT_EQ(s.state_index, 7u);
    EXPECT_NEAR(s.state_gain, 2.0797, 1e-4);
}

TEST(Quantize, BoundaryBelongsToUpperBin) {
    const auto ch = default_channel(1.0);
    for (std::size_t k = 0; k < 7; ++k) {
        const double b = ch.bin_boundaries()[k];
        EXPECT_EQ(quantize(ch, b).state_index, k + 1);
        EXPECT_EQ(quantize(ch, std::nextafter(b, 0.0)).state_index, k);
    }
}

TEST(Waterfill, Examples) {
    EXPECT_DOUBLE_EQ(waterfill_power(2.0, 1.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(waterfill_power(1.0 / 0.25, 0.25, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(waterfill_power(0.5, 1.0, 1.0), 0.0);
}

TEST(Rate, Examples) {
    const auto ch = unit_channel();
    EXPECT_DOUBLE_EQ(rate(0.0, 1.0, ch), 0.0);
    EXPECT_NEAR(rate(1.0, 1.0, ch), 1.0, 1e-15);
    EXPECT_NEAR(rate(3.0, 1.0, ch), 2.0, 1e-15);
}

TEST(Rate, PowerForRateInverts) {
    const auto ch = default_channel(0.4698);
    for (double x : ch.bin_states())
        for (double p : {0.01, 0.5, 3.0, 40.0}) EXPECT_NEAR(power_for_rate(rate(p, x, ch), x, ch), p, 1e-9 * p);
}

TEST(Properties, RateStrictlyIncreasing) {
    const auto ch = default_channel(0.4698);
    for (double p = 0.01; p < 50.0; p *= 1.3) {
        for (double x = 0.05; x < 3.0; x *= 1.2) {
            EXPECT_LT(rate(p, x, ch), rate(p * 1.01, x, ch));
            EXPECT_LT(rate(p, x, ch), rate(p, x * 1.01, ch));
        }
    }
}

TEST(Properties, WaterfillMonotoneAndNonnegative) {
    const auto ch = default_channel(0.4698);
    for (double lam = 0.0; lam < 60.0; lam += 0.37) {
        for (std::size_t k = 0; k < 8; ++k) {
            const double x = ch.bin_states()[k];
            const double p = waterfill_power(lam, x, ch);
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, waterfill_power(lam + 0.37, x, ch));
            if (k < 7) { EXPECT_LE(p, waterfill_power(lam, ch.bin_states()[k + 1], ch)); }
            EXPECT_LE(rate(p, x, ch), rate(waterfill_power(lam + 0.37, x, ch), x, ch));
        }
    }
}

TEST(Sampling, MeanAndOccupancy) {
    const double a = 0.4698;
    const auto ch = default_channel(a);
    Rng rng{2024};
    const int n = 1000000;
    std::vector<int> count(8, 0);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_state(ch, rng);
        sum += s.raw_gain;
        ++count[s.state_index];
        ASSERT_EQ(s.state_gain, ch.bin_states()[s.state_index]);
    }
    EXPECT_NEAR(sum / n, a, 0.01 * a);
    for (std::size_t k = 0; k < 8; ++k) {
        const double p = ch.bin_probs()[k];
        const double sd = std::sqrt(n * p * (1.0 - p));
        EXPECT_NEAR(count[k], n * p, 3.0 * sd) << "bin " << k;
    }
}

TEST(Sampling, SeedReproducesDraws) {
    const auto ch = default_channel(1.0);
    Rng a{7}, b{7};
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_state(ch, a).raw_gain, sample_state(ch, b).raw_gain);
}
