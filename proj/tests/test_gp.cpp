#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "aba/errors.hpp"
#include "aba/gp.hpp"
#include "aba/grid.hpp"
#include "oracles.hpp"

using namespace aba;
using namespace aba::gp;

TEST(Kernel, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(kernel_eval(0.3, 0.3, {1.0, 1.0}), 1.0);
    EXPECT_NEAR(kernel_eval(0.0, 1.0, {1.0, 1.0}), 0.60653, 1e-5);
    EXPECT_NEAR(kernel_eval(0.0, 2.0, {4.0, 1.0}), 0.54134, 1e-5);
}

TEST(Kernel, SymmetricExactly) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng);
        const RbfKernelParams k{std::abs(u(rng)) + 0.1, std::abs(u(rng)) + 0.1};
        EXPECT_EQ(kernel_eval(a, b, k), kernel_eval(b, a, k));
    }
}

TEST(Kernel, RejectsNonPositiveParams) {
    EXPECT_THROW((RbfKernelParams{0.0, 1.0}.validate()), ConfigError);
    EXPECT_THROW((RbfKernelParams{1.0, -1.0}.validate()), ConfigError);
}

TEST(Posterior, EmptyIsPrior) {
    const auto post = fit(GpDataset{}, {2.25, 1.0});
    const BudgetGrid grid(0.0, 2.0, 3);
    const auto p = predict(post, grid);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(p.means[i], 0.0);
        EXPECT_DOUBLE_EQ(p.stds[i], 1.5);
    }
}

TEST(Posterior, NoiselessSinglePoint) {
    GpDataset d;
    d.inputs = {1.0};
    d.targets = {2.0};
    d.noise_variance = 0.0;
    const auto post = fit(d, {1.0, 1.0});
    const BudgetGrid grid(0.0, 2.0, 3);
    const auto p = predict(post, grid);
    EXPECT_NEAR(p.means[1], 2.0, 1e-12);
    EXPECT_EQ(p.stds[1], 0.0);
}

TEST(Posterior, NoisySinglePoint) {
    GpDataset d;
    d.inputs = {1.0};
    d.targets = {2.0};
    d.noise_variance = 1.0;
    d.weights = {1.0};
    const auto post = fit(d, {1.0, 1.0});
    const std::vector<double> q{1.0};
    const auto p = post.predict(q);
    EXPECT_NEAR(p.means[0], 1.0, 1e-12);
    EXPECT_NEAR(p.stds[0] * p.stds[0], 0.5, 1e-12);
}

TEST(Posterior, DatasetShapeChecked) {
    GpDataset d;
    d.inputs = {1.0, 2.0};
    d.targets = {1.0};
    EXPECT_THROW(fit(d, {}), ConfigError);
    d.targets = {1.0, 2.0};
    d.noise_variance = -1.0;
    EXPECT_THROW(fit(d, {}), ConfigError);
}

TEST(Posterior, MatchesDenseSolveOnRandomData) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> size(0, 30);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = size(rng);
        const double scale = 10.0 + 90.0 * u(rng);
        GpDataset d;
        d.noise_variance = 0.05 + u(rng);
        for (int i = 0; i < n; ++i) {
            d.inputs.push_back(scale * u(rng));
            d.targets.push_back(10.0 * u(rng) - 2.0);
            d.weights.push_back(0.5 + 2.0 * u(rng));
        }
        const RbfKernelParams k{0.5 + 3.0 * u(rng), 0.1 + u(rng)};
        const auto post = fit(d, k, scale);
        const BudgetGrid grid(0.0, scale, 25);
        const auto got = predict(post, grid);

        std::vector<double> xs, qs;
        for (double x : d.inputs) xs.push_back(x / scale);
        for (double q : grid) qs.push_back(q / scale);
        const auto want = oracle::gp_dense(xs, d.targets, d.weights, d.noise_variance, k.signal_variance,
                                           k.length_scale, qs);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            EXPECT_NEAR(got.means[i], want.mean[i], 1e-8) << "rep " << rep;
            EXPECT_NEAR(got.stds[i], std::sqrt(std::max(0.0, want.var[i])), 1e-7) << "rep " << rep;
            EXPECT_LE(got.stds[i] * got.stds[i], k.signal_variance + 1e-10);
        }
    }
}

TEST(Posterior, NoiselessInterpolation) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        GpDataset d;
        d.noise_variance = 0.0;
        const int n = 1 + rep % 8;
        for (int i = 0; i < n; ++i) {
            // well separated inputs keep the Gram matrix tame
            d.inputs.push_back((i + 0.5 * u(rng)) / n);
            d.targets.push_back(5.0 * u(rng));
        }
        const auto post = fit(d, {1.0, 0.1});
        const auto p = post.predict(d.inputs);
        for (int i = 0; i < n; ++i) {
            EXPECT_NEAR(p.means[i], d.targets[i], 1e-6);
            EXPECT_LE(p.stds[i] * p.stds[i], 1e-8);
        }
    }
}

TEST(Posterior, DuplicateNoiselessInputsNeedJitter) {
    GpDataset d;
    d.inputs = {1.0, 1.0};
    d.targets = {2.0, 2.0};
    d.noise_variance = 0.0;
    const auto post = fit(d, {1.0, 1.0});
    EXPECT_GT(post.jitter(), 0.0);
    EXPECT_NEAR(post.mean_at(1.0), 2.0, 1e-4);
}

TEST(Posterior, NonFiniteTargetsFail) {
    GpDataset d;
    d.inputs = {1.0};
    d.targets = {std::nan("")};
    EXPECT_THROW(fit(d, {}), Error);
}

TEST(Saturation, ExampleAndPassThrough) {
    const BudgetGrid grid(0.0, 2.0, 3);
    const std::vector<double> means{1, 3, 2};
    EXPECT_EQ(saturate_mean(means, grid, 1.0, 3.0), (std::vector<double>{1, 3, 3}));
    EXPECT_EQ(saturate_mean(means, grid, 2.0, 2.0), means);
    EXPECT_EQ(saturate_mean(means, grid, std::nullopt, 0.0), means);
}

TEST(Saturation, Idempotent) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3, 3);
    const BudgetGrid grid(0.0, 10.0, 11);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> m(11);
        for (auto& v : m) v = u(rng);
        const std::size_t k = rep % 11;
        const auto once = saturate_mean(m, grid, grid[k], m[k]);
        EXPECT_EQ(saturate_mean(once, grid, grid[k], m[k]), once);
    }
}
