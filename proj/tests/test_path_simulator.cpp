#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "targetcost/errors.hpp"
#include "targetcost/g_solver.hpp"
#include "targetcost/path_simulator.hpp"

using namespace targetcost;

namespace {

const GCurve& curve2() {
    static const GCurve c = shoot(2.0).curve;
    return c;
}

}  // namespace

TEST(SimulateBrownian, ShapeAndDeterminism) {
    const auto a = simulate_brownian(1.0, 2, 7);
    ASSERT_EQ(a.W.size(), 3u);
    ASSERT_EQ(a.dW.size(), 2u);
    EXPECT_EQ(a.W[0], 0.0);
    EXPECT_EQ(a.times.back(), 1.0);
    const auto b = simulate_brownian(1.0, 500, 42);
    const auto c = simulate_brownian(1.0, 500, 42);
    EXPECT_EQ(b.W, c.W);
    EXPECT_EQ(b.dW, c.dW);
    double w = 0.0;
    for (std::size_t k = 0; k < 500; ++k) {
        w += b.dW[k];
        EXPECT_DOUBLE_EQ(b.W[k + 1], w);
    }
    EXPECT_NE(simulate_brownian(1.0, 500, 43).W, b.W);
    EXPECT_THROW(simulate_brownian(1.0, 1, 0), DomainError);
    EXPECT_THROW(simulate_brownian(0.0, 10, 0), DomainError);
}

TEST(SimulateBrownian, TerminalVarianceMatchesHorizon) {
    const double T = 1.7;
    const std::size_t paths = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < paths; ++i) {
        const double w = simulate_brownian(T, 4, derive_seed(1, i)).W.back();
        sum += w;
        sum_sq += w * w;
    }
    const double mean = sum / paths;
    const double var = (sum_sq - paths * mean * mean) / (paths - 1);
    const double se = T * std::sqrt(2.0 / (paths - 1));
    EXPECT_LE(std::abs(var - T), 3.0 * se);
}

TEST(DeriveSeed, DistinctStreams) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}

TEST(RunOptimalControl, StartAtTargetCostsNothing) {
    const Params params{2.0, 1.0, 1.0, 0.0};
    const auto path = run_optimal_control(curve2(), params, simulate_brownian(1.0, 200, 3));
    for (double u : path.u) EXPECT_EQ(u, 0.0);
    for (double x : path.X) EXPECT_EQ(x, 1.0);
    EXPECT_EQ(path.cost.back(), 0.0);
}

TEST(RunOptimalControl, FeasibilityAndPathInvariants) {
    for (double c : {-0.5, 0.0, 0.7}) {
        const Params params{2.0, 1.0, 0.2, c};
        std::size_t binding = 0, free = 0;
        for (std::uint64_t s = 0; s < 300; ++s) {
            const auto path = run_optimal_control(curve2(), params, simulate_brownian(1.0, 400, derive_seed(8, s)));
            const std::size_t n = path.n_steps;
            if (path.W[n] > c) {
                EXPECT_EQ(path.X[n], 1.0);
                ++binding;
            } else {
                EXPECT_LT(path.X[n], 1.0);
                EXPECT_EQ(path.u[n - 1], 0.0);
                ++free;
            }
            EXPECT_EQ(path.M[n], path.W[n] < c ? 1.0 : 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                EXPECT_GT(path.M[k], 0.0);
                EXPECT_LT(path.M[k], 1.0);
                EXPECT_GE(path.u[k], 0.0);
                EXPECT_GE(path.X[k + 1], path.X[k]);
                EXPECT_LE(path.X[k + 1], 1.0);
                EXPECT_GE(path.cost[k + 1], path.cost[k]);
            }
            EXPECT_EQ(path.X[0], 0.2);
            EXPECT_EQ(feasibility_violations(path, c), 0u);
        }
        EXPECT_GT(binding, 0u);
        EXPECT_GT(free, 0u);
    }
}

TEST(RunOptimalControl, ExplicitFormAgreesWithFeedbackForm) {
    const Params params{2.0, 1.0, 0.1, 0.2};
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto path = run_optimal_control(curve2(), params, simulate_brownian(1.0, 1000, derive_seed(4, s)));
        const auto explicit_u = explicit_control(curve2(), params, path);
        for (std::size_t k = 0; k + 1 < path.n_steps; ++k) {
            const double scale = std::max(std::abs(path.u[k]), 1e-300);
            EXPECT_LE(std::abs(explicit_u[k] - path.u[k]) / scale, 1e-6) << k;
        }
    }
}

TEST(RunOptimalControl, UsageErrors) {
    auto skeleton = simulate_brownian(2.0, 100, 1);
    EXPECT_THROW(run_optimal_control(curve2(), Params{2.0, 1.0, 0.0, 0.0}, skeleton), UsageError);
    EXPECT_THROW(run_optimal_control(curve2(), Params{3.0, 2.0, 0.0, 0.0}, skeleton), UsageError);
}

TEST(RunOptimalControl, TerminalCostFlag) {
    const Params params{2.0, 1.0, 0.0, -0.3};
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto skel = simulate_brownian(1.0, 300, derive_seed(2, s));
        const auto with = run_optimal_control(curve2(), params, skel);
        const auto without = run_optimal_control(curve2(), params, skel, {.include_terminal_cost = false});
        EXPECT_GE(with.cost.back(), without.cost.back());
        EXPECT_EQ(with.X.back(), without.X.back());
    }
}

TEST(McCostEstimate, StartAtTargetIsZero) {
    const auto est = mc_cost_estimate(curve2(), Params{2.0, 1.0, 1.0, 0.0}, 100, 100, 1);
    EXPECT_EQ(est.mean, 0.0);
    EXPECT_EQ(est.std_error, 0.0);
}

TEST(McCostEstimate, DeterministicAndThreadIndependent) {
    const Params params{2.0, 1.0, 0.0, 0.0};
    const auto a = mc_cost_estimate(curve2(), params, 600, 200, 77, {.threads = 1});
    const auto b = mc_cost_estimate(curve2(), params, 600, 200, 77, {.threads = 3});
    const auto c = mc_cost_estimate(curve2(), params, 600, 200, 77, {.threads = 1});
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_EQ(a.costs, c.costs);
    EXPECT_EQ(a.feasibility_violations, 0u);
}

TEST(McCostEstimate, NearValueFunction) {
    const Params params{2.0, 1.0, 0.0, 0.0};
    const auto est = mc_cost_estimate(curve2(), params, 20000, 1000, 12);
    EXPECT_NEAR(est.mean, value_function(curve2(), params), 0.02 + 3.0 * est.std_error);
    EXPECT_EQ(est.feasibility_violations, 0u);
}

TEST(McCostEstimate, ScalingLawAcrossHorizons) {
    const auto one = mc_cost_estimate(curve2(), Params{2.0, 1.0, 0.0, 0.0}, 10000, 500, 21);
    const auto four = mc_cost_estimate(curve2(), Params{2.0, 4.0, 0.0, 0.0}, 10000, 500, 22);
    const double combined = std::hypot(four.std_error, 0.25 * one.std_error);
    EXPECT_LE(std::abs(four.mean - 0.25 * one.mean), 3.0 * combined);
}

TEST(PerturbedG, FlatAndSmoothBumps) {
    const PerturbedG<GCurve> flat(curve2(), 0.3, 0.6, 0.05);
    EXPECT_DOUBLE_EQ(flat.value(0.5), std::min(1.0, curve2().value(0.5) + 0.05));
    EXPECT_EQ(flat.value(0.2), curve2().value(0.2));
    EXPECT_EQ(flat.derivative(0.5), curve2().derivative(0.5));
    const PerturbedG<GCurve> down(curve2(), 0.0001, 0.5, -0.95);
    EXPECT_GE(down.value(0.45), 0.0);
    const PerturbedG<GCurve> smooth(curve2(), 0.2, 0.8, 0.05, BumpShape::Smooth);
    EXPECT_DOUBLE_EQ(smooth.value(0.5), curve2().value(0.5) + 0.05);
    for (double y : {0.25, 0.4, 0.6, 0.75}) {
        const double fd = (smooth.value(y + 1e-6) - smooth.value(y - 1e-6)) / 2e-6;
        EXPECT_NEAR(smooth.derivative(y), fd, 1e-4);
    }
    EXPECT_THROW(PerturbedG<GCurve>(curve2(), 0.5, 0.5, 0.1), DomainError);
}

TEST(BsdeResidual, ZNonNegativeAndRmsShrinks) {
    const auto coarse = bsde_residual(curve2(), 2.0, 1.0, 0.0, 500, 250, 0.1, 9);
    const auto fine = bsde_residual(curve2(), 2.0, 1.0, 0.0, 500, 1000, 0.1, 9);
    EXPECT_EQ(coarse.negative_z, 0u);
    EXPECT_EQ(fine.negative_z, 0u);
    EXPECT_GE(fine.min_z, 0.0);
    EXPECT_LE(fine.rms_residual, 0.6 * coarse.rms_residual);
    EXPECT_EQ(fine.window_steps, 900u);
    EXPECT_GT(fine.delta, 0.0);
}

TEST(BsdeResidual, TrapezoidDriftResidualIsCentred) {
    for (std::size_t n : {250u, 500u, 1000u}) {
        const auto s = bsde_residual(curve2(), 2.0, 1.0, 0.0, 1000, n, 0.1, 5);
        EXPECT_LE(std::abs(s.mean_trapezoid), 3.0 * s.std_error_trapezoid) << n;
    }
}

TEST(BsdeResidual, LeftPointBiasShrinksWithStep) {
    const auto a = bsde_residual(curve2(), 2.0, 1.0, 0.0, 2000, 250, 0.1, 5);
    const auto b = bsde_residual(curve2(), 2.0, 1.0, 0.0, 2000, 1000, 0.1, 5);
    EXPECT_GT(a.mean_residual, 0.0);
    EXPECT_LT(b.mean_residual, 0.25 * a.mean_residual);
}

TEST(BsdeResidual, DetectsPerturbedG) {
    const PerturbedG<GCurve> bumped(curve2(), 0.3, 0.7, 0.05, BumpShape::Smooth);
    const auto s = bsde_residual(bumped, 2.0, 1.0, 0.0, 1000, 500, 0.1, 5);
    EXPECT_GT(std::abs(s.mean_trapezoid), 3.0 * s.std_error_trapezoid);
}

TEST(BsdeResidual, DomainErrors) {
    EXPECT_THROW(bsde_residual(curve2(), 2.0, 1.0, 0.0, 10, 100, 0.0, 1), DomainError);
    EXPECT_THROW(bsde_residual(curve2(), 2.0, 1.0, 0.0, 10, 100, 0.5, 1), DomainError);
    EXPECT_THROW(bsde_residual(curve2(), 1.0, 1.0, 0.0, 10, 100, 0.1, 1), DomainError);
}

TEST(TerminalGrowth, BindingPathsBlowUpFreePathsStayBounded) {
    const std::vector<double> deltas{0.1, 0.01, 0.001};
    const auto rows = terminal_growth(curve2(), 2.0, 1.0, 0.0, 2000, 10000, deltas, 31);
    ASSERT_EQ(rows.size(), 3u);
    for (const auto& r : rows) {
        EXPECT_GT(r.binding_paths, 0u);
        EXPECT_GT(r.free_paths, 0u);
    }
    EXPECT_GT(rows[1].median_y_binding, 5.0 * rows[0].median_y_binding);
    EXPECT_GT(rows[2].median_y_binding, 5.0 * rows[1].median_y_binding);
    EXPECT_LT(rows[2].median_y_free, 2.0 * rows[0].median_y_free + 1.0);
    EXPECT_THROW(terminal_growth(curve2(), 2.0, 1.0, 0.0, 10, 300, deltas, 1), UsageError);
}
