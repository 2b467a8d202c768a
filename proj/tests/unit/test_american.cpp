#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "dense.hpp"
#include "mcfd/american.hpp"
#include "mcfd/error.hpp"
#include "oracles.hpp"

using namespace mcfd;

namespace {

// Projected Gauss-Seidel for: U >= f, A U - F >= 0, (U - f)^T (A U - F) = 0 on
// rows 1..N-1; rows 0 and N hold Dirichlet data already stored in U.
Eigen::VectorXd projected_gauss_seidel(const Eigen::MatrixXd& A, const Eigen::VectorXd& F, const Eigen::VectorXd& f,
                                       Eigen::VectorXd U) {
    const int n = static_cast<int>(U.size());
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double change = 0.0;
        for (int i = 1; i < n - 1; ++i) {
            const double r = F[i] - A.row(i).dot(U) + A(i, i) * U[i];
            const double next = std::max(f[i], r / A(i, i));
            change = std::max(change, std::abs(next - U[i]));
            U[i] = next;
        }
        if (change < 1e-15) break;
    }
    return U;
}

}  // namespace

TEST(American, ZeroPayoffStaysZero) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 32, 0.4, p.T);
    PideProblem z{g,     p, OptionStyle::american, GridFunction(g.node_count()),
                  [](double) { return BoundaryValues{0.0, 0.0}; },
                  {},    false,
                  GridFunction(g.node_count())};
    auto s = solve_american(z, SolverConfig{});
    for (std::size_t i = 0; i < s.slices.size(); ++i) {
        for (double v : s.slices[i].values()) EXPECT_EQ(v, 0.0);
        for (double v : s.multipliers[i].values()) EXPECT_EQ(v, 0.0);
    }
}

TEST(American, RequiresObstacle) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 32, 0.4, p.T);
    auto problem = PideProblem::put(g, p, OptionStyle::american, true);
    problem.obstacle = GridFunction{};
    EXPECT_THROW(solve_american(problem, SolverConfig{}), InvalidParameter);
    auto european = PideProblem::put(g, p, OptionStyle::european, true);
    EXPECT_THROW(solve_american(european, SolverConfig{}), InvalidParameter);
}

TEST(American, ComplementarityAfterEveryStep) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 128, 0.4, p.T);
    auto problem = PideProblem::put(g, p, OptionStyle::american, true);
    AmericanStepper stepper(problem, SolverConfig{});
    const auto& f = stepper.obstacle();
    SplitState prev{problem.initial, GridFunction(g.node_count())};
    SplitState curr = stepper.first_step(prev);
    auto check = [&](const SplitState& s, int level) {
        for (int n = 1; n < g.N(); ++n) {
            ASSERT_GE(s.Psi[n], -1e-12) << level << ":" << n;
            ASSERT_GE(s.U[n] - f[n], -1e-12 * p.K) << level << ":" << n;
            ASSERT_LE(std::abs(s.Psi[n] * (s.U[n] - f[n])), 1e-8 * p.K) << level << ":" << n;
        }
    };
    check(curr, 1);
    for (int m = 1; m < g.M(); ++m) {
        SplitState next = stepper.american_step(prev.U, curr, m);
        check(next, m + 1);
        prev = std::move(curr);
        curr = std::move(next);
    }
}

TEST(American, DeepInTheMoneyEqualsIntrinsic) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 128, 0.4, p.T);
    auto s = solve_american(p, g, SolverConfig{});
    auto node = s.exercise_boundary_node();
    ASSERT_TRUE(node.has_value());
    EXPECT_LT(g.x(*node), 0.0);
    for (int n = 1; n <= *node / 2; ++n) {
        EXPECT_NEAR(s.final_slice()[n], payoff(g.x(n), p), 1e-10 * p.K) << n;
    }
}

TEST(American, DominatesEuropeanAndGrowsWithMaturity) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 128, 0.4, p.T);
    SolverConfig c;
    c.stored_slices = 16;
    auto am = solve_american(p, g, c);
    auto eu = solve_european(p, g, c);
    for (std::size_t n = 0; n < am.final_slice().size(); ++n) {
        EXPECT_GE(am.final_slice()[n], eu.final_slice()[n] - 1e-12);
    }
    // checked at nodes: cubic interpolation across the free boundary is not monotone
    for (std::size_t i = 1; i < am.slices.size(); ++i) {
        for (int n = 0; n <= g.N(); ++n) {
            EXPECT_GE(am.slices[i][n], am.slices[i - 1][n] - 1e-8) << n << " slice " << i;
        }
    }
}

TEST(American, SplittingStepAgreesWithPsorLcp) {
    MarketParams p;
    const int N = 64;
    GridSpec g(2.0, N, 40, p.T);
    auto problem = PideProblem::put(g, p, OptionStyle::american, true);
    AmericanStepper stepper(problem, SolverConfig{});
    const SplitState s0{problem.initial, GridFunction(g.node_count())};
    const SplitState s1 = stepper.first_step(s0);
    const int m = 1;
    const SplitState s2 = stepper.american_step(s0.U, s1, m);

    const double zeta = std::exp(p.mu_J + 0.5 * p.sigma_J * p.sigma_J) - 1.0;
    const double a = 0.5 * p.sigma * p.sigma, b = p.r - a - p.lambda * zeta, c = p.r + p.lambda;
    const double dt = g.dtau();
    auto op = oracle::dense_operators(N, g.dx());
    const Eigen::MatrixXd Q = op.first_derivative();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N + 1, N + 1);
    Eigen::MatrixXd D = a * (2.0 * op.Dxx - op.Dx * Q) + b * Q - c * I;
    auto g_density = [&](double y) {
        const double z = (y - p.mu_J) / p.sigma_J;
        return std::exp(-0.5 * z * z) / (p.sigma_J * std::sqrt(2.0 * std::numbers::pi));
    };
    const Eigen::MatrixXd J = oracle::dense_jump_matrix(N, g.L(), p.lambda, g_density);
    Eigen::VectorXd tail = Eigen::VectorXd::Zero(N + 1);
    for (int n = 1; n < N; ++n) {
        const double x = g.x(n);
        tail[n] = p.lambda * (p.K * oracle::norm_cdf(-(x + p.mu_J + g.L()) / p.sigma_J) -
                              p.S0 * std::exp(x + 0.5 * p.sigma_J * p.sigma_J + p.mu_J) *
                                  oracle::norm_cdf(-(x + p.sigma_J * p.sigma_J + p.mu_J + g.L()) / p.sigma_J));
    }
    auto vec = [](const GridFunction& u) {
        return Eigen::Map<const Eigen::VectorXd>(u.values().data(), static_cast<Eigen::Index>(u.size()));
    };
    Eigen::MatrixXd A = (1.0 + dt * c) * I - 2.0 * a * dt * op.Dxx - dt * (b * Q - a * op.Dx * Q);
    Eigen::VectorXd F = vec(s0.U) + dt * D * vec(s0.U) + 2.0 * dt * (J * vec(s1.U) + tail);

    Eigen::VectorXd f(N + 1);
    for (int n = 0; n <= N; ++n) f[n] = payoff(g.x(n), p);
    Eigen::VectorXd start = f;
    auto bc = boundary_values(g.tau(m + 1), OptionStyle::american, g.L(), p);
    start[0] = bc.left;
    start[N] = bc.right;
    const Eigen::VectorXd lcp = projected_gauss_seidel(A, F, f, start);

    double dpsi = 0.0, diff = 0.0;
    for (int n = 1; n < N; ++n) {
        dpsi = std::max(dpsi, std::abs(s2.Psi[n] - s1.Psi[n]));
        diff = std::max(diff, std::abs(s2.U[n] - lcp[n]));
    }
    EXPECT_LE(diff, 2.0 * dt * dpsi + 1e-10);
    // and the LCP residual of the oracle itself is complementary
    const Eigen::VectorXd w = A * lcp - F;
    for (int n = 1; n < N; ++n) {
        EXPECT_GE(w[n], -1e-10);
        EXPECT_LE(std::abs(w[n] * (lcp[n] - f[n])), 1e-10);
    }
}

TEST(American, Table4AtModerateResolution) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 256, 0.4, p.T);
    auto s = solve_american(p, g, SolverConfig{});
    EXPECT_NEAR(s.price(90.0), 10.003862, 0.005 * 10.003862);
    EXPECT_NEAR(s.price(100.0), 3.241208, 0.005 * 3.241208);
    EXPECT_NEAR(s.price(110.0), 1.419791, 0.005 * 1.419791);
}
