#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dense.hpp"
#include "mcfd/error.hpp"
#include "mcfd/greeks_analysis.hpp"
#include "mcfd/smoothing.hpp"
#include "mcfd/time_stepper.hpp"
#include "oracles.hpp"

using namespace mcfd;

namespace {

Eigen::VectorXd as_eigen(const GridFunction& u) {
    return Eigen::Map<const Eigen::VectorXd>(u.values().data(), static_cast<Eigen::Index>(u.size()));
}

double rel_max(const GridFunction& u, const Eigen::VectorXd& ref) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        num = std::max(num, std::abs(u[i] - ref[static_cast<Eigen::Index>(i)]));
        den = std::max(den, std::abs(ref[static_cast<Eigen::Index>(i)]));
    }
    return num / den;
}

// Dense discrete differential operator a(2 Dxx - Dx Q) + b Q - c I on interior rows.
Eigen::MatrixXd dense_D(const oracle::DenseOperators& op, double a, double b, double c) {
    const Eigen::MatrixXd Q = op.first_derivative();
    const int n = op.N + 1;
    Eigen::MatrixXd D = a * (2.0 * op.Dxx - op.Dx * Q) + b * Q - c * Eigen::MatrixXd::Identity(n, n);
    D.row(0).setZero();
    D.row(op.N).setZero();
    return D;
}

PideProblem zero_problem(const GridSpec& g, const MarketParams& p) {
    PideProblem z{g, p, OptionStyle::european, GridFunction(g.node_count()), [](double) {
                      return BoundaryValues{0.0, 0.0};
                  },
                  {}, false};
    return z;
}

}  // namespace

TEST(SolverConfig, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    c.epsilon_inner = 0.0;
    EXPECT_THROW(c.validate(), InvalidParameter);
    c = SolverConfig{};
    c.max_inner_iterations = 0;
    EXPECT_THROW(c.validate(), InvalidParameter);
}

TEST(TimeStepper, ZeroDataStaysZero) {
    MarketParams p;
    GridSpec g(2.0, 32, 20, p.T);
    CompactStepper stepper(zero_problem(g, p), SolverConfig{});
    GridFunction zero(g.node_count());
    auto u1 = stepper.imex_first_step(zero);
    auto u2 = stepper.assemble_and_step(zero, u1.values, 1);
    for (int n = 0; n <= g.N(); ++n) {
        EXPECT_EQ(u1.values[n], 0.0);
        EXPECT_EQ(u2.values[n], 0.0);
    }
    auto surface = solve_european(zero_problem(g, p), SolverConfig{});
    for (const auto& s : surface.slices)
        for (double v : s.values()) EXPECT_EQ(v, 0.0);
}

TEST(TimeStepper, ImexStepMatchesDenseImplicitEuler) {
    MarketParams p;
    p.lambda = 0.0;
    const int N = 64;
    GridSpec g(2.0, N, 40, p.T);
    auto problem = PideProblem::put(g, p, OptionStyle::european, true);
    CompactStepper stepper(problem, SolverConfig{});
    auto u1 = stepper.imex_first_step(problem.initial);

    const double a = 0.5 * p.sigma * p.sigma, b = p.r - a, c = p.r;
    auto op = oracle::dense_operators(N, g.dx());
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N + 1, N + 1) - g.dtau() * dense_D(op, a, b, c);
    Eigen::VectorXd rhs = as_eigen(problem.initial);
    auto bc = boundary_values(g.tau(1), OptionStyle::european, g.L(), p);
    rhs[0] = bc.left;
    rhs[N] = bc.right;
    Eigen::VectorXd ref = A.fullPivLu().solve(rhs);
    EXPECT_LT(rel_max(u1.values, ref), 1e-8);
}

TEST(TimeStepper, LeapFrogStepMatchesDenseFixedPoint) {
    MarketParams p;
    const int N = 64;
    GridSpec g(2.0, N, 40, p.T);
    auto problem = PideProblem::put(g, p, OptionStyle::european, true);
    CompactStepper stepper(problem, SolverConfig{});
    const GridFunction& U0 = problem.initial;
    const GridFunction U1 = stepper.imex_first_step(U0).values;
    const int m = 1;
    auto U2 = stepper.assemble_and_step(U0, U1, m);

    const Eigen::VectorXd ref = oracle::dense_leapfrog_put_step(g, p, as_eigen(U0), as_eigen(U1), m);
    EXPECT_LT(rel_max(U2.values, ref), 1e-10);
    EXPECT_GT(U2.iterations, 1);
}

TEST(TimeStepper, GuessAtFixedPointConvergesInOneIteration) {
    MarketParams p;
    GridSpec g(2.0, 64, 40, p.T);
    auto problem = PideProblem::put(g, p, OptionStyle::european, true);
    CompactStepper stepper(problem, SolverConfig{});
    const GridFunction U1 = stepper.imex_first_step(problem.initial).values;
    std::vector<double> known(g.interior_count());
    for (std::size_t k = 0; k < known.size(); ++k) known[k] = problem.initial[k + 1] + 0.01;
    auto bc = boundary_values(g.tau(2), OptionStyle::european, g.L(), p);
    auto first = stepper.correcting_to_convergence(known, U1, bc, 2, g.tau(1));
    auto again = stepper.correcting_to_convergence(known, first.values, bc, 2, g.tau(1));
    EXPECT_EQ(again.iterations, 1);
}

TEST(TimeStepper, DivergenceIsReported) {
    MarketParams p;
    GridSpec g(2.0, 64, 40, p.T);
    SolverConfig c;
    c.max_inner_iterations = 1;
    try {
        solve_european(p, g, c);
        FAIL() << "expected InnerIterationDivergence";
    } catch (const InnerIterationDivergence& e) {
        EXPECT_EQ(e.level(), 1);
        EXPECT_GT(e.last_update(), c.epsilon_inner);
    }
}

TEST(TimeStepper, ManufacturedSolutionSpaceOrder) {
    // linear in tau, so both the IMEX start and the leap-frog steps are exact in
    // time and only the spatial error remains
    MarketParams p;
    p.lambda = 0.0;
    p.sigma = 0.6;
    p.T = 0.5;
    const double a = 0.5 * p.sigma * p.sigma, b = p.r - a, c = p.r;
    auto exact = [](double x, double tau) { return (1.0 + tau) * std::sin(x); };
    auto run = [&](int N) {
        auto g = GridSpec::from_mesh_ratio(2.0, N, 0.4, p.T);
        GridFunction u0(g.node_count());
        for (int n = 0; n <= N; ++n) u0[n] = exact(g.x(n), 0.0);
        PideProblem mms{g, p, OptionStyle::european, u0,
                        [&](double tau) { return BoundaryValues{exact(-2.0, tau), exact(2.0, tau)}; },
                        [&](double x, double tau) {
                            const double u = exact(x, tau);
                            return std::sin(x) + a * u - b * (1.0 + tau) * std::cos(x) + c * u;
                        },
                        false};
        auto s = solve_european(mms, SolverConfig{});
        double e = 0.0;
        for (int n = 0; n <= N; ++n) e = std::max(e, std::abs(s.final_slice()[n] - exact(g.x(n), p.T)));
        return e;
    };
    std::vector<int> Ns = {16, 32, 64, 128};
    std::vector<double> errs;
    for (int N : Ns) errs.push_back(run(N));
    const auto fit = convergence_order(Ns, errs);
    EXPECT_NEAR(fit.order, 4.0, 0.3);
}

TEST(TimeStepper, ManufacturedSolutionTimeOrder) {
    MarketParams p;
    p.lambda = 0.0;
    p.sigma = 0.6;
    p.T = 0.5;
    const double a = 0.5 * p.sigma * p.sigma, b = p.r - a, c = p.r;
    auto exact = [](double x, double tau) { return std::exp(-tau) * std::sin(x); };
    auto run = [&](int M) {
        const int N = 256;
        GridSpec g(2.0, N, M, p.T);
        GridFunction u0(g.node_count());
        for (int n = 0; n <= N; ++n) u0[n] = exact(g.x(n), 0.0);
        PideProblem mms{g, p, OptionStyle::european, u0,
                        [&](double tau) { return BoundaryValues{exact(-2.0, tau), exact(2.0, tau)}; },
                        [&](double x, double tau) {
                            const double u = exact(x, tau);
                            return -u + a * u - b * std::exp(-tau) * std::cos(x) + c * u;
                        },
                        false};
        auto s = solve_european(mms, SolverConfig{});
        double e = 0.0;
        for (int n = 0; n <= N; ++n) e = std::max(e, std::abs(s.final_slice()[n] - exact(g.x(n), p.T)));
        return e;
    };
    std::vector<int> Ms = {20, 40, 80};
    std::vector<double> errs;
    for (int M : Ms) errs.push_back(run(M));
    const auto fit = convergence_order(Ms, errs);
    EXPECT_NEAR(fit.order, 2.0, 0.2);
}

TEST(TimeStepper, BlackScholesLimit) {
    MarketParams p;
    p.lambda = 0.0;
    auto g = GridSpec::from_mesh_ratio(2.0, 256, 0.4, p.T);
    auto s = solve_european(p, g, SolverConfig{});
    const double bs = oracle::black_scholes_put(100.0, p.K, p.T, p.r, p.sigma);
    EXPECT_NEAR(bs, 2.392850, 1e-6);
    EXPECT_NEAR(s.price(100.0), bs, 1e-3);
}

TEST(TimeStepper, MertonSeriesAtModerateResolution) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 256, 0.4, p.T);
    auto s = solve_european(p, g, SolverConfig{});
    for (double S : {90.0, 100.0, 110.0}) {
        const double ref = oracle::merton_put(S, p.K, p.T, p.r, p.sigma, p.lambda, p.mu_J, p.sigma_J);
        EXPECT_NEAR(s.price(S), ref, 2e-3 * ref) << S;
    }
    EXPECT_LE(s.max_iterations(), 10);
}

TEST(TimeStepper, BoundaryRowsFollowBoundaryValues) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 64, 0.4, p.T);
    SolverConfig c;
    c.stored_slices = 8;
    auto s = solve_european(p, g, c);
    ASSERT_EQ(s.levels.front(), 0);
    ASSERT_EQ(s.levels.back(), g.M());
    for (std::size_t i = 0; i < s.slices.size(); ++i) {
        auto bc = boundary_values(g.tau(s.levels[i]), OptionStyle::european, g.L(), p);
        EXPECT_EQ(s.slices[i].left(), bc.left);
        EXPECT_EQ(s.slices[i].right(), bc.right);
    }
}

TEST(TimeStepper, Linearity) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 64, 0.4, p.T);
    MarketParams q = p;
    const double alpha = 3.7;
    q.K *= alpha;
    q.S0 *= alpha;
    auto a = solve_european(p, g, SolverConfig{});
    auto b = solve_european(q, g, SolverConfig{});
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < a.final_slice().size(); ++n) {
        num = std::max(num, std::abs(alpha * a.final_slice()[n] - b.final_slice()[n]));
        den = std::max(den, std::abs(b.final_slice()[n]));
    }
    EXPECT_LT(num / den, 1e-10);
}

TEST(TimeStepper, RandomDataGrowthWithinVonNeumannBound) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 128, 0.4, p.T);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z;
    GridFunction u0(g.node_count());
    for (int n = 1; n < g.N(); ++n) u0[n] = z(rng);
    PideProblem problem{g, p, OptionStyle::european, u0, [](double) { return BoundaryValues{0.0, 0.0}; }, {}, false};
    SolverConfig c;
    c.stored_slices = 50;
    auto s = solve_european(problem, c);
    auto norm = [](const GridFunction& u) {
        double acc = 0.0;
        for (double v : u.values()) acc += v * v;
        return std::sqrt(acc);
    };
    const double n0 = norm(u0);
    for (std::size_t i = 0; i < s.slices.size(); ++i) {
        const double bound = std::pow(1.0 + 2.0 * p.lambda * g.dtau(), s.levels[i]) * n0 * (1.0 + 1e-10);
        EXPECT_LE(norm(s.slices[i]), bound) << "level " << s.levels[i];
    }
}

TEST(TimeStepper, ToleranceSensitivity) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 128, 0.4, p.T);
    SolverConfig loose;
    loose.epsilon_inner = 1e-6;
    auto a = solve_european(p, g, loose);
    auto b = solve_european(p, g, SolverConfig{});
    for (double S : {90.0, 100.0, 110.0}) {
        EXPECT_NEAR(a.price(S), b.price(S), 5e-6 * b.price(S));
    }
    EXPECT_LE(a.max_iterations(), b.max_iterations());
}

TEST(TimeStepper, FirstStepUndershootStaysAtKink) {
    // One step is not positivity preserving: a dispersive undershoot appears just
    // right of the kink (and the smoothed payoff is itself negative there). It must
    // stay within the smoothing stencil and be gone by maturity.
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 512, 0.4, p.T);
    for (bool smooth : {false, true}) {
        auto problem = PideProblem::put(g, p, OptionStyle::european, smooth);
        CompactStepper stepper(problem, SolverConfig{});
        auto u1 = stepper.imex_first_step(problem.initial);
        for (int n = 0; n <= g.N(); ++n) {
            if (std::abs(g.x(n) - payoff_kink(p)) > 3 * g.dx()) EXPECT_GE(u1.values[n], -1e-12) << smooth << ":" << n;
        }
        auto s = solve_european(problem, SolverConfig{});
        for (double v : s.final_slice().values()) EXPECT_GE(v, -1e-12) << smooth;
    }
}

TEST(TimeStepper, LocalVolatilityRuns) {
    MarketParams p;
    p.vol_mode = VolMode::local;
    auto g = GridSpec::from_mesh_ratio(2.0, 128, 0.4, p.T);
    auto s = solve_european(p, g, SolverConfig{});
    EXPECT_NEAR(s.price(100.0), 3.183682, 0.005 * 3.183682);
}

TEST(TimeStepper, CentralSchemeBaseline) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 128, 0.4, p.T);
    SolverConfig c;
    c.scheme = SpatialScheme::central;
    auto s = solve_european(p, g, c);
    EXPECT_EQ(s.max_iterations(), 1);
    const double ref = oracle::merton_put(100.0, p.K, p.T, p.r, p.sigma, p.lambda, p.mu_J, p.sigma_J);
    EXPECT_NEAR(s.price(100.0), ref, 0.01 * ref);
}

TEST(TimeStepper, IterationHistogramCountsLevels) {
    MarketParams p;
    auto g = GridSpec::from_mesh_ratio(2.0, 64, 0.4, p.T);
    auto s = solve_european(p, g, SolverConfig{});
    int total = 0;
    for (auto [iters, count] : s.iteration_histogram()) total += count;
    EXPECT_EQ(total, g.M());
}

TEST(StoredLevels, AlwaysContainEnds) {
    auto k = stored_levels(10, 0);
    EXPECT_EQ(k, (std::vector<int>{0, 10}));
    auto all = stored_levels(5, 100);
    EXPECT_EQ(all, (std::vector<int>{0, 1, 2, 3, 4, 5}));
}
