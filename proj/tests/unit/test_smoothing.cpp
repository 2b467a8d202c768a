#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mcfd/smoothing.hpp"
#include "oracles.hpp"

using namespace mcfd;

namespace {

// Composite Simpson with `panels` (even) intervals.
template <class F>
double simpson(F f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST(Phi4, FourierTransformMatchesDefinition) {
    for (double w : {0.0, 0.3, 1.0, 2.5, std::numbers::pi, 5.0, 9.0}) {
        const double ft = oracle::integrate([&](double s) { return phi4(s) * std::cos(w * s); }, -3.0, 3.0);
        EXPECT_NEAR(ft, phi4_hat(w), 1e-12) << w;
    }
}

TEST(Phi4, SupportMassAndMoments) {
    EXPECT_EQ(phi4(3.0), 0.0);
    EXPECT_EQ(phi4(-3.5), 0.0);
    EXPECT_NEAR(phi4(0.2), phi4(-0.2), 1e-15);
    for (int k = 0; k <= 3; ++k) {
        const double m = oracle::integrate([&](double s) { return std::pow(s, k) * phi4(s); }, -3.0, 3.0);
        EXPECT_NEAR(m, k == 0 ? 1.0 : 0.0, 1e-13) << "moment " << k;
    }
    // the fourth moment does not vanish (fourth-order, not fifth)
    EXPECT_GT(std::abs(oracle::integrate([](double s) { return s * s * s * s * phi4(s); }, -3.0, 3.0)), 1e-3);
}

TEST(Smoothing, ReproducesCubicsAndZero) {
    GridSpec g(2.0, 64, 2, 0.25);
    auto cubic = [](double x) { return 2.0 - x + 3.0 * x * x - 0.5 * x * x * x; };
    auto s = smooth_initial_condition(cubic, g);
    for (int n = 0; n <= g.N(); ++n) EXPECT_NEAR(s[n], cubic(g.x(n)), 1e-10);

    auto z = smooth_initial_condition([](double) { return 0.0; }, g);
    for (int n = 0; n <= g.N(); ++n) EXPECT_EQ(z[n], 0.0);
}

TEST(Smoothing, KinkNodeMatchesFineQuadrature) {
    MarketParams p;
    GridSpec g(2.0, 128, 2, p.T);
    const double dx = g.dx();
    auto u0 = [&](double x) { return payoff(x, p); };
    const double kink = payoff_kink(p);
    const int node = g.N() / 2;  // x = 0 = ln(K/S0)
    ASSERT_NEAR(g.x(node), kink, 1e-15);
    const double ref = simpson([&](double s) { return phi4(s) * u0(g.x(node) - s * dx); }, -3.0, 3.0, 12000);
    const double kinks[] = {kink};
    EXPECT_NEAR(smooth_at(u0, g.x(node), dx, kinks), ref, 1e-8);

    auto smoothed = initial_payoff(g, p, true);
    EXPECT_NEAR(smoothed[node], ref, 1e-8);
    EXPECT_GT(smoothed[node], 0.0);  // the kink is rounded off
}

TEST(Smoothing, OffNodeKink) {
    MarketParams p;
    p.K = 103.0;  // kink at ln(1.03), between nodes
    GridSpec g(2.0, 64, 2, p.T);
    auto u0 = [&](double x) { return payoff(x, p); };
    const double dx = g.dx();
    for (int n = 0; n <= g.N(); ++n) {
        const double x = g.x(n);
        if (std::abs(x - payoff_kink(p)) < 3 * dx) {
            // split the reference quadrature at the kink so Simpson sees smooth pieces
            const double sk = (x - payoff_kink(p)) / dx;
            auto f = [&](double s) { return phi4(s) * u0(x - s * dx); };
            const double ref = simpson(f, -3.0, sk, 12000) + simpson(f, sk, 3.0, 12000);
            const double kinks[] = {payoff_kink(p)};
            EXPECT_NEAR(smooth_at(u0, x, dx, kinks), ref, 1e-8) << n;
        }
    }
}

TEST(Smoothing, FarNodesUntouched) {
    MarketParams p;
    GridSpec g(2.0, 96, 2, p.T);
    auto raw = initial_payoff(g, p, false);
    auto sm = initial_payoff(g, p, true);
    int changed = 0;
    for (int n = 0; n <= g.N(); ++n) {
        if (std::abs(g.x(n) - payoff_kink(p)) >= 3 * g.dx()) {
            EXPECT_NEAR(sm[n], raw[n], 1e-10 * p.K) << n;
        } else if (sm[n] != raw[n]) {
            ++changed;
        }
    }
    EXPECT_GT(changed, 0);
    EXPECT_DOUBLE_EQ(sm[0], raw[0]);
    EXPECT_DOUBLE_EQ(sm[g.N()], raw[g.N()]);
}
