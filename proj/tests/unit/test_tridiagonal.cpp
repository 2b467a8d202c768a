#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "mcfd/error.hpp"
#include "mcfd/tridiagonal.hpp"

using namespace mcfd;

TEST(Tridiagonal, Identity) {
    TridiagonalSystem s{{0, 0, 0, 0}, {1, 1, 1, 1}, {0, 0, 0, 0}, {3, -1, 2.5, 7}};
    auto x = solve_tridiagonal(s);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(x[i], s.rhs[i]);
}

TEST(Tridiagonal, ConstructedSolution) {
    const std::size_t n = 10;
    TridiagonalSystem s{std::vector<double>(n, 1.0), std::vector<double>(n, 2.0), std::vector<double>(n, 1.0),
                        std::vector<double>(n, 4.0)};
    s.rhs.front() = 3.0;
    s.rhs.back() = 3.0;
    auto x = solve_tridiagonal(s);
    for (double v : x) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(Tridiagonal, MatchesDenseEliminationOnRandomDominantSystems) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 64;
        TridiagonalSystem s{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                            std::vector<double>(n)};
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) {
            s.sub[i] = i > 0 ? u(rng) : 0.0;
            s.super[i] = i + 1 < n ? u(rng) : 0.0;
            s.diag[i] = (std::abs(s.sub[i]) + std::abs(s.super[i])) + 0.1 + std::abs(u(rng));
            if (u(rng) < 0) s.diag[i] = -s.diag[i];
            s.rhs[i] = 10.0 * u(rng);
            A(i, i) = s.diag[i];
            if (i > 0) A(i, i - 1) = s.sub[i];
            if (i + 1 < n) A(i, i + 1) = s.super[i];
            b[i] = s.rhs[i];
        }
        ASSERT_TRUE(s.diagonally_dominant());
        Eigen::VectorXd ref = A.partialPivLu().solve(b);
        auto x = solve_tridiagonal(s);
        const double scale = ref.cwiseAbs().maxCoeff();
        for (int i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref[i], 1e-10 * scale);
    }
}

TEST(Tridiagonal, FactorReusable) {
    std::vector<double> sub = {0, -1, -1, -1}, diag = {4, 4, 4, 4}, super = {-1, -1, -1, 0};
    TridiagonalFactor f(sub, diag, super);
    std::vector<double> a = {3, 2, 2, 3};
    f.solve(a);
    for (double v : a) EXPECT_NEAR(v, 1.0, 1e-15);
    std::vector<double> b = {6, 4, 4, 6};
    f.solve(b);
    for (double v : b) EXPECT_NEAR(v, 2.0, 1e-15);
}

TEST(Tridiagonal, SingularPivotRaises) {
    TridiagonalSystem s{{0, 1}, {1, 1}, {1, 0}, {1, 1}};
    EXPECT_THROW(solve_tridiagonal(s), SingularSystem);
    TridiagonalSystem z{{0}, {0.0}, {0}, {1}};
    EXPECT_THROW(solve_tridiagonal(z), SingularSystem);
}

TEST(Tridiagonal, DimensionMismatch) {
    TridiagonalSystem s{{0, 1}, {1, 1, 1}, {1, 0}, {1, 1}};
    EXPECT_THROW(solve_tridiagonal(s), InvalidParameter);
}

TEST(Tridiagonal, DominanceDiagnostics) {
    TridiagonalSystem s{{0, 3, 1}, {1, 2, 5}, {2, 1, 0}, {0, 0, 0}};
    auto v = s.dominance_violations();
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0], 0u);
    EXPECT_EQ(v[1], 1u);
    EXPECT_FALSE(s.diagonally_dominant());
}
