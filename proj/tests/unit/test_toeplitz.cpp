#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "mcfd/error.hpp"
#include "mcfd/toeplitz.hpp"

using namespace mcfd;

namespace {

double rel_max_diff(const std::vector<double>& a, const Eigen::VectorXd& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[static_cast<Eigen::Index>(i)]));
        den = std::max(den, std::abs(b[static_cast<Eigen::Index>(i)]));
    }
    return num / den;
}

}  // namespace

class ToeplitzOracle : public ::testing::TestWithParam<int> {};

TEST_P(ToeplitzOracle, FftMatchesDenseProduct) {
    const int N = GetParam();
    const int n = N - 1;
    std::mt19937_64 rng(N);
    std::normal_distribution<double> z;
    std::vector<double> offsets(2 * n - 1), v(n);
    for (auto& t : offsets) t = z(rng);
    for (auto& x : v) x = z(rng);

    // T(i, j) = offsets[(j - i) + n - 1]
    Eigen::MatrixXd T(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) T(i, j) = offsets[j - i + n - 1];
    const Eigen::VectorXd ref = T * Eigen::Map<Eigen::VectorXd>(v.data(), n);

    ToeplitzConvolver conv(offsets);
    EXPECT_GE(conv.embedding_size(), static_cast<std::size_t>(2 * n - 1));
    EXPECT_LT(rel_max_diff(conv.multiply(v), ref), 1e-10);
    EXPECT_LT(rel_max_diff(toeplitz_multiply_direct(offsets, v), ref), 1e-13);

    ToeplitzConvolver::Workspace ws(conv);
    std::vector<double> y(n);
    conv.multiply(v, y, ws);
    EXPECT_LT(rel_max_diff(y, ref), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Sizes, ToeplitzOracle, ::testing::Values(16, 64, 128, 256));

TEST(Toeplitz, RejectsEvenOffsetLength) {
    std::vector<double> offsets(4, 1.0);
    EXPECT_THROW(ToeplitzConvolver{offsets}, InvalidParameter);
}

TEST(Toeplitz, RejectsWrongVectorLength) {
    std::vector<double> offsets(5, 1.0), v(2);
    ToeplitzConvolver conv(offsets);
    EXPECT_THROW(conv.multiply(v), InvalidParameter);
}

TEST(Toeplitz, MoveKeepsPlans) {
    std::vector<double> offsets = {0.5, 1.0, 2.0};
    ToeplitzConvolver a(offsets);
    ToeplitzConvolver b(std::move(a));
    auto y = b.multiply(std::vector<double>{1.0, 1.0});
    EXPECT_NEAR(y[0], 1.0 + 2.0, 1e-14);
    EXPECT_NEAR(y[1], 0.5 + 1.0, 1e-14);
}
