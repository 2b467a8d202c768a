#include "mcfd/smoothing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace mcfd {

namespace {

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double cubic_bspline(double s) {
    const double a = std::abs(s);
    if (a < 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
    if (a < 2.0) {
        const double t = 2.0 - a;
        return t * t * t / 6.0;
    }
    return 0.0;
}

}  // namespace

double phi4_hat(double omega) {
    const double half = 0.5 * omega;
    const double sinc = half == 0.0 ? 1.0 : std::sin(half) / half;
    const double s = std::sin(half);
    return std::pow(sinc, 4) * (1.0 + 2.0 / 3.0 * s * s);
}

double phi4(double s) {
    return 4.0 / 3.0 * cubic_bspline(s) - (cubic_bspline(s - 1.0) + cubic_bspline(s + 1.0)) / 6.0;
}

double smooth_at(const std::function<double(double)>& u0, double x, double dx, std::span<const double> kinks) {
    // Breakpoints in the scaled variable s, where the integrand is u0(x - s dx) phi4(s).
    std::vector<double> breaks = {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
    for (double kink : kinks) {
        const double s = (x - kink) / dx;
        if (s > -3.0 && s < 3.0) breaks.push_back(s);
    }
    std::sort(breaks.begin(), breaks.end());

    double total = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double lo = breaks[p];
        const double hi = breaks[p + 1];
        if (hi - lo <= 0.0) continue;
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        double piece = 0.0;
        for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
            const double s = mid + half * kGaussNodes[q];
            piece += kGaussWeights[q] * phi4(s) * u0(x - s * dx);
        }
        total += half * piece;
    }
    return total;
}

GridFunction smooth_initial_condition(const std::function<double(double)>& u0, const GridSpec& grid,
                                      std::span<const double> kinks) {
    const double dx = grid.dx();
    GridFunction out(grid.node_count());
    for (int n = 0; n <= grid.N(); ++n) {
        const double x = grid.x(n);
        bool near = kinks.empty();
        for (double kink : kinks) near = near || std::abs(x - kink) < 3.0 * dx;
        const bool interior = n > 0 && n < grid.N();
        out[static_cast<std::size_t>(n)] = (interior && near) ? smooth_at(u0, x, dx, kinks) : u0(x);
    }
    return out;
}

GridFunction initial_payoff(const GridSpec& grid, const MarketParams& params, bool smooth) {
    const auto u0 = [&params](double x) { return payoff(x, params); };
    if (!smooth) {
        GridFunction out(grid.node_count());
        for (int n = 0; n <= grid.N(); ++n) out[static_cast<std::size_t>(n)] = u0(grid.x(n));
        return out;
    }
    const std::array<double, 1> kink = {payoff_kink(params)};
    return smooth_initial_condition(u0, grid, kink);
}

}  // namespace mcfd
