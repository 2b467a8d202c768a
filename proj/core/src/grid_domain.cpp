#include "mcfd/grid_domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcfd/error.hpp"

namespace mcfd {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw InvalidParameter(what);
}

}  // namespace

void MarketParams::validate() const {
    require(sigma > 0.0, "sigma must be positive");
    require(sigma_J > 0.0, "sigma_J must be positive");
    require(lambda >= 0.0, "lambda must be non-negative");
    require(T > 0.0, "T must be positive");
    require(K > 0.0, "K must be positive");
    require(S0 > 0.0, "S0 must be positive");
}

GridSpec::GridSpec(double L, int N, int M, double T) : L_(L), N_(N), M_(M), T_(T) {
    require(L > 0.0, "L must be positive");
    require(T > 0.0, "T must be positive");
    if (N % 2 != 0) {
        std::ostringstream msg;
        msg << "N must be even for composite Simpson quadrature (got N = " << N << ")";
        throw InvalidParameter(msg.str());
    }
    require(N >= 8, "N must be at least 8");
    require(M >= 2, "M must be at least 2");
    dx_ = 2.0 * L / N;
    dtau_ = T / M;
}

GridSpec GridSpec::from_mesh_ratio(double L, int N, double ratio, double T) {
    require(ratio > 0.0, "mesh ratio must be positive");
    require(N > 0, "N must be positive");
    const double dx = 2.0 * L / N;
    const int M = std::max(2, static_cast<int>(std::ceil(T / (ratio * dx * dx) - 1e-9)));
    return GridSpec(L, N, M, T);
}

std::vector<double> GridSpec::nodes() const {
    std::vector<double> xs(node_count());
    for (int n = 0; n <= N_; ++n) xs[n] = x(n);
    return xs;
}

void GridFunction::check_against(const GridSpec& grid) const {
    if (values_.size() != grid.node_count()) {
        std::ostringstream msg;
        msg << "grid function has " << values_.size() << " nodes, grid expects " << grid.node_count();
        throw InvalidParameter(msg.str());
    }
}

LogCoordinates log_transform(double S, double t, const MarketParams& params) {
    require(S > 0.0, "log_transform: S must be positive");
    require(t >= 0.0 && t <= params.T, "log_transform: t must lie in [0, T]");
    return {std::log(S / params.S0), params.T - t};
}

std::pair<double, double> inverse_log_transform(double x, double tau, const MarketParams& params) {
    return {params.S0 * std::exp(x), params.T - tau};
}

double payoff(double x, const MarketParams& params) {
    return std::max(params.K - params.S0 * std::exp(x), 0.0);
}

double payoff_kink(const MarketParams& params) { return std::log(params.K / params.S0); }

BoundaryValues boundary_values(double tau, OptionStyle style, double L, const MarketParams& params) {
    const double discount = style == OptionStyle::european ? std::exp(-params.r * tau) : 1.0;
    return {params.K * discount - params.S0 * std::exp(-L), 0.0};
}

double local_volatility(double x, double tau, const MarketParams& params) {
    if (params.vol_mode == VolMode::constant) return params.sigma;
    const double s = params.S0 * std::exp(x) / 100.0;
    const double shape = (s - 1.2) * (s - 1.2) / (s * s + 1.44);
    return 0.15 + 0.15 * (0.5 + 2.0 * (params.T - tau)) * shape;
}

double local_volatility_bound(const GridSpec& grid, const MarketParams& params) {
    if (params.vol_mode == VolMode::constant) return params.sigma;
    double shape_max = 0.0;
    for (int n = 0; n <= grid.N(); ++n) {
        const double s = params.S0 * std::exp(grid.x(n)) / 100.0;
        shape_max = std::max(shape_max, (s - 1.2) * (s - 1.2) / (s * s + 1.44));
    }
    return 0.15 + 0.15 * (0.5 + 2.0 * params.T) * shape_max;
}

double interpolate_cubic(std::span<const double> values, const GridSpec& grid, double x) {
    require(values.size() == grid.node_count(), "interpolate_cubic: length mismatch");
    require(x >= -grid.L() - 1e-12 && x <= grid.L() + 1e-12, "interpolate_cubic: x outside [-L, L]");
    const double s = (x + grid.L()) / grid.dx();
    int base = static_cast<int>(std::floor(s)) - 1;
    base = std::clamp(base, 0, grid.N() - 3);
    const double t = s - base;  // position relative to node `base`, in cell units
    double result = 0.0;
    for (int j = 0; j < 4; ++j) {
        double w = 1.0;
        for (int k = 0; k < 4; ++k) {
            if (k != j) w *= (t - k) / static_cast<double>(j - k);
        }
        result += w * values[base + j];
    }
    return result;
}

}  // namespace mcfd
