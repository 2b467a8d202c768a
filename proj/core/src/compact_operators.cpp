#include "mcfd/compact_operators.hpp"

#include "mcfd/error.hpp"

namespace mcfd {

GridFunction delta_x(const GridFunction& u, double dx) {
    GridFunction out(u.size());
    const double scale = 0.5 / dx;
    for (std::size_t i = 1; i < u.last(); ++i) out[i] = (u[i + 1] - u[i - 1]) * scale;
    return out;
}

GridFunction delta_xx(const GridFunction& u, double dx) {
    GridFunction out(u.size());
    const double scale = 1.0 / (dx * dx);
    for (std::size_t i = 1; i < u.last(); ++i) out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * scale;
    return out;
}

namespace {

struct CompactMatrix {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
};

CompactMatrix compact_matrix(std::size_t nodes) {
    CompactMatrix m{std::vector<double>(nodes, 0.25), std::vector<double>(nodes, 1.0),
                    std::vector<double>(nodes, 0.25)};
    m.sub.front() = 0.0;
    m.super.front() = 3.0;
    m.sub.back() = 3.0;
    m.super.back() = 0.0;
    return m;
}

void compact_rhs(const GridFunction& u, double dx, GridFunction& rhs) {
    const std::size_t last = u.last();
    const double inv = 1.0 / dx;
    rhs[0] = (-17.0 / 6.0 * u[0] + 1.5 * u[1] + 1.5 * u[2] - 1.0 / 6.0 * u[3]) * inv;
    const double interior = 0.75 * inv;
    for (std::size_t i = 1; i < last; ++i) rhs[i] = (u[i + 1] - u[i - 1]) * interior;
    rhs[last] = (17.0 / 6.0 * u[last] - 1.5 * u[last - 1] - 1.5 * u[last - 2] + 1.0 / 6.0 * u[last - 3]) * inv;
}

}  // namespace

CompactDifferentiator::CompactDifferentiator(const GridSpec& grid) : dx_(grid.dx()) {
    const auto m = compact_matrix(grid.node_count());
    factor_ = TridiagonalFactor(m.sub, m.diag, m.super);
}

GridFunction CompactDifferentiator::first_derivative(const GridFunction& u) const {
    GridFunction out;
    first_derivative(u, out);
    return out;
}

void CompactDifferentiator::first_derivative(const GridFunction& u, GridFunction& out) const {
    if (u.size() != factor_.size()) throw InvalidParameter("compact derivative: length mismatch");
    if (out.size() != u.size()) out = GridFunction(u.size());
    compact_rhs(u, dx_, out);
    factor_.solve(out.all());
}

TridiagonalSystem CompactDifferentiator::system(const GridFunction& u) const {
    auto m = compact_matrix(u.size());
    GridFunction rhs(u.size());
    compact_rhs(u, dx_, rhs);
    return {std::move(m.sub), std::move(m.diag), std::move(m.super), rhs.values()};
}

GridFunction compact_first_derivative(const GridFunction& u, const GridSpec& grid) {
    u.check_against(grid);
    return CompactDifferentiator(grid).first_derivative(u);
}

GridFunction compact_second_derivative(const GridFunction& u, const GridFunction& u_x, double dx) {
    if (u.size() != u_x.size()) throw InvalidParameter("compact second derivative: length mismatch");
    GridFunction out(u.size());
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_2dx = 0.5 / dx;
    for (std::size_t i = 1; i < u.last(); ++i) {
        out[i] = 2.0 * (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2 - (u_x[i + 1] - u_x[i - 1]) * inv_2dx;
    }
    return out;
}

DiffusionCoefficients diffusion_coefficients(const GridSpec& grid, const MarketParams& params, double zeta,
                                             double tau) {
    DiffusionCoefficients coeffs;
    const std::size_t n = grid.node_count();
    coeffs.a.resize(n);
    coeffs.b.resize(n);
    coeffs.c = params.r + params.lambda;
    coeffs.uniform = params.vol_mode == VolMode::constant;
    for (std::size_t i = 0; i < n; ++i) {
        const double sigma = local_volatility(grid.x(static_cast<int>(i)), tau, params);
        const double a = 0.5 * sigma * sigma;
        coeffs.a[i] = a;
        coeffs.b[i] = params.r - a - params.lambda * zeta;
    }
    return coeffs;
}

GridFunction apply_discrete_differential(const GridFunction& u, const GridFunction& u_x,
                                         const DiffusionCoefficients& coeffs, double dx) {
    if (u.size() != u_x.size() || coeffs.a.size() != u.size()) {
        throw InvalidParameter("discrete differential operator: length mismatch");
    }
    const GridFunction u_xx = compact_second_derivative(u, u_x, dx);
    GridFunction out(u.size());
    for (std::size_t i = 1; i < u.last(); ++i) {
        out[i] = coeffs.a[i] * u_xx[i] + coeffs.b[i] * u_x[i] - coeffs.c * u[i];
    }
    return out;
}

GridFunction apply_discrete_differential(const GridFunction& u, const GridFunction& u_x, const GridSpec& grid,
                                         const MarketParams& params, double zeta, double tau) {
    return apply_discrete_differential(u, u_x, diffusion_coefficients(grid, params, zeta, tau), grid.dx());
}

const DerivativeCache& DerivativeCache::refresh(const GridFunction& u) {
    if (!source_.empty() && matches(u)) return *this;
    u.check_against(grid_);
    diff_.first_derivative(u, u_x_);
    u_xx_ = compact_second_derivative(u, u_x_, grid_.dx());
    source_ = u.values();
    return *this;
}

}  // namespace mcfd
