#include "mcfd/greeks_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcfd/compact_operators.hpp"
#include "mcfd/error.hpp"

namespace mcfd {

GreeksSlice compute_greeks(const GridFunction& slice, const GridSpec& grid, const MarketParams& params) {
    slice.check_against(grid);
    CompactDifferentiator diff(grid);
    const GridFunction u_x = diff.first_derivative(slice);
    GridFunction u_xx = compact_second_derivative(slice, u_x, grid.dx());
    const std::size_t last = slice.last();
    u_xx[0] = 2.0 * u_xx[1] - u_xx[2];
    u_xx[last] = 2.0 * u_xx[last - 1] - u_xx[last - 2];

    GreeksSlice g{grid, params.S0, {}, {}, {}};
    g.spot.resize(slice.size());
    g.delta.resize(slice.size());
    g.gamma.resize(slice.size());
    for (std::size_t n = 0; n <= last; ++n) {
        const double S = params.S0 * std::exp(grid.x(static_cast<int>(n)));
        g.spot[n] = S;
        g.delta[n] = u_x[n] / S;
        g.gamma[n] = (u_xx[n] - u_x[n]) / (S * S);
    }
    return g;
}

double GreeksSlice::delta_at(double S) const { return interpolate_cubic(delta, grid, std::log(S / S0)); }
double GreeksSlice::gamma_at(double S) const { return interpolate_cubic(gamma, grid, std::log(S / S0)); }

ModifiedWavenumber modified_wavenumber(DispersionScheme scheme, double omega) {
    const double c = std::cos(omega);
    const double s = std::sin(omega);
    switch (scheme) {
        case DispersionScheme::exact:
            return {omega, omega * omega};
        case DispersionScheme::fd2:
            return {s, 2.0 - 2.0 * c};
        case DispersionScheme::fd4:
            return {4.0 * s / 3.0 - std::sin(2.0 * omega) / 6.0, std::cos(2.0 * omega) / 6.0 - 8.0 * c / 3.0 + 2.5};
        case DispersionScheme::compact_pade:
            return {3.0 * s / (2.0 + c), 12.0 * (1.0 - c) / (2.0 + c)};
        case DispersionScheme::compact_eq14:
            return {3.0 * s / (2.0 + c), (5.0 - 4.0 * c - c * c) / (2.0 + c)};
    }
    throw InvalidParameter("unknown dispersion scheme");
}

namespace {

constexpr std::array<DispersionScheme, 5> kSchemes = {DispersionScheme::exact, DispersionScheme::fd2,
                                                      DispersionScheme::fd4, DispersionScheme::compact_pade,
                                                      DispersionScheme::compact_eq14};

}  // namespace

std::span<const DispersionScheme> all_dispersion_schemes() { return kSchemes; }

std::string_view to_string(DispersionScheme scheme) {
    switch (scheme) {
        case DispersionScheme::exact: return "exact";
        case DispersionScheme::fd2: return "fd2";
        case DispersionScheme::fd4: return "fd4";
        case DispersionScheme::compact_pade: return "compact-pade";
        case DispersionScheme::compact_eq14: return "compact";
    }
    return "unknown";
}

DispersionScheme parse_dispersion_scheme(std::string_view id) {
    for (auto s : kSchemes) {
        if (to_string(s) == id) return s;
    }
    throw InvalidParameter("unknown dispersion scheme id '" + std::string(id) + "'");
}

AmplificationEntry amplification_roots(double theta, const AmplificationInputs& in, std::complex<double> G) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double A = in.a * (c * c + 4.0 * c - 5.0) / (in.dx * in.dx * (2.0 + c)) - in.c;
    const double B = 3.0 * in.b * s / (in.dx * (2.0 + c));
    const std::complex<double> symbol(A, B);

    AmplificationEntry e;
    e.theta = theta;
    e.gamma0 = 1.0 - in.dtau * symbol;
    e.gamma1 = in.lambda * in.dtau * G;
    e.gamma2 = 1.0 + in.dtau * symbol;
    if (std::abs(e.gamma0) == 0.0) throw InvalidParameter("amplification polynomial: gamma0 vanishes");

    // gamma0 p^2 - 2 gamma1 p - gamma2 = 0; pick the sign that avoids cancellation.
    const std::complex<double> disc = std::sqrt(e.gamma1 * e.gamma1 + e.gamma0 * e.gamma2);
    const std::complex<double> q = std::real(std::conj(e.gamma1) * disc) >= 0.0 ? e.gamma1 + disc : e.gamma1 - disc;
    if (std::abs(q) == 0.0) {
        e.p1 = e.p2 = 0.0;
    } else {
        e.p1 = q / e.gamma0;
        e.p2 = -e.gamma2 / q;  // product of roots is -gamma2 / gamma0
    }
    e.root_bound = std::sqrt(std::abs(e.gamma2 / e.gamma0)) + 2.0 * std::abs(e.gamma1 / e.gamma0);
    return e;
}

AmplificationReport amplification_sweep(const GridSpec& grid, const MarketParams& params, double sigma,
                                        const MertonKernel& kernel, int samples) {
    if (samples < 1) throw InvalidParameter("amplification sweep needs at least one sample");
    AmplificationReport report;
    report.sigma = sigma;
    report.bound = 1.0 + 2.0 * params.lambda * grid.dtau();
    const double a = 0.5 * sigma * sigma;
    const AmplificationInputs in{a, params.r - a - params.lambda * kernel.zeta(), params.r + params.lambda,
                                 params.lambda, grid.dx(), grid.dtau()};
    const auto density = kernel.lattice_density();
    report.min_separation = std::numeric_limits<double>::infinity();
    constexpr double kSlack = 1e-12;
    for (int k = 0; k < samples; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / samples;
        const auto e = amplification_roots(theta, in, quadrature_symbol(theta, density, grid.dx()));
        report.max_root = std::max(report.max_root, e.max_root());
        report.min_separation = std::min(report.min_separation, e.separation());
        if (e.max_root() > report.bound + kSlack) report.bound_violations.push_back(theta);
        if (e.max_root() > 1.0 && e.separation() < 1.0) report.separation_violations.push_back(theta);
        if (e.max_root() > e.root_bound + kSlack) report.root_bound_violations.push_back(theta);
        report.entries.push_back(e);
    }
    return report;
}

std::vector<AmplificationReport> amplification_sweep(const GridSpec& grid, const MarketParams& params, int samples) {
    const MertonKernel kernel(grid, params);
    if (params.vol_mode == VolMode::constant) return {amplification_sweep(grid, params, params.sigma, kernel, samples)};
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int n = 0; n <= grid.N(); ++n) {
        for (double tau : {0.0, params.T}) {
            const double s = local_volatility(grid.x(n), tau, params);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    }
    return {amplification_sweep(grid, params, lo, kernel, samples),
            amplification_sweep(grid, params, hi, kernel, samples)};
}

double relative_l2_error(std::span<const double> U, std::span<const double> U_ref) {
    if (U.size() != U_ref.size()) throw InvalidParameter("relative_l2_error: length mismatch");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) {
        num += (U_ref[i] - U[i]) * (U_ref[i] - U[i]);
        den += U_ref[i] * U_ref[i];
    }
    if (den == 0.0) throw InvalidParameter("relative_l2_error: reference has zero norm");
    return std::sqrt(num / den);
}

double relative_l2_error(const GridFunction& U, const GridSpec& grid, const GridFunction& U_ref,
                         const GridSpec& ref_grid) {
    U.check_against(grid);
    U_ref.check_against(ref_grid);
    if (std::abs(grid.L() - ref_grid.L()) > 1e-12 * grid.L() || ref_grid.N() % grid.N() != 0) {
        std::ostringstream msg;
        msg << "relative_l2_error: grids are not nested (N = " << grid.N() << ", N_ref = " << ref_grid.N() << ")";
        throw InvalidParameter(msg.str());
    }
    const std::size_t stride = static_cast<std::size_t>(ref_grid.N() / grid.N());
    std::vector<double> shared(U.size());
    for (std::size_t n = 0; n < U.size(); ++n) shared[n] = U_ref[n * stride];
    return relative_l2_error(U.all(), shared);
}

ConvergenceFit convergence_order(std::span<const int> N, std::span<const double> errors) {
    if (N.size() != errors.size() || N.size() < 3) {
        throw InvalidParameter("convergence_order needs at least three (N, error) pairs");
    }
    const std::size_t n = N.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(errors[i] > 0.0) || N[i] <= 0) throw InvalidParameter("convergence_order: errors must be positive");
        lx[i] = std::log(static_cast<double>(N[i]));
        ly[i] = std::log(errors[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw InvalidParameter("convergence_order: all N identical");
    const double slope = sxy / sxx;
    ConvergenceFit fit;
    fit.order = -slope;
    fit.intercept = my - slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

double StabilityTable::max_spread() const {
    double s = 1.0;
    for (const auto& row : rows) s = std::max(s, row.spread);
    return s;
}

StabilityTable stability_sweep(std::span<const int> Ns, std::span<const double> ratios, double L, double T,
                               const std::function<GridFunction(const GridSpec&)>& solve,
                               const GridFunction& reference, const GridSpec& reference_grid) {
    StabilityTable table;
    for (int N : Ns) {
        StabilityRow row;
        row.N = N;
        row.dx = 2.0 * L / N;
        for (double ratio : ratios) {
            const GridSpec grid = GridSpec::from_mesh_ratio(L, N, ratio, T);
            const GridFunction u = solve(grid);
            row.cells.push_back({N, grid.dx(), ratio, grid.M(),
                                 relative_l2_error(u, grid, reference, reference_grid), false});
        }
        if (!row.cells.empty()) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0;
            for (const auto& c : row.cells) {
                lo = std::min(lo, c.error);
                hi = std::max(hi, c.error);
            }
            for (auto& c : row.cells) c.flagged = c.error > 2.0 * lo;
            row.spread = lo > 0.0 ? hi / lo : 1.0;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace mcfd
