#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcfd/grid_domain.hpp"
#include "mcfd/jump_integral.hpp"
#include "mcfd/time_stepper.hpp"

namespace mcfd {

// ---------------------------------------------------------------------------
// Greeks

/// Delta and Gamma at every node of one tau slice. Log-coordinate chain rule:
///   Delta = u_x / S,  Gamma = (u_xx - u_x) / S^2
/// with compact u_x and u_xx. The boundary Gammas are extrapolated linearly
/// from the two neighbouring interior nodes.
struct GreeksSlice {
    GridSpec grid;
    double S0 = 100.0;
    std::vector<double> spot;
    std::vector<double> delta;
    std::vector<double> gamma;

    double delta_at(double S) const;
    double gamma_at(double S) const;
};

GreeksSlice compute_greeks(const GridFunction& slice, const GridSpec& grid, const MarketParams& params);

// ---------------------------------------------------------------------------
// Fourier resolution of the difference formulas

enum class DispersionScheme { exact, fd2, fd4, compact_pade, compact_eq14 };

struct ModifiedWavenumber {
    std::complex<double> first;  // purely real for the central schemes (no dissipation)
    double second;
};

/// Modified wavenumbers w' and w'' at scaled wavenumber w in [0, pi].
///   fd2:          sin w,                             2 - 2 cos w
///   fd4:          4 sin w / 3 - sin 2w / 6,          cos 2w / 6 - 8 cos w / 3 + 5/2
///   compact_pade: 3 sin w / (2 + cos w),             12 (1 - cos w) / (2 + cos w)
///   compact_eq14: 3 sin w / (2 + cos w),             (5 - 4 cos w - cos^2 w) / (2 + cos w)
ModifiedWavenumber modified_wavenumber(DispersionScheme scheme, double omega);

/// "exact", "fd2", "fd4", "compact-pade", "compact" (the combined scheme).
/// Throws InvalidParameter for an unknown id.
DispersionScheme parse_dispersion_scheme(std::string_view id);
std::string_view to_string(DispersionScheme scheme);
std::span<const DispersionScheme> all_dispersion_schemes();

// ---------------------------------------------------------------------------
// Von Neumann analysis of the fully discrete scheme

/// Frozen coefficients entering the amplification polynomial.
struct AmplificationInputs {
    double a;       // sigma^2 / 2
    double b;       // r - sigma^2/2 - lambda zeta
    double c;       // r + lambda
    double lambda;
    double dx;
    double dtau;
};

struct AmplificationEntry {
    double theta = 0.0;
    std::complex<double> gamma0, gamma1, gamma2;
    std::complex<double> p1, p2;
    double root_bound = 0.0;  // |gamma2/gamma0|^{1/2} + 2 |gamma1/gamma0|
    double max_root() const { return std::max(std::abs(p1), std::abs(p2)); }
    double separation() const { return std::abs(p1 - p2); }
};

/// Roots of gamma0 p^2 - 2 gamma1 p - gamma2 with
///   gamma0 = 1 - dtau (A + iB),  gamma1 = lambda dtau G(theta),  gamma2 = 1 + dtau (A + iB),
///   A = a (cos^2 + 4 cos - 5) / (dx^2 (2 + cos)) - c,  B = 3 b sin / (dx (2 + cos)).
/// Throws InvalidParameter if gamma0 vanishes.
AmplificationEntry amplification_roots(double theta, const AmplificationInputs& in, std::complex<double> G);

struct AmplificationReport {
    double sigma = 0.0;  // frozen volatility used
    double bound = 0.0;  // 1 + 2 lambda dtau
    std::vector<AmplificationEntry> entries;
    double max_root = 0.0;
    double min_separation = 0.0;
    /// Thetas where some root exceeds the bound.
    std::vector<double> bound_violations;
    /// Thetas with a root of modulus > 1 whose partner is closer than 1.
    std::vector<double> separation_violations;
    /// Thetas where a root exceeds |gamma2/gamma0|^{1/2} + 2|gamma1/gamma0|.
    std::vector<double> root_bound_violations;

    bool stable() const { return bound_violations.empty() && separation_violations.empty(); }
};

/// Sweep `samples` thetas uniformly over [0, 2 pi). Constant-volatility mode
/// freezes sigma = params.sigma; local mode returns the sweep at the smallest
/// and largest nodal sigma.
std::vector<AmplificationReport> amplification_sweep(const GridSpec& grid, const MarketParams& params,
                                                     int samples = 512);
AmplificationReport amplification_sweep(const GridSpec& grid, const MarketParams& params, double sigma,
                                        const MertonKernel& kernel, int samples);

// ---------------------------------------------------------------------------
// Error and order estimation

/// ||U_ref - U|| / ||U_ref|| in l2 over the nodes shared by both grids.
/// The fine grid must refine the coarse one by an integer factor on the same
/// [-L, L]; throws InvalidParameter otherwise.
double relative_l2_error(const GridFunction& U, const GridSpec& grid, const GridFunction& U_ref,
                         const GridSpec& ref_grid);
double relative_l2_error(std::span<const double> U, std::span<const double> U_ref);

struct ConvergenceFit {
    double order = 0.0;  // -slope of log(error) against log(N)
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares fit in log-log space. Needs >= 3 points and positive errors.
ConvergenceFit convergence_order(std::span<const int> N, std::span<const double> errors);

struct StabilityCell {
    int N = 0;
    double dx = 0.0;
    double ratio = 0.0;
    int M = 0;
    double error = 0.0;
    bool flagged = false;  // error > 2 x row minimum
};

struct StabilityRow {
    int N = 0;
    double dx = 0.0;
    std::vector<StabilityCell> cells;
    double spread = 1.0;  // max / min error over the row
};

struct StabilityTable {
    std::vector<StabilityRow> rows;
    double max_spread() const;
};

/// Relative l2 error (tau = T) of one run per (N, ratio) pair against a
/// reference slice. `solve` runs the solver for a given grid.
StabilityTable stability_sweep(std::span<const int> Ns, std::span<const double> ratios, double L, double T,
                               const std::function<GridFunction(const GridSpec&)>& solve,
                               const GridFunction& reference, const GridSpec& reference_grid);

}  // namespace mcfd
