#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace mcfd {

enum class VolMode { constant, local };
enum class OptionStyle { european, american };

/// Market and Merton jump parameters. Units: rates and intensities per year,
/// jump moments in log-return units, K and S0 in currency, T in years.
struct MarketParams {
    double r = 0.05;
    double sigma = 0.15;
    double lambda = 0.10;
    double mu_J = -0.90;
    double sigma_J = 0.45;
    double K = 100.0;
    double S0 = 100.0;
    double T = 0.25;
    VolMode vol_mode = VolMode::constant;

    /// Throws InvalidParameter unless sigma, sigma_J, T, K, S0 > 0 and lambda >= 0.
    void validate() const;
};

/// Uniform lattice on [-L, L] x [0, T]:
///   x_n = -L + n dx, n = 0..N;  tau_m = m dtau, m = 0..M.
class GridSpec {
public:
    /// N must be even and >= 8 (composite Simpson), M >= 2, L > 0, T > 0.
    GridSpec(double L, int N, int M, double T);

    /// M chosen as ceil(T / (ratio dx^2)) so that dtau/dx^2 is at most `ratio`.
    static GridSpec from_mesh_ratio(double L, int N, double ratio, double T);

    double L() const noexcept { return L_; }
    int N() const noexcept { return N_; }
    int M() const noexcept { return M_; }
    double T() const noexcept { return T_; }
    double dx() const noexcept { return dx_; }
    double dtau() const noexcept { return dtau_; }
    double mesh_ratio() const noexcept { return dtau_ / (dx_ * dx_); }

    double x(int n) const noexcept { return -L_ + n * dx_; }
    double tau(int m) const noexcept { return m * dtau_; }

    std::size_t node_count() const noexcept { return static_cast<std::size_t>(N_) + 1; }
    std::size_t interior_count() const noexcept { return static_cast<std::size_t>(N_) - 1; }

    std::vector<double> nodes() const;

private:
    double L_;
    int N_;
    int M_;
    double T_;
    double dx_;
    double dtau_;
};

/// Nodal values at x_0..x_N of one time level. Index 0 and N hold the
/// Dirichlet values; 1..N-1 are the interior unknowns.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::size_t node_count, double fill = 0.0) : values_(node_count, fill) {}
    explicit GridFunction(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    std::size_t last() const noexcept { return values_.size() - 1; }

    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    double left() const noexcept { return values_.front(); }
    double right() const noexcept { return values_.back(); }
    void set_boundary(double left, double right) noexcept {
        values_.front() = left;
        values_.back() = right;
    }

    std::span<double> all() noexcept { return values_; }
    std::span<const double> all() const noexcept { return values_; }
    std::span<double> interior() noexcept { return std::span<double>(values_).subspan(1, values_.size() - 2); }
    std::span<const double> interior() const noexcept {
        return std::span<const double>(values_).subspan(1, values_.size() - 2);
    }

    const std::vector<double>& values() const noexcept { return values_; }

    /// Throws InvalidParameter when the length disagrees with `grid`.
    void check_against(const GridSpec& grid) const;

private:
    std::vector<double> values_;
};

struct LogCoordinates {
    double x;
    double tau;
};

/// (S, t) -> (ln(S/S0), T - t). Throws InvalidParameter for S <= 0 or t outside [0, T].
LogCoordinates log_transform(double S, double t, const MarketParams& params);
/// Inverse of log_transform: returns (S, t).
std::pair<double, double> inverse_log_transform(double x, double tau, const MarketParams& params);

/// Put payoff max(K - S0 e^x, 0); identical for European and American styles.
double payoff(double x, const MarketParams& params);

/// Log-price of the payoff kink, ln(K/S0).
double payoff_kink(const MarketParams& params);

struct BoundaryValues {
    double left;
    double right;
};

/// Dirichlet data at x = -L and x = +L. European: K e^{-r tau} - S0 e^{-L};
/// American: K - S0 e^{-L} (no discounting). Right boundary is zero for both.
BoundaryValues boundary_values(double tau, OptionStyle style, double L, const MarketParams& params);

/// sigma(x, tau). In local mode:
///   0.15 + 0.15 (0.5 + 2(T - tau)) (s - 1.2)^2 / (s^2 + 1.44),  s = S0 e^x / 100.
/// Constant mode returns params.sigma.
double local_volatility(double x, double tau, const MarketParams& params);

/// Upper bound of local_volatility over the nodes of `grid` at any tau in [0, T].
double local_volatility_bound(const GridSpec& grid, const MarketParams& params);

/// Four-point Lagrange interpolation of nodal data at an arbitrary x in [-L, L].
double interpolate_cubic(std::span<const double> values, const GridSpec& grid, double x);

}  // namespace mcfd
