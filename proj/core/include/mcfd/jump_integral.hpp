#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "mcfd/grid_domain.hpp"
#include "mcfd/toeplitz.hpp"

namespace mcfd {

/// Gaussian jump-size density exp(-(y - mu_J)^2 / (2 sigma_J^2)) / (sigma_J sqrt(2 pi)).
double merton_density(double y, const MarketParams& params);

/// Drift compensator zeta = E[e^J - 1] = exp(mu_J + sigma_J^2 / 2) - 1.
double compute_zeta(const MarketParams& params);

/// Standard normal CDF via erfc, accurate in the tails.
double std_normal_cdf(double y);

/// Closed-form jump integral over the truncated exterior R \ (-L, L), using
/// the far-field put asymptotics (intrinsic value to the left, zero to the right).
double tail_correction(double x, double tau, double L, OptionStyle style, const MarketParams& params);

/// Precomputed density samples on the lattice offsets, Simpson weights and
/// the FFT form of the Toeplitz quadrature matrix. Immutable after construction.
class MertonKernel {
public:
    MertonKernel(const GridSpec& grid, const MarketParams& params);

    const GridSpec& grid() const noexcept { return grid_; }
    double zeta() const noexcept { return zeta_; }
    double lambda() const noexcept { return lambda_; }

    /// g(d dx) for d = -N..N.
    double sample(int offset) const noexcept { return samples_[static_cast<std::size_t>(offset + grid_.N())]; }
    std::span<const double> samples() const noexcept { return samples_; }

    /// g(x_k) for k = 0..N (the density over the lattice itself).
    std::vector<double> lattice_density() const;

    /// Simpson weight of interior node j (1 <= j <= N-1): 4 for odd j, 2 for even j.
    static double interior_weight(std::size_t j) noexcept { return j % 2 == 1 ? 4.0 : 2.0; }

    /// dx/3 g(x_0 - x_n) and dx/3 g(x_N - x_n), the end terms of the Simpson sum.
    double left_edge(std::size_t n) const noexcept { return left_edge_[n]; }
    double right_edge(std::size_t n) const noexcept { return right_edge_[n]; }

    const ToeplitzConvolver& toeplitz() const noexcept { return *toeplitz_; }

    /// Toeplitz entries dx/3 g(d dx), d = -(N-2)..N-2 (for oracles and diagnostics).
    std::vector<double> toeplitz_offsets() const;

private:
    GridSpec grid_;
    double zeta_;
    double lambda_;
    std::vector<double> samples_;
    std::vector<double> left_edge_;
    std::vector<double> right_edge_;
    std::shared_ptr<const ToeplitzConvolver> toeplitz_;
};

/// Per-node factors of the tail integral so that
///   Upsilon(x_n, tau) = K disc(tau) A_n - B_n,  disc = e^{-r tau} (European) or 1 (American).
class TailCorrection {
public:
    TailCorrection(const GridSpec& grid, const MarketParams& params, OptionStyle style);
    /// All-zero tail (for manufactured or homogeneous problems).
    static TailCorrection zero(const GridSpec& grid);

    OptionStyle style() const noexcept { return style_; }
    double value(std::size_t n, double tau) const noexcept {
        return strike_ * discount(tau) * cash_[n] - asset_[n];
    }
    std::vector<double> values(double tau) const;

private:
    TailCorrection() = default;
    double discount(double tau) const noexcept;

    OptionStyle style_ = OptionStyle::european;
    double strike_ = 0.0;
    double rate_ = 0.0;
    std::vector<double> cash_;
    std::vector<double> asset_;
};

/// I_delta u = lambda (B~_g u~ + P + Upsilon) at interior nodes; entries 0 and
/// N of the result are zero. Holds an FFT workspace, so one instance per thread.
class IntegralOperator {
public:
    IntegralOperator(std::shared_ptr<const MertonKernel> kernel, std::shared_ptr<const TailCorrection> tail);

    void apply(const GridFunction& u, double tau, GridFunction& out);
    GridFunction apply(const GridFunction& u, double tau);

    const MertonKernel& kernel() const noexcept { return *kernel_; }

private:
    std::shared_ptr<const MertonKernel> kernel_;
    std::shared_ptr<const TailCorrection> tail_;
    ToeplitzConvolver::Workspace workspace_;
    std::vector<double> weighted_;
    std::vector<double> product_;
};

GridFunction apply_integral_operator(const GridFunction& u, const MertonKernel& kernel, const TailCorrection& tail,
                                     double tau);

/// G(theta) = dx sum_k w_k e^{i theta k} g_k over the lattice density g_k = g(x_k),
/// with Simpson weights w = [1, 4, 2, ..., 4, 1] / 3.
std::complex<double> quadrature_symbol(double theta, std::span<const double> lattice_density, double dx);
std::complex<double> quadrature_symbol(double theta, const MertonKernel& kernel);

}  // namespace mcfd
