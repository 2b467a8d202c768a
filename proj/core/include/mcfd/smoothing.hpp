#pragma once

#include <functional>
#include <span>

#include "mcfd/grid_domain.hpp"

namespace mcfd {

/// Fourier transform of the fourth-order smoothing kernel:
///   (sin(w/2) / (w/2))^4 (1 + 2/3 sin^2(w/2)).
double phi4_hat(double omega);

/// Physical-space kernel, supported on [-3, 3]. Since 1 + 2/3 sin^2(w/2)
/// = 4/3 - cos(w)/3, it is 4/3 B(s) - 1/6 (B(s - 1) + B(s + 1)) with B the
/// centred cubic B-spline.
double phi4(double s);

/// (1/dx) int_{-3dx}^{3dx} phi4(y/dx) u0(x - y) dy, by Gauss-Legendre on the
/// pieces between the kernel knots and any listed kinks of u0.
double smooth_at(const std::function<double(double)>& u0, double x, double dx, std::span<const double> kinks = {});

/// Smoothed nodal initial data. Nodes within 3 dx of a listed kink are
/// smoothed; all others take u0(x_n). With no kinks listed every interior
/// node is smoothed. Boundary nodes always take u0(x_0), u0(x_N).
GridFunction smooth_initial_condition(const std::function<double(double)>& u0, const GridSpec& grid,
                                      std::span<const double> kinks = {});

/// The put payoff sampled on the grid, optionally smoothed around its kink.
GridFunction initial_payoff(const GridSpec& grid, const MarketParams& params, bool smooth);

}  // namespace mcfd
