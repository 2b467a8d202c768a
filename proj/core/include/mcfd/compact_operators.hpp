#pragma once

#include <vector>

#include "mcfd/grid_domain.hpp"
#include "mcfd/tridiagonal.hpp"

namespace mcfd {

/// Second-order central differences at interior nodes; entries 0 and N of
/// the result are zero. Nodes 1 and N-1 read the boundary values of u.
GridFunction delta_x(const GridFunction& u, double dx);
GridFunction delta_xx(const GridFunction& u, double dx);

/// Fourth-order compact first derivative on all nodes 0..N.
///
/// Interior rows:  1/4 u'_{i-1} + u'_i + 1/4 u'_{i+1} = 3/(4 dx) (u_{i+1} - u_{i-1})
/// Node 0:         u'_0 + 3 u'_1 = (-17/6 u_0 + 3/2 u_1 + 3/2 u_2 - 1/6 u_3) / dx
/// Node N mirrors node 0 with the signs of the right-hand side flipped.
///
/// The matrix depends only on N, so the factorization is built once and
/// reused for every level.
class CompactDifferentiator {
public:
    explicit CompactDifferentiator(const GridSpec& grid);

    double dx() const noexcept { return dx_; }
    std::size_t node_count() const noexcept { return factor_.size(); }

    GridFunction first_derivative(const GridFunction& u) const;
    /// Writes the first derivative into `out` (resized as needed).
    void first_derivative(const GridFunction& u, GridFunction& out) const;

    /// The assembled system for u (handy for diagnostics and oracles).
    TridiagonalSystem system(const GridFunction& u) const;

private:
    double dx_;
    TridiagonalFactor factor_;
};

GridFunction compact_first_derivative(const GridFunction& u, const GridSpec& grid);

/// u_xx_i = 2 Delta_xx u_i - Delta_x u_x_i at interior nodes (zero at 0 and N).
GridFunction compact_second_derivative(const GridFunction& u, const GridFunction& u_x, double dx);

/// Nodewise coefficients of the discrete differential operator
///   D u = a (2 Delta_xx u - Delta_x u_x) + b u_x - c u
/// with a = sigma^2/2, b = r - sigma^2/2 - lambda zeta, c = r + lambda.
struct DiffusionCoefficients {
    std::vector<double> a;
    std::vector<double> b;
    double c = 0.0;
    bool uniform = true;  // a and b do not vary with x
};

DiffusionCoefficients diffusion_coefficients(const GridSpec& grid, const MarketParams& params, double zeta,
                                             double tau);

/// Discrete differential operator at interior nodes (zero at 0 and N).
GridFunction apply_discrete_differential(const GridFunction& u, const GridFunction& u_x,
                                         const DiffusionCoefficients& coeffs, double dx);
GridFunction apply_discrete_differential(const GridFunction& u, const GridFunction& u_x, const GridSpec& grid,
                                         const MarketParams& params, double zeta, double tau);

/// Compact first and second derivatives of one grid function. refresh()
/// recomputes only when the values differ from the last call.
class DerivativeCache {
public:
    explicit DerivativeCache(const GridSpec& grid) : grid_(grid), diff_(grid) {}

    const DerivativeCache& refresh(const GridFunction& u);

    const GridFunction& u_x() const noexcept { return u_x_; }
    const GridFunction& u_xx() const noexcept { return u_xx_; }
    bool matches(const GridFunction& u) const { return u.values() == source_; }

private:
    GridSpec grid_;
    CompactDifferentiator diff_;
    std::vector<double> source_;
    GridFunction u_x_;
    GridFunction u_xx_;
};

}  // namespace mcfd
