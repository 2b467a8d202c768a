#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "mcfd/compact_operators.hpp"
#include "mcfd/grid_domain.hpp"
#include "mcfd/jump_integral.hpp"
#include "mcfd/tridiagonal.hpp"

namespace mcfd {

/// compact: the fourth-order scheme (compact u_x, u_xx = 2 Delta_xx u - Delta_x u_x).
/// central: plain second-order central differences, kept as a baseline.
enum class SpatialScheme { compact, central };

struct LevelStats {
    int level = 0;  // m + 1, the level just computed
    double tau = 0.0;
    int iterations = 0;
    double last_update = 0.0;  // max-norm of the final correction
};

struct SolverConfig {
    double epsilon_inner = 1e-12;
    int max_inner_iterations = 100;
    double mesh_ratio = 0.4;
    bool smoothing = true;
    SpatialScheme scheme = SpatialScheme::compact;
    /// Intermediate tau slices kept in the surface besides tau = 0 and tau = T.
    int stored_slices = 32;
    /// Called after every level when set (structured logging hook).
    std::function<void(const LevelStats&)> on_level;

    void validate() const;
};

/// Everything the stepper needs to march one PIDE. The defaults describe the
/// put problem; tests replace boundary/source/tail for manufactured solutions.
struct PideProblem {
    GridSpec grid;
    MarketParams params;
    OptionStyle style = OptionStyle::european;
    GridFunction initial;
    std::function<BoundaryValues(double tau)> boundary;
    /// Optional forcing s(x, tau) added to the right-hand side of u_tau = L u + s.
    std::function<double(double x, double tau)> source;
    bool include_tail = true;
    /// Early-exercise payoff at the nodes (American problems only).
    GridFunction obstacle = {};

    static PideProblem put(const GridSpec& grid, const MarketParams& params, OptionStyle style, bool smooth);
};

struct StepResult {
    GridFunction values;
    int iterations = 0;
    double last_update = 0.0;
};

/// Fully discrete Crank-Nicolson Leap-Frog stepper with the compact operator.
///
/// For m >= 1 it solves
///   [1 - dtau 2a Delta_xx + dtau c] U^{m+1}
///       = dtau (b - a Delta_x) U_x^{m+1}
///       + U^{m-1} + dtau D U^{m-1} + 2 dtau I U^m (+ 2 dtau psi)
/// where U_x^{m+1} is lagged and corrected to convergence. The first level
/// uses the IMEX step U^1 - dtau D U^1 = U^0 + dtau I U^0 (+ dtau psi).
class CompactStepper {
public:
    CompactStepper(PideProblem problem, SolverConfig config);

    const GridSpec& grid() const noexcept { return problem_.grid; }
    const PideProblem& problem() const noexcept { return problem_; }
    const SolverConfig& config() const noexcept { return config_; }
    const MertonKernel& kernel() const noexcept { return *kernel_; }

    /// Level 1 from level 0. `psi` (optional) is added to the right-hand side.
    StepResult imex_first_step(const GridFunction& U0, const GridFunction* psi = nullptr);

    /// Level m + 1 from levels m - 1 and m (m >= 1).
    StepResult assemble_and_step(const GridFunction& U_prev, const GridFunction& U_curr, int m,
                                 const GridFunction* psi = nullptr);

    /// Fixed-point iteration for the implicit level: `known` holds the
    /// right-hand side without the lagged U_x term, `guess` the starting
    /// iterate (its boundary entries are overwritten with `bc`). Uses the
    /// left-hand matrix and coefficients of the most recent assembly, or
    /// those at `tau_coeffs` if given.
    StepResult correcting_to_convergence(const std::vector<double>& known, const GridFunction& guess,
                                         BoundaryValues bc, int level, std::optional<double> tau_coeffs = {});

    /// Right-hand side pieces and matrices, exposed for the dense oracles.
    const DiffusionCoefficients& coefficients_at(double tau);
    GridFunction integral(const GridFunction& u, double tau);

private:
    void prepare(double tau_coeffs);
    void add_source(double tau, double scale, std::vector<double>& rhs) const;
    /// out[n - 1] += scale * (D u)_n over interior nodes, with the current coefficients.
    void apply_differential(const GridFunction& u, std::vector<double>& out, double scale);

    PideProblem problem_;
    SolverConfig config_;
    CompactDifferentiator diff_;
    std::shared_ptr<const MertonKernel> kernel_;
    std::shared_ptr<const TailCorrection> tail_;
    IntegralOperator integral_;

    DiffusionCoefficients coeffs_;
    std::optional<double> coeffs_tau_;
    TridiagonalFactor lhs_;
    double lhs_sub_first_ = 0.0;   // couples row 1 to the left boundary value
    double lhs_super_last_ = 0.0;  // couples row N-1 to the right boundary value

    // scratch
    GridFunction ux_;
    GridFunction jump_;
    std::vector<double> rhs_;
};

/// Numerical solution over [0, T]; slices are stored in increasing tau and
/// always include tau = 0 and tau = T.
struct SolutionSurface {
    GridSpec grid;
    MarketParams params;
    OptionStyle style = OptionStyle::european;
    bool smoothed = true;
    SpatialScheme scheme = SpatialScheme::compact;
    std::vector<int> levels;
    std::vector<double> taus;
    std::vector<GridFunction> slices;
    /// n_m for m = 1..M (index m - 1).
    std::vector<int> iterations;

    const GridFunction& final_slice() const { return slices.back(); }
    /// Maximum inner iteration count n_s.
    int max_iterations() const;
    std::map<int, int> iteration_histogram() const;
    /// Value at spot S on the final slice (tau = T), cubic interpolation off-node.
    double price(double S) const;
    double value(double S, std::size_t slice) const;
};

SolutionSurface solve_european(const MarketParams& params, const GridSpec& grid, const SolverConfig& config);
SolutionSurface solve_european(const PideProblem& problem, const SolverConfig& config);

/// Slice-selection helper shared by the European and American drivers.
std::vector<int> stored_levels(int M, int stored_slices);

}  // namespace mcfd
