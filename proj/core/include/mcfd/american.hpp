#pragma once

#include <optional>

#include "mcfd/time_stepper.hpp"

namespace mcfd {

/// Price and the multiplier psi = U_tau - L U of one level.
struct SplitState {
    GridFunction U;
    GridFunction Psi;
};

/// One level of the operator-splitting method for the American put LCP.
///
/// With h = dtau at the first level and h = 2 dtau afterwards:
///   1. U~  solves the unconstrained step with +Psi^m on the right-hand side,
///   2. U^{m+1}   = max(f, U~ - h Psi^m),
///   3. Psi^{m+1} = (U^{m+1} - U~) / h + Psi^m.
/// The pair satisfies Psi >= 0, U >= f and Psi (U - f) = 0 by construction.
class AmericanStepper {
public:
    AmericanStepper(PideProblem problem, SolverConfig config);

    CompactStepper& stepper() noexcept { return stepper_; }
    const GridFunction& obstacle() const noexcept { return obstacle_; }

    /// Level 1 from level 0 (Psi^0 is taken from `state`).
    SplitState first_step(const SplitState& state, int* iterations = nullptr);
    /// Level m + 1 from U^{m-1} and the state at level m.
    SplitState american_step(const GridFunction& U_prev, const SplitState& curr, int m, int* iterations = nullptr);

    /// Projection and multiplier update shared by both steps.
    SplitState project(const GridFunction& unconstrained, const GridFunction& psi, double h) const;

private:
    CompactStepper stepper_;
    GridFunction obstacle_;
};

struct AmericanSurface : SolutionSurface {
    /// Multiplier on the stored slices (aligned with `slices`).
    std::vector<GridFunction> multipliers;

    /// Largest node index where the final slice still equals the payoff,
    /// i.e. the discrete early-exercise boundary; nullopt when never exercised.
    std::optional<int> exercise_boundary_node() const;
};

AmericanSurface solve_american(const MarketParams& params, const GridSpec& grid, const SolverConfig& config);
AmericanSurface solve_american(const PideProblem& problem, const SolverConfig& config);

}  // namespace mcfd
