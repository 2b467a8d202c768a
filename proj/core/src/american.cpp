#include "mcfd/american.hpp"

#include <algorithm>

#include "mcfd/error.hpp"

namespace mcfd {

AmericanStepper::AmericanStepper(PideProblem problem, SolverConfig config)
    : stepper_(std::move(problem), std::move(config)), obstacle_(stepper_.problem().obstacle) {
    if (obstacle_.size() != stepper_.grid().node_count()) {
        throw InvalidParameter("American problem needs an obstacle sampled at every node");
    }
}

SplitState AmericanStepper::project(const GridFunction& unconstrained, const GridFunction& psi, double h) const {
    SplitState next{unconstrained, GridFunction(unconstrained.size())};
    const std::size_t last = unconstrained.last();
    for (std::size_t n = 1; n < last; ++n) {
        const double projected = std::max(obstacle_[n], unconstrained[n] - h * psi[n]);
        next.U[n] = projected;
        next.Psi[n] = (projected - unconstrained[n]) / h + psi[n];
    }
    return next;
}

SplitState AmericanStepper::first_step(const SplitState& state, int* iterations) {
    StepResult step = stepper_.imex_first_step(state.U, &state.Psi);
    if (iterations) *iterations = step.iterations;
    return project(step.values, state.Psi, stepper_.grid().dtau());
}

SplitState AmericanStepper::american_step(const GridFunction& U_prev, const SplitState& curr, int m, int* iterations) {
    StepResult step = stepper_.assemble_and_step(U_prev, curr.U, m, &curr.Psi);
    if (iterations) *iterations = step.iterations;
    return project(step.values, curr.Psi, 2.0 * stepper_.grid().dtau());
}

std::optional<int> AmericanSurface::exercise_boundary_node() const {
    const GridFunction& u = final_slice();
    std::optional<int> node;
    for (int n = 1; n < grid.N(); ++n) {
        if (u[static_cast<std::size_t>(n)] <= payoff(grid.x(n), params) + 1e-12 * params.K &&
            payoff(grid.x(n), params) > 0.0) {
            node = n;
        }
    }
    return node;
}

AmericanSurface solve_american(const MarketParams& params, const GridSpec& grid, const SolverConfig& config) {
    return solve_american(PideProblem::put(grid, params, OptionStyle::american, config.smoothing), config);
}

AmericanSurface solve_american(const PideProblem& problem, const SolverConfig& config) {
    if (problem.style != OptionStyle::american) throw InvalidParameter("solve_american needs an American problem");
    AmericanStepper american(problem, config);
    const auto& grid = american.stepper().grid();
    const int M = grid.M();

    AmericanSurface surface{SolutionSurface{grid, problem.params, problem.style, config.smoothing, config.scheme, {}, {}, {}, {}}, {}};
    surface.iterations.reserve(static_cast<std::size_t>(M));

    const auto keep = stored_levels(M, config.stored_slices);
    auto next_keep = keep.begin();
    auto record = [&](int m, const SplitState& s) {
        if (next_keep != keep.end() && *next_keep == m) {
            surface.levels.push_back(m);
            surface.taus.push_back(grid.tau(m));
            surface.slices.push_back(s.U);
            surface.multipliers.push_back(s.Psi);
            ++next_keep;
        }
    };
    auto report = [&](int level, int iterations) {
        surface.iterations.push_back(iterations);
        if (config.on_level) config.on_level({level, grid.tau(level), iterations, 0.0});
    };

    SplitState prev{problem.initial, GridFunction(grid.node_count(), 0.0)};
    const auto bc0 = problem.boundary(0.0);
    prev.U.set_boundary(bc0.left, bc0.right);
    record(0, prev);

    int iterations = 0;
    SplitState curr = american.first_step(prev, &iterations);
    report(1, iterations);
    record(1, curr);

    for (int m = 1; m < M; ++m) {
        SplitState next = american.american_step(prev.U, curr, m, &iterations);
        report(m + 1, iterations);
        prev = std::move(curr);
        curr = std::move(next);
        record(m + 1, curr);
    }
    return surface;
}

}  // namespace mcfd
