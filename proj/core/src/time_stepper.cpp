#include "mcfd/time_stepper.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mcfd/error.hpp"
#include "mcfd/smoothing.hpp"

namespace mcfd {

void SolverConfig::validate() const {
    if (!(epsilon_inner > 0.0)) throw InvalidParameter("epsilon_inner must be positive");
    if (max_inner_iterations < 1) throw InvalidParameter("max_inner_iterations must be at least 1");
    if (!(mesh_ratio > 0.0)) throw InvalidParameter("mesh ratio must be positive");
    if (stored_slices < 0) throw InvalidParameter("stored_slices must be non-negative");
}

PideProblem PideProblem::put(const GridSpec& grid, const MarketParams& params, OptionStyle style, bool smooth) {
    PideProblem problem{grid, params, style, initial_payoff(grid, params, smooth), {}, {}, true,
                        style == OptionStyle::american ? initial_payoff(grid, params, false) : GridFunction{}};
    const double L = grid.L();
    problem.boundary = [params, style, L](double tau) { return boundary_values(tau, style, L, params); };
    return problem;
}

namespace {

std::shared_ptr<const TailCorrection> make_tail(const PideProblem& p) {
    if (!p.include_tail) return std::make_shared<const TailCorrection>(TailCorrection::zero(p.grid));
    return std::make_shared<const TailCorrection>(p.grid, p.params, p.style);
}

const PideProblem& checked(const PideProblem& p, const SolverConfig& config) {
    config.validate();
    p.params.validate();
    p.initial.check_against(p.grid);
    if (!p.boundary) throw InvalidParameter("PIDE problem needs a boundary function");
    return p;
}

}  // namespace

CompactStepper::CompactStepper(PideProblem problem, SolverConfig config)
    : problem_((checked(problem, config), std::move(problem))),
      config_(std::move(config)),
      diff_(problem_.grid),
      kernel_(std::make_shared<const MertonKernel>(problem_.grid, problem_.params)),
      tail_(make_tail(problem_)),
      integral_(kernel_, tail_),
      ux_(problem_.grid.node_count()),
      jump_(problem_.grid.node_count()),
      rhs_(problem_.grid.interior_count()) {}

const DiffusionCoefficients& CompactStepper::coefficients_at(double tau) {
    prepare(tau);
    return coeffs_;
}

GridFunction CompactStepper::integral(const GridFunction& u, double tau) { return integral_.apply(u, tau); }

void CompactStepper::prepare(double tau) {
    if (coeffs_tau_ && (*coeffs_tau_ == tau || coeffs_.uniform)) return;
    coeffs_ = diffusion_coefficients(problem_.grid, problem_.params, kernel_->zeta(), tau);
    coeffs_tau_ = tau;

    const std::size_t interior = problem_.grid.interior_count();
    const double dtau = problem_.grid.dtau();
    const double dx = problem_.grid.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    std::vector<double> sub(interior), diag(interior), super(interior);
    for (std::size_t k = 0; k < interior; ++k) {
        const double a = coeffs_.a[k + 1];
        const double b = coeffs_.b[k + 1];
        if (config_.scheme == SpatialScheme::compact) {
            diag[k] = 1.0 + dtau * coeffs_.c + 4.0 * a * dtau * inv_dx2;
            sub[k] = -2.0 * a * dtau * inv_dx2;
            super[k] = sub[k];
        } else {
            diag[k] = 1.0 + dtau * coeffs_.c + 2.0 * a * dtau * inv_dx2;
            sub[k] = -dtau * (a * inv_dx2 - 0.5 * b / dx);
            super[k] = -dtau * (a * inv_dx2 + 0.5 * b / dx);
        }
    }
    lhs_sub_first_ = sub.front();
    lhs_super_last_ = super.back();
    lhs_ = TridiagonalFactor(sub, diag, super);
}

void CompactStepper::add_source(double tau, double scale, std::vector<double>& rhs) const {
    if (!problem_.source) return;
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        rhs[k] += scale * problem_.source(problem_.grid.x(static_cast<int>(k + 1)), tau);
    }
}

void CompactStepper::apply_differential(const GridFunction& u, std::vector<double>& out, double scale) {
    const double dx = problem_.grid.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_2dx = 0.5 / dx;
    const std::size_t last = u.last();
    if (config_.scheme == SpatialScheme::compact) {
        diff_.first_derivative(u, ux_);
        for (std::size_t n = 1; n < last; ++n) {
            const double uxx = 2.0 * (u[n + 1] - 2.0 * u[n] + u[n - 1]) * inv_dx2 - (ux_[n + 1] - ux_[n - 1]) * inv_2dx;
            out[n - 1] += scale * (coeffs_.a[n] * uxx + coeffs_.b[n] * ux_[n] - coeffs_.c * u[n]);
        }
    } else {
        for (std::size_t n = 1; n < last; ++n) {
            const double uxx = (u[n + 1] - 2.0 * u[n] + u[n - 1]) * inv_dx2;
            const double ux = (u[n + 1] - u[n - 1]) * inv_2dx;
            out[n - 1] += scale * (coeffs_.a[n] * uxx + coeffs_.b[n] * ux - coeffs_.c * u[n]);
        }
    }
}

StepResult CompactStepper::imex_first_step(const GridFunction& U0, const GridFunction* psi) {
    const auto& grid = problem_.grid;
    U0.check_against(grid);
    const double dtau = grid.dtau();
    const double tau1 = grid.tau(1);
    prepare(tau1);

    integral_.apply(U0, 0.0, jump_);
    std::vector<double> known(grid.interior_count());
    for (std::size_t k = 0; k < known.size(); ++k) {
        known[k] = U0[k + 1] + dtau * jump_[k + 1] + (psi ? dtau * (*psi)[k + 1] : 0.0);
    }
    add_source(tau1, dtau, known);
    return correcting_to_convergence(known, U0, problem_.boundary(tau1), 1);
}

StepResult CompactStepper::assemble_and_step(const GridFunction& U_prev, const GridFunction& U_curr, int m,
                                             const GridFunction* psi) {
    const auto& grid = problem_.grid;
    if (m < 1) throw InvalidParameter("assemble_and_step needs m >= 1; use imex_first_step for level 1");
    U_prev.check_against(grid);
    U_curr.check_against(grid);
    const double dtau = grid.dtau();
    const double tau_m = grid.tau(m);
    prepare(tau_m);

    std::vector<double> known(grid.interior_count());
    for (std::size_t k = 0; k < known.size(); ++k) known[k] = U_prev[k + 1];
    apply_differential(U_prev, known, dtau);
    integral_.apply(U_curr, tau_m, jump_);
    for (std::size_t k = 0; k < known.size(); ++k) {
        known[k] += 2.0 * dtau * jump_[k + 1] + (psi ? 2.0 * dtau * (*psi)[k + 1] : 0.0);
    }
    add_source(tau_m, 2.0 * dtau, known);
    return correcting_to_convergence(known, U_curr, problem_.boundary(grid.tau(m + 1)), m + 1);
}

StepResult CompactStepper::correcting_to_convergence(const std::vector<double>& known, const GridFunction& guess,
                                                     BoundaryValues bc, int level, std::optional<double> tau_coeffs) {
    const auto& grid = problem_.grid;
    if (known.size() != grid.interior_count()) throw InvalidParameter("correcting_to_convergence: rhs length");
    guess.check_against(grid);
    if (tau_coeffs) prepare(*tau_coeffs);
    if (!coeffs_tau_) prepare(grid.tau(level));

    const double dtau = grid.dtau();
    const double inv_2dx = 0.5 / grid.dx();
    const std::size_t last = grid.node_count() - 1;

    StepResult result{guess, 0, 0.0};
    GridFunction& U = result.values;
    U.set_boundary(bc.left, bc.right);

    auto assemble_fixed = [&](std::vector<double>& rhs) {
        std::copy(known.begin(), known.end(), rhs.begin());
        rhs.front() -= lhs_sub_first_ * bc.left;
        rhs.back() -= lhs_super_last_ * bc.right;
    };

    if (config_.scheme == SpatialScheme::central) {
        assemble_fixed(rhs_);
        lhs_.solve(rhs_);
        for (std::size_t n = 1; n < last; ++n) U[n] = rhs_[n - 1];
        result.iterations = 1;
        return result;
    }

    for (int it = 1; it <= config_.max_inner_iterations; ++it) {
        diff_.first_derivative(U, ux_);
        assemble_fixed(rhs_);
        for (std::size_t n = 1; n < last; ++n) {
            rhs_[n - 1] += dtau * (coeffs_.b[n] * ux_[n] - coeffs_.a[n] * (ux_[n + 1] - ux_[n - 1]) * inv_2dx);
        }
        lhs_.solve(rhs_);
        double update = 0.0;
        for (std::size_t n = 1; n < last; ++n) {
            update = std::max(update, std::abs(rhs_[n - 1] - U[n]));
            U[n] = rhs_[n - 1];
        }
        result.iterations = it;
        result.last_update = update;
        if (update < config_.epsilon_inner) return result;
    }
    std::ostringstream msg;
    msg << "correcting-to-convergence did not reach " << config_.epsilon_inner << " within "
        << config_.max_inner_iterations << " iterations at level " << level << " (last update " << result.last_update
        << ")";
    throw InnerIterationDivergence(msg.str(), level, result.last_update);
}

int SolutionSurface::max_iterations() const {
    return iterations.empty() ? 0 : *std::max_element(iterations.begin(), iterations.end());
}

std::map<int, int> SolutionSurface::iteration_histogram() const {
    std::map<int, int> hist;
    for (int n : iterations) ++hist[n];
    return hist;
}

double SolutionSurface::price(double S) const { return value(S, slices.size() - 1); }

double SolutionSurface::value(double S, std::size_t slice) const {
    if (!(S > 0.0)) throw InvalidParameter("spot must be positive");
    return interpolate_cubic(slices.at(slice).all(), grid, std::log(S / params.S0));
}

std::vector<int> stored_levels(int M, int stored_slices) {
    std::set<int> keep = {0, M};
    if (stored_slices > 0) {
        const int stride = std::max(1, M / (stored_slices + 1));
        for (int m = stride; m < M; m += stride) keep.insert(m);
    }
    return {keep.begin(), keep.end()};
}

SolutionSurface solve_european(const MarketParams& params, const GridSpec& grid, const SolverConfig& config) {
    return solve_european(PideProblem::put(grid, params, OptionStyle::european, config.smoothing), config);
}

SolutionSurface solve_european(const PideProblem& problem, const SolverConfig& config) {
    CompactStepper stepper(problem, config);
    const auto& grid = stepper.grid();
    const int M = grid.M();

    SolutionSurface surface{grid, problem.params, problem.style, config.smoothing, config.scheme, {}, {}, {}, {}};
    surface.iterations.reserve(static_cast<std::size_t>(M));

    const auto keep = stored_levels(M, config.stored_slices);
    auto next_keep = keep.begin();
    auto record = [&](int m, const GridFunction& u) {
        if (next_keep != keep.end() && *next_keep == m) {
            surface.levels.push_back(m);
            surface.taus.push_back(grid.tau(m));
            surface.slices.push_back(u);
            ++next_keep;
        }
    };
    auto report = [&](int level, const StepResult& step) {
        surface.iterations.push_back(step.iterations);
        if (config.on_level) config.on_level({level, grid.tau(level), step.iterations, step.last_update});
    };

    GridFunction prev = problem.initial;
    const auto bc0 = problem.boundary(0.0);
    prev.set_boundary(bc0.left, bc0.right);
    record(0, prev);

    StepResult first = stepper.imex_first_step(prev);
    report(1, first);
    GridFunction curr = std::move(first.values);
    record(1, curr);

    for (int m = 1; m < M; ++m) {
        StepResult step = stepper.assemble_and_step(prev, curr, m);
        report(m + 1, step);
        prev = std::move(curr);
        curr = std::move(step.values);
        record(m + 1, curr);
    }
    return surface;
}

}  // namespace mcfd
