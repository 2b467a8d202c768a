#include "mcfd/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcfd/error.hpp"

namespace mcfd {

namespace {

constexpr double kPivotTolerance = 1e-14;

void check_shape(std::size_t sub, std::size_t diag, std::size_t super) {
    if (diag == 0 || sub != diag || super != diag) {
        throw InvalidParameter("tridiagonal system: diagonals must be non-empty and equally long");
    }
}

double row_scale(double sub, double diag, double super) {
    return std::max({std::abs(sub), std::abs(diag), std::abs(super)});
}

}  // namespace

bool TridiagonalSystem::diagonally_dominant() const {
    bool strict = false;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const double off = (i > 0 ? std::abs(sub[i]) : 0.0) + (i + 1 < diag.size() ? std::abs(super[i]) : 0.0);
        if (std::abs(diag[i]) < off) return false;
        if (std::abs(diag[i]) > off) strict = true;
    }
    return strict;
}

std::vector<std::size_t> TridiagonalSystem::dominance_violations() const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const double off = (i > 0 ? std::abs(sub[i]) : 0.0) + (i + 1 < diag.size() ? std::abs(super[i]) : 0.0);
        if (std::abs(diag[i]) < off) rows.push_back(i);
    }
    return rows;
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
    check_shape(system.sub.size(), system.diag.size(), system.super.size());
    if (system.rhs.size() != system.diag.size()) {
        throw InvalidParameter("tridiagonal system: rhs length mismatch");
    }
    TridiagonalFactor factor(system.sub, system.diag, system.super);
    std::vector<double> x = system.rhs;
    factor.solve(x);
    return x;
}

TridiagonalFactor::TridiagonalFactor(std::span<const double> sub, std::span<const double> diag,
                                     std::span<const double> super)
    : sub_(sub.begin(), sub.end()), upper_(diag.size()), inv_pivot_(diag.size()) {
    check_shape(sub.size(), diag.size(), super.size());
    const std::size_t n = diag.size();
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lower = i > 0 ? sub[i] : 0.0;
        const double pivot = diag[i] - lower * prev_upper;
        const double scale = row_scale(lower, diag[i], i + 1 < n ? super[i] : 0.0);
        if (!(std::abs(pivot) > kPivotTolerance * scale)) {
            std::ostringstream msg;
            msg << "singular tridiagonal system: pivot " << pivot << " at row " << i;
            throw SingularSystem(msg.str());
        }
        inv_pivot_[i] = 1.0 / pivot;
        upper_[i] = i + 1 < n ? super[i] * inv_pivot_[i] : 0.0;
        prev_upper = upper_[i];
    }
}

void TridiagonalFactor::solve(std::span<double> x) const {
    const std::size_t n = inv_pivot_.size();
    if (x.size() != n) throw InvalidParameter("tridiagonal solve: rhs length mismatch");
    x[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) {
        x[i] = (x[i] - sub_[i] * x[i - 1]) * inv_pivot_[i];
    }
    for (std::size_t i = n - 1; i > 0; --i) {
        x[i - 1] -= upper_[i - 1] * x[i];
    }
}

}  // namespace mcfd
