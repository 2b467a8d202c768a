#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mcfd {

/// Tridiagonal system A x = rhs with A given by three diagonals of equal
/// length n. sub[0] and super[n-1] are ignored.
struct TridiagonalSystem {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
    std::vector<double> rhs;

    std::size_t size() const noexcept { return diag.size(); }

    /// True when |diag_i| >= |sub_i| + |super_i| for every row with strict
    /// inequality in at least one row.
    bool diagonally_dominant() const;
    /// Rows where |diag_i| < |sub_i| + |super_i|.
    std::vector<std::size_t> dominance_violations() const;
};

/// Thomas elimination without pivoting. Throws SingularSystem when a pivot
/// falls below 1e-14 times the row scale.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

/// LU factors of a fixed tridiagonal matrix, reused across many right-hand sides.
class TridiagonalFactor {
public:
    TridiagonalFactor() = default;
    TridiagonalFactor(std::span<const double> sub, std::span<const double> diag, std::span<const double> super);

    std::size_t size() const noexcept { return inv_pivot_.size(); }

    /// Solves in place: x holds the right-hand side on entry.
    void solve(std::span<double> x) const;

private:
    std::vector<double> sub_;
    std::vector<double> upper_;      // modified super-diagonal c'_i
    std::vector<double> inv_pivot_;  // 1 / (diag_i - sub_i c'_{i-1})
};

}  // namespace mcfd
