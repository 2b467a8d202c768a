#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mcfd {

/// Product y = T v for an n x n Toeplitz matrix T(i, j) = t[j - i], computed
/// by embedding T in a circulant matrix of size P (smallest power of two
/// >= 2n) and multiplying in Fourier space.
///
/// The kernel spectrum and FFT plans are immutable after construction;
/// multiply() is safe to call concurrently with distinct workspaces.
class ToeplitzConvolver {
public:
    /// `offsets` holds t[d] for d = -(n-1) .. n-1, i.e. offsets[d + n - 1].
    explicit ToeplitzConvolver(std::span<const double> offsets);
    ~ToeplitzConvolver();

    ToeplitzConvolver(const ToeplitzConvolver&) = delete;
    ToeplitzConvolver& operator=(const ToeplitzConvolver&) = delete;
    ToeplitzConvolver(ToeplitzConvolver&&) noexcept;
    ToeplitzConvolver& operator=(ToeplitzConvolver&&) noexcept;

    std::size_t size() const noexcept { return n_; }
    std::size_t embedding_size() const noexcept { return padded_; }

    class Workspace {
    public:
        explicit Workspace(const ToeplitzConvolver& conv);
        ~Workspace();
        Workspace(const Workspace&) = delete;
        Workspace& operator=(const Workspace&) = delete;

    private:
        friend class ToeplitzConvolver;
        double* real_ = nullptr;
        std::complex<double>* spectrum_ = nullptr;
    };

    void multiply(std::span<const double> v, std::span<double> y, Workspace& ws) const;
    std::vector<double> multiply(std::span<const double> v) const;

private:
    struct Plans;

    std::size_t n_ = 0;
    std::size_t padded_ = 0;
    std::vector<std::complex<double>> kernel_spectrum_;
    std::unique_ptr<Plans> plans_;
};

/// Direct O(n^2) product with the same Toeplitz matrix.
std::vector<double> toeplitz_multiply_direct(std::span<const double> offsets, std::span<const double> v);

}  // namespace mcfd
