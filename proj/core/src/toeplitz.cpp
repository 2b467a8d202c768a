#include "mcfd/toeplitz.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "mcfd/error.hpp"

namespace mcfd {

namespace {

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct ToeplitzConvolver::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

ToeplitzConvolver::ToeplitzConvolver(std::span<const double> offsets) {
    if (offsets.empty() || offsets.size() % 2 == 0) {
        throw InvalidParameter("Toeplitz offsets must have odd length 2n - 1");
    }
    n_ = (offsets.size() + 1) / 2;
    padded_ = next_power_of_two(2 * n_);
    const std::size_t bins = padded_ / 2 + 1;

    plans_ = std::make_unique<Plans>();
    Workspace ws(*this);
    {
        std::lock_guard lock(planner_mutex());
        plans_->forward = fftw_plan_dft_r2c_1d(static_cast<int>(padded_), ws.real_, as_fftw(ws.spectrum_),
                                               FFTW_ESTIMATE);
        plans_->backward = fftw_plan_dft_c2r_1d(static_cast<int>(padded_), as_fftw(ws.spectrum_), ws.real_,
                                                FFTW_ESTIMATE);
    }

    // Circulant first column: c[k] = t[-k], c[P - k] = t[k].
    std::fill(ws.real_, ws.real_ + padded_, 0.0);
    const std::size_t centre = n_ - 1;
    ws.real_[0] = offsets[centre];
    for (std::size_t k = 1; k < n_; ++k) {
        ws.real_[k] = offsets[centre - k];
        ws.real_[padded_ - k] = offsets[centre + k];
    }
    fftw_execute_dft_r2c(plans_->forward, ws.real_, as_fftw(ws.spectrum_));
    const double norm = 1.0 / static_cast<double>(padded_);
    kernel_spectrum_.assign(ws.spectrum_, ws.spectrum_ + bins);
    for (auto& z : kernel_spectrum_) z *= norm;
}

ToeplitzConvolver::~ToeplitzConvolver() = default;
ToeplitzConvolver::ToeplitzConvolver(ToeplitzConvolver&&) noexcept = default;
ToeplitzConvolver& ToeplitzConvolver::operator=(ToeplitzConvolver&&) noexcept = default;

ToeplitzConvolver::Workspace::Workspace(const ToeplitzConvolver& conv) {
    real_ = fftw_alloc_real(conv.padded_);
    spectrum_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(conv.padded_ / 2 + 1));
    if (!real_ || !spectrum_) throw std::bad_alloc();
}

ToeplitzConvolver::Workspace::~Workspace() {
    fftw_free(real_);
    fftw_free(spectrum_);
}

void ToeplitzConvolver::multiply(std::span<const double> v, std::span<double> y, Workspace& ws) const {
    if (v.size() != n_ || y.size() != n_) throw InvalidParameter("Toeplitz multiply: length mismatch");
    std::copy(v.begin(), v.end(), ws.real_);
    std::fill(ws.real_ + n_, ws.real_ + padded_, 0.0);
    fftw_execute_dft_r2c(plans_->forward, ws.real_, as_fftw(ws.spectrum_));
    for (std::size_t k = 0; k < kernel_spectrum_.size(); ++k) ws.spectrum_[k] *= kernel_spectrum_[k];
    fftw_execute_dft_c2r(plans_->backward, as_fftw(ws.spectrum_), ws.real_);
    std::copy(ws.real_, ws.real_ + n_, y.begin());
}

std::vector<double> ToeplitzConvolver::multiply(std::span<const double> v) const {
    Workspace ws(*this);
    std::vector<double> y(n_);
    multiply(v, y, ws);
    return y;
}

std::vector<double> toeplitz_multiply_direct(std::span<const double> offsets, std::span<const double> v) {
    const std::size_t n = (offsets.size() + 1) / 2;
    if (offsets.size() != 2 * n - 1 || v.size() != n) {
        throw InvalidParameter("Toeplitz direct multiply: length mismatch");
    }
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += offsets[j + n - 1 - i] * v[j];
        y[i] = sum;
    }
    return y;
}

}  // namespace mcfd
