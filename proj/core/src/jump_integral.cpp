#include "mcfd/jump_integral.hpp"

#include <cmath>
#include <numbers>

#include "mcfd/error.hpp"

namespace mcfd {

double merton_density(double y, const MarketParams& params) {
    const double z = (y - params.mu_J) / params.sigma_J;
    return std::exp(-0.5 * z * z) / (params.sigma_J * std::sqrt(2.0 * std::numbers::pi));
}

double compute_zeta(const MarketParams& params) {
    return std::expm1(params.mu_J + 0.5 * params.sigma_J * params.sigma_J);
}

double std_normal_cdf(double y) { return 0.5 * std::erfc(-y / std::numbers::sqrt2); }

double tail_correction(double x, double tau, double L, OptionStyle style, const MarketParams& params) {
    const double mu = params.mu_J;
    const double sj = params.sigma_J;
    const double discount = style == OptionStyle::european ? std::exp(-params.r * tau) : 1.0;
    return params.K * discount * std_normal_cdf(-(x + mu + L) / sj) -
           params.S0 * std::exp(x + 0.5 * sj * sj + mu) * std_normal_cdf(-(x + sj * sj + mu + L) / sj);
}

MertonKernel::MertonKernel(const GridSpec& grid, const MarketParams& params)
    : grid_(grid), zeta_(compute_zeta(params)), lambda_(params.lambda) {
    const int N = grid.N();
    const double dx = grid.dx();
    samples_.resize(2 * static_cast<std::size_t>(N) + 1);
    for (int d = -N; d <= N; ++d) samples_[static_cast<std::size_t>(d + N)] = merton_density(d * dx, params);

    left_edge_.assign(grid.node_count(), 0.0);
    right_edge_.assign(grid.node_count(), 0.0);
    for (int n = 0; n <= N; ++n) {
        left_edge_[n] = dx / 3.0 * sample(-n);
        right_edge_[n] = dx / 3.0 * sample(N - n);
    }
    const auto offsets = toeplitz_offsets();
    toeplitz_ = std::make_shared<const ToeplitzConvolver>(offsets);
}

std::vector<double> MertonKernel::lattice_density() const {
    const int N = grid_.N();
    std::vector<double> g(grid_.node_count());
    for (int k = 0; k <= N; ++k) g[k] = sample(k - N / 2);
    return g;
}

std::vector<double> MertonKernel::toeplitz_offsets() const {
    const int span = grid_.N() - 2;
    const double scale = grid_.dx() / 3.0;
    std::vector<double> offsets(2 * static_cast<std::size_t>(span) + 1);
    for (int d = -span; d <= span; ++d) offsets[static_cast<std::size_t>(d + span)] = scale * sample(d);
    return offsets;
}

TailCorrection::TailCorrection(const GridSpec& grid, const MarketParams& params, OptionStyle style)
    : style_(style), strike_(params.K), rate_(params.r) {
    const double mu = params.mu_J;
    const double sj = params.sigma_J;
    const double L = grid.L();
    cash_.resize(grid.node_count());
    asset_.resize(grid.node_count());
    for (int n = 0; n <= grid.N(); ++n) {
        const double x = grid.x(n);
        cash_[n] = std_normal_cdf(-(x + mu + L) / sj);
        asset_[n] = params.S0 * std::exp(x + 0.5 * sj * sj + mu) * std_normal_cdf(-(x + sj * sj + mu + L) / sj);
    }
}

TailCorrection TailCorrection::zero(const GridSpec& grid) {
    TailCorrection t;
    t.cash_.assign(grid.node_count(), 0.0);
    t.asset_.assign(grid.node_count(), 0.0);
    return t;
}

double TailCorrection::discount(double tau) const noexcept {
    return style_ == OptionStyle::european ? std::exp(-rate_ * tau) : 1.0;
}

std::vector<double> TailCorrection::values(double tau) const {
    std::vector<double> v(cash_.size());
    for (std::size_t n = 0; n < v.size(); ++n) v[n] = value(n, tau);
    return v;
}

IntegralOperator::IntegralOperator(std::shared_ptr<const MertonKernel> kernel,
                                   std::shared_ptr<const TailCorrection> tail)
    : kernel_(std::move(kernel)),
      tail_(std::move(tail)),
      workspace_(kernel_->toeplitz()),
      weighted_(kernel_->grid().interior_count()),
      product_(kernel_->grid().interior_count()) {}

void IntegralOperator::apply(const GridFunction& u, double tau, GridFunction& out) {
    const auto& grid = kernel_->grid();
    u.check_against(grid);
    if (out.size() != u.size()) out = GridFunction(u.size());
    const double lambda = kernel_->lambda();
    const std::size_t last = u.last();
    if (lambda == 0.0) {
        for (std::size_t n = 0; n <= last; ++n) out[n] = 0.0;
        return;
    }
    for (std::size_t j = 1; j < last; ++j) weighted_[j - 1] = MertonKernel::interior_weight(j) * u[j];
    kernel_->toeplitz().multiply(weighted_, product_, workspace_);
    const double left = u[0];
    const double right = u[last];
    out[0] = 0.0;
    out[last] = 0.0;
    for (std::size_t n = 1; n < last; ++n) {
        const double edges = left * kernel_->left_edge(n) + right * kernel_->right_edge(n);
        out[n] = lambda * (product_[n - 1] + edges + tail_->value(n, tau));
    }
}

GridFunction IntegralOperator::apply(const GridFunction& u, double tau) {
    GridFunction out(u.size());
    apply(u, tau, out);
    return out;
}

GridFunction apply_integral_operator(const GridFunction& u, const MertonKernel& kernel, const TailCorrection& tail,
                                     double tau) {
    // Non-owning shared_ptrs: the caller keeps both objects alive for the call.
    IntegralOperator op(std::shared_ptr<const MertonKernel>(&kernel, [](const MertonKernel*) {}),
                        std::shared_ptr<const TailCorrection>(&tail, [](const TailCorrection*) {}));
    return op.apply(u, tau);
}

std::complex<double> quadrature_symbol(double theta, std::span<const double> lattice_density, double dx) {
    const std::size_t N = lattice_density.size() - 1;
    if (lattice_density.size() < 3 || N % 2 != 0) {
        throw InvalidParameter("quadrature_symbol: need an odd number (>= 3) of samples");
    }
    std::complex<double> sum = 0.0;
    for (std::size_t k = 0; k <= N; ++k) {
        const double w = (k == 0 || k == N) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        sum += w * lattice_density[k] * std::polar(1.0, theta * static_cast<double>(k));
    }
    return dx / 3.0 * sum;
}

std::complex<double> quadrature_symbol(double theta, const MertonKernel& kernel) {
    return quadrature_symbol(theta, kernel.lattice_density(), kernel.grid().dx());
}

}  // namespace mcfd
