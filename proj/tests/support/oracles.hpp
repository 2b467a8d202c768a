#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into mcfd numerics.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace mcfd::oracle {

inline double norm_cdf(double y) {
    static const boost::math::normal_distribution<double> unit;
    return boost::math::cdf(unit, y);
}

inline double black_scholes_put(double S, double K, double T, double r, double sigma) {
    const double sd = sigma * std::sqrt(T);
    const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * T) / sd;
    const double d2 = d1 - sd;
    return K * std::exp(-r * T) * norm_cdf(-d2) - S * norm_cdf(-d1);
}

/// Merton's series for the European put under log-normal jumps.
inline double merton_put(double S, double K, double T, double r, double sigma, double lambda, double mu_J,
                         double sigma_J, int terms = 80) {
    const double k = std::exp(mu_J + 0.5 * sigma_J * sigma_J) - 1.0;
    const double lam = lambda * (1.0 + k);
    double price = 0.0;
    double log_weight = -lam * T;  // log of e^{-lam T} (lam T)^n / n!
    for (int n = 0; n < terms; ++n) {
        if (n > 0) log_weight += std::log(lam * T / n);
        const double sig_n = std::sqrt(sigma * sigma + n * sigma_J * sigma_J / T);
        const double r_n = r - lambda * k + n * std::log1p(k) / T;
        price += std::exp(log_weight) * black_scholes_put(S, K, T, r_n, sig_n);
    }
    return price;
}

/// Adaptive Gauss-Kronrod integral of f over [a, b] (a, b may be infinite).
template <class F>
double integrate(F f, double a, double b) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, &err);
}

}  // namespace mcfd::oracle
