#pragma once

// Geometry of the discrete torus V_N = {1, ..., N} and the edge law of the
// scale-free percolation graph on it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "weights.hpp"

namespace sfplap {

struct TorusParams {
    std::size_t n = 0;
    double alpha = 0.0;

    void validate() const {
        if (n < 2) throw invalid_parameter("torus needs n >= 2");
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw invalid_parameter("alpha must be finite and >= 0");
    }
};

/// ||i - j|| = min(|i - j|, n - |i - j|) for 1-indexed vertices.
inline std::size_t torus_distance(std::size_t i, std::size_t j, std::size_t n) {
    if (i < 1 || j < 1 || i > n || j > n)
        throw std::invalid_argument("torus_distance: vertex index out of range [1, " + std::to_string(n) + "]");
    const std::size_t d = i > j ? i - j : j - i;
    return std::min(d, n - d);
}

/// c_N = (1/N) sum_{i != j} ||i - j||^-alpha, evaluated as one row sum.
///
/// A row holds each distance 1..ceil(N/2)-1 twice and, for even N, the
/// antipodal distance N/2 once.
inline double scaling_constant(const TorusParams& params) {
    params.validate();
    const std::size_t n = params.n;
    const std::size_t paired = (n + 1) / 2 - 1;
    // Summed from the smallest terms up.
    double sum = 0.0;
    if (n % 2 == 0) sum += std::pow(static_cast<double>(n / 2), -params.alpha);
    for (std::size_t k = paired; k >= 1; --k) sum += 2.0 * std::pow(static_cast<double>(k), -params.alpha);
    return sum;
}

/// (N, c_N / N^(1 - alpha)) for each size; the ratios approach the constant c_0.
inline std::vector<std::pair<std::size_t, double>> scaling_ratio_series(double alpha, const std::vector<std::size_t>& sizes) {
    if (!std::is_sorted(sizes.begin(), sizes.end())) throw invalid_parameter("sizes must be increasing");
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(sizes.size());
    for (std::size_t n : sizes) {
        const double c = scaling_constant({n, alpha});
        out.emplace_back(n, c / std::pow(static_cast<double>(n), 1.0 - alpha));
    }
    return out;
}

/// p_ij = min(w_i w_j / dist^alpha, 1).
inline double connection_probability(double w_i, double w_j, std::size_t dist, double alpha) {
    if (dist == 0) throw std::invalid_argument("connection_probability: distance 0 would be a self-loop");
    return std::min(w_i * w_j / std::pow(static_cast<double>(dist), alpha), 1.0);
}

namespace detail {

// integral_1^s t^-beta ln t dt
inline double log_weighted_power_integral(double beta, double s) {
    const double log_s = std::log(s);
    const double gamma = 1.0 - beta;
    if (std::abs(gamma * log_s) < 1e-3) {
        // sum_n gamma^n L^(n+2) / (n! (n+2))
        double term = log_s * log_s;  // gamma^n L^(n+2) / n!
        double sum = 0.0;
        for (int k = 0; k < 12; ++k) {
            sum += term / (k + 2);
            term *= gamma * log_s / (k + 1);
        }
        return sum;
    }
    return (std::pow(s, gamma) * (gamma * log_s - 1.0) + 1.0) / (gamma * gamma);
}

}  // namespace detail

/// E[min(XY / s, 1)] for i.i.d. Pareto X, Y, using the product density
/// beta^2 (ln t) t^(-beta-1) on [1, inf).
inline double expected_connection_probability_at_scale(const ParetoParams& params, double s) {
    params.validate();
    if (s <= 1.0) return 1.0;
    const double beta = params.shape();
    return product_tail(params, s) + beta * beta * detail::log_weighted_power_integral(beta, s) / s;
}

inline double expected_connection_probability(const ParetoParams& params, std::size_t dist, double alpha) {
    if (dist == 0) throw std::invalid_argument("expected_connection_probability: distance must be >= 1");
    return expected_connection_probability_at_scale(params, std::pow(static_cast<double>(dist), alpha));
}

}  // namespace sfplap
