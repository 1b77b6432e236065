#pragma once

// Pareto vertex weights: P(W > t) = t^-(tau-1) for t >= 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace sfplap {

struct ParetoParams {
    double tau = 0.0;

    /// Tail exponent beta = tau - 1 of the survival function.
    double shape() const noexcept { return tau - 1.0; }

    void validate() const {
        if (!(tau > 1.0) || !std::isfinite(tau))
            throw invalid_parameter("Pareto law needs tau > 1, got " + std::to_string(tau));
    }
};

struct WeightVector {
    std::vector<double> values;
    /// Set once the vector has been truncated; entries above the level are 0.
    std::optional<double> truncation_level;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
};

/// Inverse CDF of the Pareto law at u in (0, 1]; u = 1 maps to the minimum 1.
inline double pareto_quantile(const ParetoParams& params, double u) {
    return std::pow(u, -1.0 / params.shape());
}

/// I.i.d. weights from a precomputed block of uniforms (one weight per uniform).
inline WeightVector weights_from_uniforms(const ParetoParams& params, std::span<const double> uniforms) {
    params.validate();
    WeightVector w;
    w.values.resize(uniforms.size());
    std::transform(uniforms.begin(), uniforms.end(), w.values.begin(),
                   [&](double u) { return pareto_quantile(params, u); });
    return w;
}

inline WeightVector sample_pareto(const ParetoParams& params, std::size_t count, const rng::Stream& stream) {
    params.validate();
    if (count == 0) throw invalid_parameter("sample_pareto: count must be positive");
    WeightVector w;
    w.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) w.values[i] = pareto_quantile(params, stream.uniform(i));
    return w;
}

/// W^m = W * 1{W <= m}. An unset level (m = +inf) leaves the vector unchanged.
inline WeightVector truncate_weights(const WeightVector& w, double m) {
    if (!(m >= 1.0)) throw invalid_parameter("truncation level must be >= 1");
    if (w.truncation_level) throw invalid_parameter("weights are already truncated");
    WeightVector out;
    out.values.resize(w.size());
    std::transform(w.values.begin(), w.values.end(), out.values.begin(),
                   [m](double x) { return x <= m ? x : 0.0; });
    if (std::isfinite(m)) out.truncation_level = m;
    return out;
}

/// E[W^k] = beta / (beta - k), finite for k < beta.
inline double pareto_moment(const ParetoParams& params, int k) {
    params.validate();
    const double beta = params.shape();
    if (!(k < beta))
        throw infinite_moment("E[W^" + std::to_string(k) + "] is infinite for tau = " + std::to_string(params.tau));
    return beta / (beta - k);
}

/// E[W^k 1{W <= m}] = integral_1^m x^k beta x^(-beta-1) dx.
///
/// Written as beta * expm1(c ln m) / c with c = k - beta so the k = beta
/// logarithmic case is the continuous limit rather than a special branch.
inline double truncated_pareto_moment(const ParetoParams& params, double m, int k) {
    params.validate();
    if (!(m >= 1.0)) throw invalid_parameter("truncation level must be >= 1");
    if (k < 0) throw invalid_parameter("moment order must be non-negative");
    const double beta = params.shape();
    const double c = static_cast<double>(k) - beta;
    if (std::isinf(m)) {
        if (c >= 0.0) return std::numeric_limits<double>::infinity();
        return beta / -c;
    }
    const double log_m = std::log(m);
    if (c == 0.0) return beta * log_m;
    return beta * std::expm1(c * log_m) / c;
}

/// E[X 1{X >= m}] for X Pareto, i.e. (beta / (beta - 1)) m^(1 - beta) when m >= 1.
inline double pareto_tail_residual(const ParetoParams& params, double m) {
    params.validate();
    if (!(params.tau > 2.0)) throw infinite_moment("pareto_tail_residual needs tau > 2");
    if (!(m > 0.0)) throw invalid_parameter("pareto_tail_residual needs m > 0");
    const double beta = params.shape();
    if (m <= 1.0) return beta / (beta - 1.0);
    return beta / (beta - 1.0) * std::pow(m, 1.0 - beta);
}

/// P(XY > t) for independent X, Y with the same Pareto law.
inline double product_tail(const ParetoParams& params, double t) {
    params.validate();
    if (t < 1.0) return 1.0;
    const double beta = params.shape();
    return std::pow(t, -beta) * (1.0 + beta * std::log(t));
}

/// Weights drawn conditionally on the event that at least one of them exceeds m.
///
/// Used to estimate expectations that vanish off that event (e.g. the gap between
/// truncated and untruncated ensembles) without waiting for the rare event:
/// E[X] = event_probability * E[X | event] whenever X = 0 off the event.
struct ExceedanceDraw {
    WeightVector weights;
    double event_probability = 0.0;
    std::size_t exceedances = 0;
};

inline ExceedanceDraw sample_pareto_given_exceedance(const ParetoParams& params, std::size_t count, double m,
                                                     rng::Cursor& cursor) {
    params.validate();
    if (count == 0) throw invalid_parameter("count must be positive");
    if (!(m >= 1.0) || !std::isfinite(m)) throw invalid_parameter("exceedance level must be finite and >= 1");
    const double beta = params.shape();
    const double q = std::pow(m, -beta);  // P(W > m)
    const double n = static_cast<double>(count);

    ExceedanceDraw draw;
    draw.event_probability = -std::expm1(n * std::log1p(-q));

    // K ~ Binomial(count, q) conditioned on K >= 1, by inverse CDF in log space.
    const double u = cursor.uniform() * draw.event_probability;
    double acc = 0.0;
    std::size_t k = 1;
    for (; k < count; ++k) {
        const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                               k * std::log(q) + (n - k) * std::log1p(-q);
        acc += std::exp(log_pmf);
        if (acc >= u) break;
    }
    draw.exceedances = k;

    // Choose the exceeding positions by a partial Fisher-Yates shuffle.
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(cursor.uniform() * static_cast<double>(count - i));
        std::swap(order[i], order[std::min(j, count - 1)]);
    }
    std::vector<bool> exceeds(count, false);
    for (std::size_t i = 0; i < k; ++i) exceeds[order[i]] = true;

    const double body_mass = -std::expm1(-beta * std::log(m));  // P(W <= m)
    draw.weights.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double v = cursor.uniform();
        draw.weights.values[i] = exceeds[i] ? m * std::pow(v, -1.0 / beta)
                                            : std::pow(1.0 - v * body_mass, -1.0 / beta);
    }
    return draw;
}

}  // namespace sfplap
