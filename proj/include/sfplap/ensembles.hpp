#pragma once

// The chain of coupled matrix ensembles, from the centred Bernoulli Laplacian
// down to the alpha = 0 decoupled Gaussian model. All ensembles built from one
// NoiseBundle share their weights and Gaussians, so trace distances between
// them realise the couplings of the approximation argument.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "torus.hpp"
#include "weights.hpp"

namespace sfplap {

enum class EnsembleTag {
    BernoulliCentred,      // centred Laplacian of the percolation graph
    GaussianisedWithMean,  // Gaussian entries plus the weight-driven mean p_ij - E[p_ij]
    GaussianisedCentred,   // variance p(1-p)
    SimplifiedSqrtP,       // variance p
    ProfileR,              // variance r_ij = W_i W_j / dist^alpha, no cap
    TruncatedProfile,      // as ProfileR with W^m
    Decoupled,             // truncated off-diagonal plus independent Gaussian diagonal
    AlphaZeroDecoupled,    // alpha = 0 substitution of Decoupled
    AlphaZeroLLN,          // diagonal variance replaced by its law-of-large-numbers limit
};

inline constexpr std::array<EnsembleTag, 9> all_ensemble_tags = {
    EnsembleTag::BernoulliCentred, EnsembleTag::GaussianisedWithMean, EnsembleTag::GaussianisedCentred,
    EnsembleTag::SimplifiedSqrtP,  EnsembleTag::ProfileR,             EnsembleTag::TruncatedProfile,
    EnsembleTag::Decoupled,        EnsembleTag::AlphaZeroDecoupled,   EnsembleTag::AlphaZeroLLN,
};

constexpr std::string_view to_string(EnsembleTag tag) noexcept {
    switch (tag) {
        case EnsembleTag::BernoulliCentred: return "BernoulliCentred";
        case EnsembleTag::GaussianisedWithMean: return "GaussianisedWithMean";
        case EnsembleTag::GaussianisedCentred: return "GaussianisedCentred";
        case EnsembleTag::SimplifiedSqrtP: return "SimplifiedSqrtP";
        case EnsembleTag::ProfileR: return "ProfileR";
        case EnsembleTag::TruncatedProfile: return "TruncatedProfile";
        case EnsembleTag::Decoupled: return "Decoupled";
        case EnsembleTag::AlphaZeroDecoupled: return "AlphaZeroDecoupled";
        case EnsembleTag::AlphaZeroLLN: return "AlphaZeroLLN";
    }
    return "?";
}

inline std::optional<EnsembleTag> parse_ensemble_tag(std::string_view name) {
    for (EnsembleTag tag : all_ensemble_tags)
        if (to_string(tag) == name) return tag;
    return std::nullopt;
}

/// Kinds whose weights go through W^m.
constexpr bool uses_truncation(EnsembleTag tag) noexcept {
    return tag == EnsembleTag::TruncatedProfile || tag == EnsembleTag::Decoupled ||
           tag == EnsembleTag::AlphaZeroDecoupled || tag == EnsembleTag::AlphaZeroLLN;
}

/// Kinds built with alpha = 0 and c_N = N regardless of the torus parameters.
constexpr bool is_alpha_zero(EnsembleTag tag) noexcept {
    return tag == EnsembleTag::AlphaZeroDecoupled || tag == EnsembleTag::AlphaZeroLLN;
}

/// Kinds whose diagonal is minus the off-diagonal row sum.
constexpr bool is_laplacian_form(EnsembleTag tag) noexcept {
    return !(tag == EnsembleTag::Decoupled || is_alpha_zero(tag));
}

struct EnsembleKind {
    EnsembleTag tag = EnsembleTag::BernoulliCentred;
    std::optional<double> m;
    /// Run a truncating kind on the raw weights (m = infinity).
    bool untruncated = false;

    void validate() const {
        if (uses_truncation(tag)) {
            if (!m && !untruncated)
                throw invalid_parameter(std::string(to_string(tag)) + " needs a truncation level m");
            if (m && untruncated) throw invalid_parameter("both m and the untruncated flag were given");
            if (m && !(*m >= 1.0)) throw invalid_parameter("truncation level must be >= 1");
        } else if (m || untruncated) {
            throw invalid_parameter(std::string(to_string(tag)) + " does not take a truncation level");
        }
    }

    /// Truncation level as a number (+inf when untruncated or not applicable).
    double level() const noexcept { return m ? *m : std::numeric_limits<double>::infinity(); }

    std::string label() const {
        std::string s(to_string(tag));
        if (m) s += "(m=" + std::to_string(*m) + ")";
        return s;
    }

    friend bool operator==(const EnsembleKind&, const EnsembleKind&) = default;
};

/// Attach m to a tag only if the tag uses it; convenient for callers holding one global m.
inline EnsembleKind make_kind(EnsembleTag tag, std::optional<double> m) {
    EnsembleKind kind{tag, std::nullopt, false};
    if (uses_truncation(tag)) {
        if (m) kind.m = m;
        else kind.untruncated = true;
    }
    return kind;
}

enum class WeightMode {
    pareto,      // W_i from the Pareto law via the bundle's weight uniforms
    degenerate,  // W_i = 1 for every vertex
};

/// All randomness of one replica. Arrays over edges are indexed by
/// edge_index(i, j) for 0-based i < j.
struct NoiseBundle {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<double> edge_uniforms;
    std::vector<double> edge_gaussians;
    std::vector<double> aux_edge_gaussians;
    std::vector<double> diag_gaussians;
    std::vector<double> weight_uniforms;

    static constexpr std::size_t edge_count(std::size_t n) noexcept { return n * (n - 1) / 2; }

    static constexpr std::size_t edge_index(std::size_t i, std::size_t j, std::size_t n) noexcept {
        return i * (2 * n - i - 1) / 2 + (j - i - 1);
    }
};

inline NoiseBundle make_noise_bundle(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw invalid_parameter("noise bundle needs n >= 2");
    NoiseBundle b;
    b.n = n;
    b.seed = seed;
    const std::size_t edges = NoiseBundle::edge_count(n);
    const rng::Stream edge_u(seed, "edge_uniforms");
    const rng::Stream edge_g(seed, "edge_gaussians");
    const rng::Stream aux_g(seed, "aux_edge_gaussians");
    const rng::Stream diag_g(seed, "diag_gaussians");
    const rng::Stream weight_u(seed, "weight_uniforms");
    b.edge_uniforms.resize(edges);
    b.edge_gaussians.resize(edges);
    b.aux_edge_gaussians.resize(edges);
    for (std::size_t e = 0; e < edges; ++e) {
        b.edge_uniforms[e] = edge_u.uniform(e);
        b.edge_gaussians[e] = edge_g.gaussian(e);
        b.aux_edge_gaussians[e] = aux_g.gaussian(e);
    }
    b.diag_gaussians.resize(n);
    b.weight_uniforms.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.diag_gaussians[i] = diag_g.gaussian(i);
        b.weight_uniforms[i] = weight_u.uniform(i);
    }
    return b;
}

/// Dense real symmetric matrix, row-major.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }

    void set_symmetric(std::size_t i, std::size_t j, double v) noexcept {
        data_[i * n_ + j] = v;
        data_[j * n_ + i] = v;
    }
    void set_diagonal(std::size_t i, double v) noexcept { data_[i * n_ + i] = v; }

    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> mutable_data() noexcept { return data_; }

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// The untruncated weights a bundle realises.
inline WeightVector realized_weights(const ParetoParams& pareto, const NoiseBundle& bundle, WeightMode mode) {
    if (mode == WeightMode::degenerate) return WeightVector{std::vector<double>(bundle.n, 1.0), std::nullopt};
    return weights_from_uniforms(pareto, bundle.weight_uniforms);
}

namespace detail {

inline double truncated(double w, double level) noexcept { return w <= level ? w : 0.0; }

inline double first_truncated_moment(const ParetoParams& pareto, double level, WeightMode mode) {
    if (mode == WeightMode::degenerate) return 1.0;
    if (std::isinf(level)) return pareto_moment(pareto, 1);
    return truncated_pareto_moment(pareto, level, 1);
}

}  // namespace detail

/// Build one ensemble on explicitly supplied (untruncated) weights; the bundle
/// provides every other random input.
inline SymmetricMatrix build_ensemble_with_weights(const EnsembleKind& kind, const TorusParams& torus,
                                                   const ParetoParams& pareto, const NoiseBundle& bundle,
                                                   std::span<const double> weights,
                                                   WeightMode mode = WeightMode::pareto) {
    kind.validate();
    torus.validate();
    if (mode == WeightMode::pareto) pareto.validate();
    const std::size_t n = torus.n;
    if (bundle.n != n) throw dimension_mismatch("noise bundle size does not match torus size");
    if (weights.size() != n) throw dimension_mismatch("weight vector size does not match torus size");

    const EnsembleTag tag = kind.tag;
    const bool alpha_zero = is_alpha_zero(tag);
    const double alpha = alpha_zero ? 0.0 : torus.alpha;
    const double c_n = alpha_zero ? static_cast<double>(n) : scaling_constant(torus);
    const double inv_sqrt_c = 1.0 / std::sqrt(c_n);

    const double level = kind.level();
    std::vector<double> w(weights.begin(), weights.end());
    if (uses_truncation(tag))
        for (double& x : w) x = detail::truncated(x, level);

    // Per-distance tables, index d = 1 .. n/2.
    const std::size_t max_dist = n / 2;
    std::vector<double> dist_pow(max_dist + 1, 1.0);
    for (std::size_t d = 1; d <= max_dist; ++d) dist_pow[d] = std::pow(static_cast<double>(d), alpha);
    std::vector<double> mean_p;
    if (tag == EnsembleTag::BernoulliCentred || tag == EnsembleTag::GaussianisedWithMean) {
        mean_p.assign(max_dist + 1, 0.0);
        for (std::size_t d = 1; d <= max_dist; ++d)
            mean_p[d] = mode == WeightMode::degenerate ? std::min(1.0 / dist_pow[d], 1.0)
                                                       : expected_connection_probability_at_scale(pareto, dist_pow[d]);
    }

    SymmetricMatrix out(n);
    std::vector<double> row_sum(n, 0.0);
    std::vector<double> variance_sum(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t gap = j - i;
            const std::size_t d = std::min(gap, n - gap);
            const std::size_t e = NoiseBundle::edge_index(i, j, n);
            const double r = w[i] * w[j] / dist_pow[d];
            double x = 0.0;
            switch (tag) {
                case EnsembleTag::BernoulliCentred: {
                    const double p = std::min(r, 1.0);
                    x = ((bundle.edge_uniforms[e] < p ? 1.0 : 0.0) - mean_p[d]) * inv_sqrt_c;
                    break;
                }
                case EnsembleTag::GaussianisedWithMean: {
                    const double p = std::min(r, 1.0);
                    x = (std::sqrt(p * (1.0 - p)) * bundle.edge_gaussians[e] + (p - mean_p[d])) * inv_sqrt_c;
                    break;
                }
                case EnsembleTag::GaussianisedCentred: {
                    const double p = std::min(r, 1.0);
                    x = std::sqrt(p * (1.0 - p)) * bundle.edge_gaussians[e] * inv_sqrt_c;
                    break;
                }
                case EnsembleTag::SimplifiedSqrtP:
                    x = std::sqrt(std::min(r, 1.0)) * bundle.edge_gaussians[e] * inv_sqrt_c;
                    break;
                case EnsembleTag::ProfileR:
                case EnsembleTag::TruncatedProfile:
                case EnsembleTag::Decoupled:
                case EnsembleTag::AlphaZeroDecoupled:
                case EnsembleTag::AlphaZeroLLN:
                    x = std::sqrt(r) * bundle.edge_gaussians[e] * inv_sqrt_c;
                    break;
            }
            out.set_symmetric(i, j, x);
            row_sum[i] += x;
            row_sum[j] += x;
            variance_sum[i] += r;
            variance_sum[j] += r;
        }
    }

    if (is_laplacian_form(tag)) {
        for (std::size_t i = 0; i < n; ++i) out.set_diagonal(i, -row_sum[i]);
    } else if (tag == EnsembleTag::AlphaZeroLLN) {
        const double mean_w = detail::first_truncated_moment(pareto, level, mode);
        for (std::size_t i = 0; i < n; ++i)
            out.set_diagonal(i, bundle.diag_gaussians[i] * std::sqrt(w[i]) * std::sqrt(mean_w));
    } else {
        // Decoupled and AlphaZeroDecoupled: Y(i,i) = Z_i sqrt(sum_k r_ik / c_N).
        for (std::size_t i = 0; i < n; ++i)
            out.set_diagonal(i, bundle.diag_gaussians[i] * std::sqrt(variance_sum[i] / c_n));
    }
    return out;
}

inline SymmetricMatrix build_ensemble(const EnsembleKind& kind, const TorusParams& torus, const ParetoParams& pareto,
                                      const NoiseBundle& bundle, WeightMode mode = WeightMode::pareto) {
    if (bundle.n != torus.n) throw dimension_mismatch("noise bundle size does not match torus size");
    const WeightVector w = realized_weights(pareto, bundle, mode);
    return build_ensemble_with_weights(kind, torus, pareto, bundle, w.values, mode);
}

/// (1/N) Tr((a - b)^2). Its value bounds the cubed Levy distance between the
/// two spectral distributions (Hoffman-Wielandt).
inline double hw_trace_distance(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.size() != b.size()) throw dimension_mismatch("hw_trace_distance: matrices differ in size");
    if (a.size() == 0) return 0.0;
    const auto x = a.data();
    const auto y = b.data();
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

struct DecayPoint {
    double x = 0.0;  // N for size sweeps, m for truncation sweeps
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> values;
};

namespace detail {

inline void summarize(DecayPoint& p) {
    const double k = static_cast<double>(p.values.size());
    double sum = 0.0;
    for (double v : p.values) sum += v;
    p.mean = sum / k;
    double ss = 0.0;
    for (double v : p.values) ss += (v - p.mean) * (v - p.mean);
    p.std_error = p.values.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
}

}  // namespace detail

/// Mean hw_trace_distance between two kinds built on shared bundles, per N.
inline std::vector<DecayPoint> coupling_decay_curve(const EnsembleKind& first, const EnsembleKind& second, double alpha,
                                                    const ParetoParams& pareto, const std::vector<std::size_t>& sizes,
                                                    std::size_t replicas, std::uint64_t base_seed,
                                                    WeightMode mode = WeightMode::pareto) {
    if (replicas == 0) throw invalid_parameter("need at least one replica");
    std::vector<DecayPoint> curve;
    for (std::size_t n : sizes) {
        DecayPoint point;
        point.x = static_cast<double>(n);
        const TorusParams torus{n, alpha};
        for (std::size_t r = 0; r < replicas; ++r) {
            const NoiseBundle bundle = make_noise_bundle(n, rng::replica_seed(base_seed, r));
            const SymmetricMatrix a = build_ensemble(first, torus, pareto, bundle, mode);
            const SymmetricMatrix b = build_ensemble(second, torus, pareto, bundle, mode);
            point.values.push_back(hw_trace_distance(a, b));
        }
        detail::summarize(point);
        curve.push_back(std::move(point));
    }
    return curve;
}

/// E[hw_trace_distance(ProfileR, TruncatedProfile)] at level m.
///
/// The distance vanishes unless some weight exceeds m, which at moderate N is
/// too rare to observe directly; replicas are drawn conditionally on that event
/// and reweighted by its probability, giving an unbiased estimate.
inline DecayPoint truncation_gap_estimate(const TorusParams& torus, const ParetoParams& pareto, double m,
                                          std::size_t replicas, std::uint64_t base_seed) {
    if (replicas == 0) throw invalid_parameter("need at least one replica");
    DecayPoint point;
    point.x = m;
    const EnsembleKind profile = make_kind(EnsembleTag::ProfileR, std::nullopt);
    const EnsembleKind truncated = make_kind(EnsembleTag::TruncatedProfile, m);
    for (std::size_t r = 0; r < replicas; ++r) {
        const std::uint64_t seed = rng::replica_seed(base_seed, r);
        rng::Cursor cursor(seed, "exceedance");
        const ExceedanceDraw draw = sample_pareto_given_exceedance(pareto, torus.n, m, cursor);
        const NoiseBundle bundle = make_noise_bundle(torus.n, seed);
        const SymmetricMatrix a = build_ensemble_with_weights(profile, torus, pareto, bundle, draw.weights.values);
        const SymmetricMatrix b = build_ensemble_with_weights(truncated, torus, pareto, bundle, draw.weights.values);
        point.values.push_back(draw.event_probability * hw_trace_distance(a, b));
    }
    detail::summarize(point);
    return point;
}

// Matrix dump: uint64 N, then N*N float64, all little-endian, row-major.

namespace detail {

template <typename T>
T to_little_endian(T v) noexcept {
    if constexpr (std::endian::native == std::endian::big) {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
    return v;
}

}  // namespace detail

inline void write_matrix_dump(std::ostream& out, const SymmetricMatrix& m) {
    const std::uint64_t n = detail::to_little_endian(static_cast<std::uint64_t>(m.size()));
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (double v : m.data()) {
        const double le = detail::to_little_endian(v);
        out.write(reinterpret_cast<const char*>(&le), sizeof le);
    }
}

inline SymmetricMatrix read_matrix_dump(std::istream& in) {
    std::uint64_t n = 0;
    if (!in.read(reinterpret_cast<char*>(&n), sizeof n)) throw std::runtime_error("matrix dump: missing header");
    n = detail::to_little_endian(n);
    SymmetricMatrix m(static_cast<std::size_t>(n));
    auto data = m.mutable_data();
    for (double& v : data) {
        double le = 0.0;
        if (!in.read(reinterpret_cast<char*>(&le), sizeof le)) throw std::runtime_error("matrix dump: truncated body");
        v = detail::to_little_endian(le);
    }
    return m;
}

}  // namespace sfplap
