#pragma once

// The limiting spectral law, computed two ways: exact moments from the
// non-crossing partition expansion, and (for degenerate weights) the density
// of semicircle boxplus Gaussian from a Stieltjes subordination fixed point.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "partitions.hpp"
#include "weights.hpp"

namespace sfplap {

/// A word over {a, b}: a = off-diagonal factor, b = diagonal factor.
struct MomentComposition {
    std::string word;

    std::size_t length() const noexcept { return word.size(); }
    std::size_t a_count() const noexcept { return static_cast<std::size_t>(std::count(word.begin(), word.end(), 'a')); }
    std::size_t b_count() const noexcept { return length() - a_count(); }

    void validate() const {
        for (char c : word)
            if (c != 'a' && c != 'b') throw std::invalid_argument("moment word must be over {a, b}: " + word);
    }

    /// Runs (m_1, n_1), (m_2, n_2), ... read cyclically from the start of the
    /// word; m_1 = 0 when the word starts with b.
    std::vector<std::pair<std::size_t, std::size_t>> runs() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        std::size_t i = 0;
        while (i < word.size()) {
            std::size_t m = 0, n = 0;
            while (i < word.size() && word[i] == 'a') ++m, ++i;
            while (i < word.size() && word[i] == 'b') ++n, ++i;
            out.emplace_back(m, n);
        }
        return out;
    }

    /// Walk position (1-based, in [M(k)]) each b-run attaches to, paired with the
    /// run length: the run after the j-th a-run sits at 1 + M(j), taken
    /// cyclically. With no a letters everything sits at position 1.
    std::vector<std::pair<int, std::size_t>> b_attachments() const {
        const std::size_t total_a = a_count();
        std::vector<std::pair<int, std::size_t>> out;
        std::size_t seen_a = 0;
        for (auto [m, n] : runs()) {
            seen_a += m;
            if (n == 0) continue;
            const int pos = total_a == 0 ? 1 : static_cast<int>(seen_a % total_a) + 1;
            out.emplace_back(pos, n);
        }
        return out;
    }
};

/// All 2^k words of length k, in lexicographic order.
inline std::vector<MomentComposition> enumerate_words(std::size_t k) {
    std::vector<MomentComposition> out;
    out.reserve(std::size_t{1} << k);
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::string w(k, 'a');
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::size_t{1} << (k - 1 - i))) w[i] = 'b';
        out.push_back({w});
    }
    return out;
}

struct LimitLawParams {
    ParetoParams pareto;
    /// Truncation level; unset means the untruncated law (moments must exist).
    std::optional<double> m;
    /// W = 1 identically.
    bool degenerate = false;

    /// E[(W^m)^k], with the convention that the zeroth power is 1.
    double weight_moment(int k) const {
        if (degenerate || k == 0) return 1.0;
        if (m) return truncated_pareto_moment(pareto, *m, k);
        return pareto_moment(pareto, k);
    }
};

/// E[Z^k] for standard normal Z: (k-1)!! for even k, 0 for odd k.
inline std::uint64_t gaussian_moment_exact(int k) {
    if (k < 0) throw std::invalid_argument("gaussian_moment: negative order");
    if (k % 2 != 0) return 0;
    std::uint64_t r = 1;
    for (int j = k - 1; j > 1; j -= 2) r *= static_cast<std::uint64_t>(j);
    return r;
}

inline double gaussian_moment(int k) { return static_cast<double>(gaussian_moment_exact(k)); }

/// Sum of attached b-run lengths per block of gamma*pi (blocks partition [M(k)]).
inline std::vector<std::size_t> attached_b_counts(const Blocks& blocks, const MomentComposition& word) {
    std::vector<std::size_t> sums(std::max<std::size_t>(blocks.size(), 1), 0);
    for (auto [pos, n] : word.b_attachments()) {
        if (blocks.empty()) {
            sums[0] += n;
            continue;
        }
        bool placed = false;
        for (std::size_t b = 0; b < blocks.size() && !placed; ++b)
            if (std::find(blocks[b].begin(), blocks[b].end(), pos) != blocks[b].end()) {
                sums[b] += n;
                placed = true;
            }
        if (!placed) throw std::invalid_argument("attached_b_counts: blocks do not cover the walk");
    }
    return sums;
}

/// epsilon = product over blocks of E[Z^(attached b count)]; zero as soon as one
/// block receives an odd count.
inline std::uint64_t epsilon_factor_exact(const Blocks& blocks, const MomentComposition& word) {
    std::uint64_t eps = 1;
    for (std::size_t s : attached_b_counts(blocks, word)) eps *= gaussian_moment_exact(static_cast<int>(s));
    return eps;
}

inline double epsilon_factor(const Blocks& blocks, const MomentComposition& word) {
    return static_cast<double>(epsilon_factor_exact(blocks, word));
}

/// t(G, W^m): by independence of the vertex weights, the product over base
/// vertices of E[(W^m)^(tree degree + leaves)] times E[W^m] per leaf.
inline double homomorphism_density(const AugmentedGraph& g, const LimitLawParams& law) {
    const auto& base = g.base;
    const bool single_root = base.vertices.size() == 1 && base.edges.empty();
    if (!single_root && !is_nc_tree(base, base.k)) throw std::invalid_argument("homomorphism_density: base graph is not a tree");
    double t = 1.0;
    for (std::size_t v = 0; v < base.vertices.size(); ++v) t *= law.weight_moment(static_cast<int>(g.degree(v)));
    const double leaf = law.weight_moment(1);
    for (std::size_t l = 0; l < g.total_leaves(); ++l) t *= leaf;
    return t;
}

/// One word's share of M_k.
struct WordContribution {
    MomentComposition word;
    double value = 0.0;
    std::size_t partitions = 0;         // |NC_2(M(k))| considered
    std::size_t odd_parity_blocks = 0;  // partitions killed by an odd block count
};

namespace detail {

inline const std::vector<PairPartition>& cached_nc2(std::size_t k) {
    static thread_local std::map<std::size_t, std::vector<PairPartition>> cache;
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, enumerate_noncrossing_pair_partitions(k)).first;
    return it->second;
}

// Neumaier compensated summation.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) carry += (sum - t) + x;
        else carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

inline constexpr std::size_t max_limit_moment_order = 10;

}  // namespace detail

inline WordContribution word_contribution(const MomentComposition& word, const LimitLawParams& law) {
    word.validate();
    WordContribution c{word};
    const std::size_t a = word.a_count();
    if (a % 2 != 0) return c;
    detail::CompensatedSum acc;
    auto add_partition = [&](const PartitionGraph& graph, const Blocks& blocks) {
        ++c.partitions;
        const std::uint64_t eps = epsilon_factor_exact(blocks, word);
        if (eps == 0) {
            ++c.odd_parity_blocks;
            return;
        }
        const auto counts = attached_b_counts(blocks, word);
        std::map<std::size_t, std::size_t> leaves;
        for (std::size_t v = 0; v < counts.size(); ++v)
            if (counts[v] > 0) leaves[v] = counts[v] / 2;
        acc.add(static_cast<double>(eps) * homomorphism_density(augment_with_leaves(graph, leaves), law));
    };
    if (a == 0) {
        add_partition(walk_graph({}, 0), {});
    } else {
        for (const auto& pi : detail::cached_nc2(a)) {
            const Blocks blocks = gamma_pi(pi);
            add_partition(walk_graph(blocks, a), blocks);
        }
    }
    c.value = acc.value();
    return c;
}

inline std::vector<WordContribution> limit_moment_terms(std::size_t k, const LimitLawParams& law) {
    if (k > detail::max_limit_moment_order)
        throw std::invalid_argument("limit_moment: order " + std::to_string(k) + " exceeds the enumeration limit");
    std::vector<WordContribution> out;
    for (const auto& w : enumerate_words(k)) out.push_back(word_contribution(w, law));
    return out;
}

/// M_k of the limiting law. Takes no spatial parameter: the limit does not depend on alpha.
inline double limit_moment(std::size_t k, const LimitLawParams& law) {
    if (k == 0) return 1.0;
    if (k % 2 != 0) return 0.0;
    detail::CompensatedSum acc;
    for (const auto& c : limit_moment_terms(k, law)) acc.add(c.value);
    return acc.value();
}

/// Degenerate-weight M_k in integer arithmetic: every factor is a Gaussian moment.
inline std::uint64_t limit_moment_degenerate_exact(std::size_t k) {
    if (k > detail::max_limit_moment_order)
        throw std::invalid_argument("limit_moment: order " + std::to_string(k) + " exceeds the enumeration limit");
    if (k == 0) return 1;
    if (k % 2 != 0) return 0;
    std::uint64_t total = 0;
    for (const auto& word : enumerate_words(k)) {
        const std::size_t a = word.a_count();
        if (a % 2 != 0) continue;
        if (a == 0) {
            total += epsilon_factor_exact({}, word);
            continue;
        }
        for (const auto& pi : detail::cached_nc2(a)) total += epsilon_factor_exact(gamma_pi(pi), word);
    }
    return total;
}

/// (1 / 2k) M_{2k}^(1 / 2k) for k = 1, 2, ...; bounded values are consistent with
/// the moments determining the law.
inline std::vector<double> carleman_diagnostic(const std::vector<double>& even_moments) {
    std::vector<double> out;
    for (std::size_t j = 0; j < even_moments.size(); ++j) {
        const double mk = even_moments[j];
        if (mk < 0.0 || std::isnan(mk))
            throw integrity_error("carleman_diagnostic: even moment M_" + std::to_string(2 * (j + 1)) + " is negative");
        const double two_k = 2.0 * static_cast<double>(j + 1);
        out.push_back(std::pow(mk, 1.0 / two_k) / two_k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Semicircle boxplus Gaussian.

/// integral phi(x) / (x - z) dx for the standard normal density phi, Im z > 0.
///
/// The pole is removed by subtracting phi(Re z): the remainder is smooth and is
/// integrated adaptively on [-8, 8]; the subtracted part has a closed form. Mass
/// beyond |x| = 8 (about 1e-15) is added as point masses at +-8.
inline std::complex<double> gaussian_stieltjes(std::complex<double> z) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(z.imag() > 0.0)) throw std::invalid_argument("gaussian_stieltjes: need Im z > 0");
    constexpr double L = 8.0;
    const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    auto phi = [&](double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); };
    const double e = z.real();
    const double eta = z.imag();
    const double phi_e = phi(e);

    // (phi(x) - phi(e)) / (x - z) = (phi(x) - phi(e)) (x - e + i eta) / ((x - e)^2 + eta^2)
    auto re = [&](double x) {
        const double dx = x - e;
        return (phi(x) - phi_e) * dx / (dx * dx + eta * eta);
    };
    auto im = [&](double x) {
        const double dx = x - e;
        return (phi(x) - phi_e) * eta / (dx * dx + eta * eta);
    };
    // Break points at e and e +- 1 isolate the width-eta feature next to the pole.
    std::vector<double> cuts{-L};
    for (double c : {e - 1.0, e, e + 1.0})
        if (c > -L && c < L) cuts.push_back(c);
    cuts.push_back(L);
    constexpr unsigned depth = 15;
    constexpr double tol = 1e-11;
    double re_sum = 0.0, im_sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        re_sum += gauss_kronrod<double, 31>::integrate(re, cuts[i], cuts[i + 1], depth, tol);
        im_sum += gauss_kronrod<double, 31>::integrate(im, cuts[i], cuts[i + 1], depth, tol);
    }
    // phi(e) * integral_{-L}^{L} dx / (x - z) = phi(e) * log((L - z) / (-L - z)),
    // principal branch is continuous here because both points lie below z.
    const std::complex<double> pole = phi_e * (std::log(L - z) - std::log(-L - z));
    const double tail = 0.5 * std::erfc(L / std::numbers::sqrt2);
    const std::complex<double> tails = tail / (L - z) + tail / (-L - z);
    return std::complex<double>(re_sum, im_sum) + pole + tails;
}

struct StieltjesGrid {
    std::vector<double> energies;
    double eta = 1e-2;
    std::size_t max_iterations = 200;
    double tolerance = 1e-10;
    double damping = 0.5;

    void validate() const {
        if (!(eta >= 1e-3 && eta <= 1e-1)) throw invalid_parameter("Stieltjes grid: eta must be in [1e-3, 1e-1]");
        if (!(tolerance > 0.0)) throw invalid_parameter("Stieltjes grid: tolerance must be positive");
        if (!(damping > 0.0 && damping <= 1.0)) throw invalid_parameter("Stieltjes grid: damping must be in (0, 1]");
    }

    static StieltjesGrid uniform(double lo, double hi, std::size_t points, double eta = 1e-2) {
        StieltjesGrid g;
        g.eta = eta;
        g.energies.resize(points);
        for (std::size_t i = 0; i < points; ++i)
            g.energies[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        return g;
    }
};

struct DensityPoint {
    double energy = 0.0;
    double density = 0.0;
    std::complex<double> stieltjes;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Density of semicircle boxplus N(0,1) at E + i eta via the subordination
/// relation m(z) = m_g(z + m(z)), m the Stieltjes transform int dmu(x)/(x - z).
inline std::vector<DensityPoint> semicircle_free_conv_density(const StieltjesGrid& grid) {
    grid.validate();
    std::vector<DensityPoint> out;
    out.reserve(grid.energies.size());
    for (double e : grid.energies) {
        const std::complex<double> z(e, grid.eta);
        DensityPoint p;
        p.energy = e;
        std::complex<double> m = gaussian_stieltjes(z);
        for (std::size_t it = 1; it <= grid.max_iterations; ++it) {
            const std::complex<double> next = (1.0 - grid.damping) * m + grid.damping * gaussian_stieltjes(z + m);
            const double step = std::abs(next - m);
            m = next;
            p.iterations = it;
            if (step < grid.tolerance) {
                p.converged = true;
                break;
            }
        }
        p.stieltjes = m;
        p.density = m.imag() / std::numbers::pi;
        out.push_back(p);
    }
    return out;
}

/// integral E^k rho(E) dE over the grid, trapezoid rule.
inline double density_moment(const std::vector<DensityPoint>& pts, int k) {
    double s = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double h = pts[i].energy - pts[i - 1].energy;
        s += 0.5 * h * (std::pow(pts[i].energy, k) * pts[i].density + std::pow(pts[i - 1].energy, k) * pts[i - 1].density);
    }
    return s;
}

/// CDF of the grid density (cumulative trapezoid, normalised to total mass 1,
/// linear in between grid points, clamped outside).
class GridCdf {
public:
    explicit GridCdf(const std::vector<DensityPoint>& pts) {
        if (pts.size() < 2) throw std::invalid_argument("GridCdf: need at least two points");
        x_.reserve(pts.size());
        f_.reserve(pts.size());
        double acc = 0.0;
        x_.push_back(pts.front().energy);
        f_.push_back(0.0);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            acc += 0.5 * (pts[i].energy - pts[i - 1].energy) * (pts[i].density + pts[i - 1].density);
            x_.push_back(pts[i].energy);
            f_.push_back(acc);
        }
        for (double& v : f_) v /= acc;
    }

    double operator()(double x) const {
        if (x <= x_.front()) return 0.0;
        if (x >= x_.back()) return 1.0;
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        const double t = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
        return f_[i - 1] + t * (f_[i] - f_[i - 1]);
    }

private:
    std::vector<double> x_;
    std::vector<double> f_;
};

}  // namespace sfplap
