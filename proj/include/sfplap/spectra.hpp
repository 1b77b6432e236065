#pragma once

// Eigenvalues and statistics of empirical spectral distributions (ESDs).

#include <lapacke.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ensembles.hpp"
#include "error.hpp"

namespace sfplap {

struct SpectralSample {
    std::vector<double> eigenvalues;  // ascending
    std::optional<EnsembleKind> source_kind;
    std::uint64_t seed = 0;
    std::string params;

    std::size_t size() const noexcept { return eigenvalues.size(); }
};

/// Sample from raw values (sorted on the way in).
inline SpectralSample make_sample(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    SpectralSample s;
    s.eigenvalues = std::move(values);
    return s;
}

/// All eigenvalues of a symmetric matrix, via LAPACK dsyevd.
inline SpectralSample eigenvalues_symmetric(const SymmetricMatrix& m) {
    const std::size_t n = m.size();
    SpectralSample out;
    if (n == 0) return out;
    std::vector<double> work(m.data().begin(), m.data().end());
    for (double v : work)
        if (!std::isfinite(v)) throw std::invalid_argument("eigenvalues_symmetric: non-finite matrix entry");
    out.eigenvalues.resize(n);
    const auto ln = static_cast<lapack_int>(n);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', ln, work.data(), ln, out.eigenvalues.data());
    if (info != 0) throw std::runtime_error("dsyevd failed with info = " + std::to_string(info));
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    return out;
}

inline double esd_moment(const SpectralSample& s, int k) {
    if (k < 1 || k > 12) throw std::invalid_argument("esd_moment: order must be in [1, 12]");
    if (s.size() == 0) return 0.0;
    double sum = 0.0;
    for (double x : s.eigenvalues) {
        double p = x;
        for (int j = 1; j < k; ++j) p *= x;
        sum += p;
    }
    return sum / static_cast<double>(s.size());
}

/// (1/N) sum 1/(lambda_i - z) for Im z > 0.
inline std::complex<double> stieltjes_of_esd(const SpectralSample& s, std::complex<double> z) {
    if (!(z.imag() > 0.0)) throw std::invalid_argument("stieltjes_of_esd: need Im z > 0");
    std::complex<double> sum = 0.0;
    for (double x : s.eigenvalues) sum += 1.0 / (x - z);
    return sum / static_cast<double>(s.size());
}

/// Empirical CDF: fraction of sample <= x.
inline double empirical_cdf(const SpectralSample& s, double x) {
    const auto it = std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), x);
    return static_cast<double>(it - s.eigenvalues.begin()) / static_cast<double>(s.size());
}

/// Left limit of the empirical CDF: fraction of sample < x.
inline double empirical_cdf_left(const SpectralSample& s, double x) {
    const auto it = std::lower_bound(s.eigenvalues.begin(), s.eigenvalues.end(), x);
    return static_cast<double>(it - s.eigenvalues.begin()) / static_cast<double>(s.size());
}

template <typename F>
concept Cdf = std::regular_invocable<F, double> && std::convertible_to<std::invoke_result_t<F, double>, double>;

/// sup_x |F_a(x) - F_b(x)| between two empirical CDFs.
inline double kolmogorov_distance(const SpectralSample& a, const SpectralSample& b) {
    const auto& x = a.eigenvalues;
    const auto& y = b.eigenvalues;
    const double na = static_cast<double>(x.size());
    const double nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < x.size() || j < y.size()) {
        double t;
        if (j == y.size() || (i < x.size() && x[i] <= y[j])) t = x[i];
        else t = y[j];
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return best;
}

/// sup_x |F_a(x) - F(x)| against a continuous CDF, checked on both sides of every jump.
template <Cdf F>
double kolmogorov_distance(const SpectralSample& a, F&& cdf) {
    const double n = static_cast<double>(a.size());
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = cdf(a.eigenvalues[i]);
        best = std::max({best, std::abs(static_cast<double>(i + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
    }
    return best;
}

namespace detail {

// Does eps satisfy F(x - eps) - eps <= G(x) <= F(x + eps) + eps for all x?
// Both sides are step functions in x between breakpoints, so checking every
// breakpoint (where the right-continuous value is taken) covers all x.
inline bool levy_condition(const SpectralSample& f, const SpectralSample& g, double eps) {
    for (double a : f.eigenvalues) {
        // F jumps at a: breakpoints x = a + eps (left inequality) and x = a - eps (right).
        if (empirical_cdf(f, a) - eps > empirical_cdf(g, a + eps) + 1e-15) return false;
        if (empirical_cdf(g, a - eps) > empirical_cdf(f, a) + eps + 1e-15) return false;
    }
    for (double b : g.eigenvalues) {
        if (empirical_cdf(f, b - eps) - eps > empirical_cdf(g, b) + 1e-15) return false;
        if (empirical_cdf(g, b) > empirical_cdf(f, b + eps) + eps + 1e-15) return false;
    }
    return true;
}

template <typename F>
bool levy_condition_analytic(const SpectralSample& f, F& g, double eps) {
    // F empirical, G continuous: G(x) - F(x - eps) + eps >= 0 is minimised just
    // left of x = a + eps (F(x-eps) jumps up there), and G(x) - F(x + eps) - eps
    // is maximised just left of x = a - eps.
    for (double a : f.eigenvalues) {
        if (empirical_cdf(f, a) - eps > g(a + eps) + 1e-15) return false;
        if (g(a - eps) > empirical_cdf_left(f, a) + eps + 1e-15) return false;
    }
    return true;
}

template <typename Pred>
double bisect_levy(Pred&& ok, double tolerance) {
    double lo = 0.0, hi = 1.0;
    if (ok(0.0)) return 0.0;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace detail

/// Levy metric inf{eps : F(x-eps)-eps <= G(x) <= F(x+eps)+eps for all x},
/// found by bisection on eps to within 1e-9.
inline double levy_distance(const SpectralSample& a, const SpectralSample& b) {
    return detail::bisect_levy([&](double eps) { return detail::levy_condition(a, b, eps); }, 1e-9);
}

template <Cdf F>
double levy_distance(const SpectralSample& a, F&& cdf) {
    return detail::bisect_levy([&](double eps) { return detail::levy_condition_analytic(a, cdf, eps); }, 1e-9);
}

struct Histogram {
    std::vector<double> bin_edges;  // bins + 1 edges
    std::vector<double> masses;     // sums to 1
};

/// Equal-width histogram. Bins are [lo, hi) except the last, which is closed; a
/// value on an interior edge goes to the bin on its right. With an explicit
/// range, values outside it are counted in the end bins.
inline Histogram histogram(const SpectralSample& s, std::size_t bins, std::optional<std::pair<double, double>> range = {}) {
    if (bins == 0) throw std::invalid_argument("histogram: need at least one bin");
    double lo, hi;
    if (range) {
        std::tie(lo, hi) = *range;
        if (!(hi > lo)) throw std::invalid_argument("histogram: empty range");
    } else if (s.size() == 0) {
        lo = 0.0;
        hi = 1.0;
    } else {
        lo = s.eigenvalues.front();
        hi = s.eigenvalues.back();
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
    Histogram h;
    h.bin_edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) h.bin_edges[b] = lo + width * static_cast<double>(b);
    h.bin_edges.back() = hi;
    h.masses.assign(bins, 0.0);
    std::vector<std::size_t> counts(bins, 0);
    for (double x : s.eigenvalues) {
        std::size_t b;
        if (x >= hi) b = bins - 1;
        else if (x < lo) b = 0;
        else {
            // Locate by the stored edges so the tie-break follows them exactly.
            const auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), x);
            b = std::min<std::size_t>(static_cast<std::size_t>(it - h.bin_edges.begin()) - 1, bins - 1);
        }
        ++counts[b];
    }
    const double n = static_cast<double>(std::max<std::size_t>(s.size(), 1));
    for (std::size_t b = 0; b < bins; ++b) h.masses[b] = static_cast<double>(counts[b]) / n;
    return h;
}

// CSV helpers. Numbers use the shortest representation that round-trips.

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline void write_eigenvalues_csv(std::ostream& out, const SpectralSample& s) {
    out << "lambda\n";
    for (double x : s.eigenvalues) out << format_double(x) << '\n';
}

inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
    out << "bin_lo,bin_hi,mass\n";
    for (std::size_t b = 0; b < h.masses.size(); ++b)
        out << format_double(h.bin_edges[b]) << ',' << format_double(h.bin_edges[b + 1]) << ','
            << format_double(h.masses[b]) << '\n';
}

}  // namespace sfplap
