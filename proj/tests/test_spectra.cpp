#include <catch_amalgamated.hpp>

#include <complex>
#include <sstream>

#include "sfplap/ensembles.hpp"
#include "sfplap/spectra.hpp"
#include "sfplap/stats.hpp"

using namespace sfplap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SymmetricMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    SymmetricMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i; j < rows.size(); ++j) {
            if (i == j) m.set_diagonal(i, rows[i][i]);
            else m.set_symmetric(i, j, rows[i][j]);
        }
    return m;
}

SymmetricMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
    rng::Cursor c(seed, "m");
    SymmetricMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = c.gaussian();
            if (i == j) m.set_diagonal(i, v);
            else m.set_symmetric(i, j, v);
        }
    return m;
}

// Characteristic polynomial by Faddeev-LeVerrier, roots by Durand-Kerner.
std::vector<double> charpoly_roots(const SymmetricMatrix& a) {
    const std::size_t n = a.size();
    using Mat = std::vector<std::vector<double>>;
    Mat mk(n, std::vector<double>(n, 0.0));
    std::vector<double> coef(n + 1, 0.0);  // lambda^n + coef[1] lambda^(n-1) + ...
    coef[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        Mat next(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t l = 0; l < n; ++l) s += a(i, l) * mk[l][j];
                next[i][j] = s + (i == j ? coef[k - 1] : 0.0);
            }
        mk = next;
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) tr += a(i, l) * mk[l][i];
        coef[k] = -tr / double(k);
    }
    auto p = [&](std::complex<double> z) {
        std::complex<double> v = 1.0;
        for (std::size_t k = 1; k <= n; ++k) v = v * z + coef[k];
        return v;
    };
    std::vector<std::complex<double>> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = std::pow(std::complex<double>(0.4, 0.9), double(i)) * 3.0;
    for (int it = 0; it < 2000; ++it)
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> den = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= r[i] - r[j];
            r[i] -= p(r[i]) / den;
        }
    std::vector<double> out;
    for (auto z : r) out.push_back(z.real());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("small eigenproblems") {
    CHECK(eigenvalues_symmetric(from_rows({{0, 1}, {1, 0}})).eigenvalues == std::vector<double>{-1.0, 1.0});
    const auto d = eigenvalues_symmetric(from_rows({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}})).eigenvalues;
    CHECK(d == std::vector<double>{1.0, 2.0, 3.0});
    SymmetricMatrix bad(2);
    bad.set_diagonal(0, NAN);
    CHECK_THROWS(eigenvalues_symmetric(bad));
}

TEST_CASE("eigenvalues match characteristic polynomial roots") {
    for (std::size_t n = 1; n <= 4; ++n)
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto m = random_symmetric(n, 100 * n + seed);
            const auto ev = eigenvalues_symmetric(m).eigenvalues;
            const auto roots = charpoly_roots(m);
            for (std::size_t i = 0; i < n; ++i) CHECK_THAT(ev[i], WithinAbs(roots[i], 1e-12));
        }
}

TEST_CASE("trace identities") {
    const auto m = random_symmetric(50, 1);
    const auto s = eigenvalues_symmetric(m);
    double tr = 0.0, tr2 = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        tr += m(i, i);
        for (std::size_t j = 0; j < 50; ++j) tr2 += m(i, j) * m(j, i), mx = std::max(mx, std::abs(m(i, j)));
    }
    CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    CHECK_THAT(esd_moment(s, 1) * 50, WithinAbs(tr, 1e-8 * 50 * mx));
    CHECK_THAT(esd_moment(s, 2) * 50, WithinAbs(tr2, 1e-8 * 50 * mx));
}

TEST_CASE("moments and Stieltjes transform") {
    CHECK(esd_moment(make_sample({-1, 1}), 2) == 1.0);
    CHECK(esd_moment(make_sample({2}), 3) == 8.0);
    CHECK_THROWS(esd_moment(make_sample({2}), 13));
    CHECK(stieltjes_of_esd(make_sample({0}), {0, 1}) == std::complex<double>(0, 1));
    const auto g = stieltjes_of_esd(make_sample({-1, 1}), {0, 1});
    CHECK_THAT(g.real(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(g.imag(), WithinAbs(0.5, 1e-15));
    CHECK_THROWS(stieltjes_of_esd(make_sample({0}), {0, 0}));
    rng::Cursor c(2, "h");
    for (int r = 0; r < 100; ++r) {
        std::vector<double> v(20);
        for (double& x : v) x = 3 * c.gaussian();
        const auto s = make_sample(v);
        for (double e : {-5.0, 0.0, 2.0})
            for (double eta : {1e-3, 0.5}) CHECK(stieltjes_of_esd(s, {e, eta}).imag() > 0.0);
    }
}

TEST_CASE("Kolmogorov distance") {
    const auto a = make_sample({0.1, 0.5, 0.9});
    CHECK(kolmogorov_distance(a, a) == 0.0);
    CHECK(kolmogorov_distance(make_sample({0}), make_sample({1})) == 1.0);
    CHECK_THAT(kolmogorov_distance(make_sample({0, 1}), make_sample({0, 2})), WithinAbs(0.5, 1e-15));

    // against the exact uniform CDF the distance shrinks like N^-1/2
    auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    std::vector<double> sizes, means;
    for (std::size_t n : {100u, 400u, 1600u, 6400u}) {
        double sum = 0.0;
        for (std::uint64_t r = 0; r < 60; ++r) {
            const rng::Stream s(r, "u" + std::to_string(n));
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = s.uniform(i);
            sum += kolmogorov_distance(make_sample(v), uniform_cdf);
        }
        sizes.push_back(double(n));
        means.push_back(sum / 60);
    }
    CHECK_THAT(loglog_fit(sizes, means)->slope, WithinAbs(-0.5, 0.1));
}

TEST_CASE("Levy distance") {
    const auto a = make_sample({0.0, 1.0, 2.5});
    CHECK(levy_distance(a, a) == 0.0);
    CHECK_THAT(levy_distance(make_sample({0}), make_sample({0.3})), WithinAbs(0.3, 1e-6));
    CHECK_THAT(levy_distance(make_sample({0}), make_sample({5})), WithinAbs(1.0, 1e-6));
    CHECK_THAT(levy_distance(make_sample({0}), [](double x) { return x >= 0.3 ? 1.0 : 0.0; }), WithinAbs(0.3, 1e-6));

    rng::Cursor c(4, "levy");
    for (int r = 0; r < 100; ++r) {
        std::vector<double> x(30), y(40);
        for (double& v : x) v = c.gaussian();
        const double shift = c.uniform();
        for (double& v : y) v = c.gaussian() * 1.3 + shift;
        const auto sx = make_sample(x), sy = make_sample(y);
        const double l = levy_distance(sx, sy);
        CHECK(l <= kolmogorov_distance(sx, sy) + 1e-9);
        CHECK_THAT(levy_distance(sy, sx), WithinAbs(l, 1e-8));
    }
}

TEST_CASE("histogram") {
    const auto h0 = histogram(make_sample({0, 0, 0, 0}), 2, std::pair{-1.0, 1.0});
    CHECK(h0.masses == std::vector<double>{0.0, 1.0});  // edge value goes right

    // midpoints of a 1/100 grid: ten per bin, away from the edges
    std::vector<double> grid;
    for (int i = 1; i <= 100; ++i) grid.push_back((i - 0.5) / 100.0);
    const auto h = histogram(make_sample(grid), 10, std::pair{0.0, 1.0});
    double total = 0.0;
    for (double m : h.masses) {
        total += m;
        CHECK_THAT(m, WithinAbs(0.1, 1e-15));
    }
    CHECK_THAT(total, WithinAbs(1.0, 1e-12));
    // exactly on an interior edge: right bin; on the top edge: last bin
    const auto e = histogram(make_sample({0.5, 1.0}), 4, std::pair{0.0, 1.0});
    CHECK(e.masses == std::vector<double>{0.0, 0.0, 0.5, 0.5});

    const auto clipped = histogram(make_sample({-5, 0.5, 7}), 4, std::pair{0.0, 1.0});
    CHECK(clipped.masses.front() == Catch::Approx(1.0 / 3));
    CHECK(clipped.masses.back() == Catch::Approx(1.0 / 3));
    const auto single = histogram(make_sample({2}), 3);
    CHECK(single.bin_edges.front() == 1.5);
    CHECK_THROWS(histogram(make_sample({1}), 0));
}

TEST_CASE("csv output") {
    std::ostringstream e, h;
    write_eigenvalues_csv(e, make_sample({0.1, -2}));
    CHECK(e.str() == "lambda\n-2\n0.1\n");
    write_histogram_csv(h, histogram(make_sample({0, 1}), 2));
    CHECK(h.str() == "bin_lo,bin_hi,mass\n0,0.5,0.5\n0.5,1,0.5\n");
}

TEST_CASE("Hoffman-Wielandt bound on coupled ensembles") {
    const TorusParams torus{50, 0.5};
    const ParetoParams p{4.1};
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto bundle = make_noise_bundle(torus.n, seed);
        const auto t1 = all_ensemble_tags[seed % 9];
        const auto t2 = all_ensemble_tags[(seed + 1) % 9];
        const auto a = build_ensemble(make_kind(t1, 20.0), torus, p, bundle);
        const auto b = build_ensemble(make_kind(t2, 20.0), torus, p, bundle);
        const double dl = levy_distance(eigenvalues_symmetric(a), eigenvalues_symmetric(b));
        violations += dl * dl * dl > hw_trace_distance(a, b);
    }
    CHECK(violations == 0);
}
