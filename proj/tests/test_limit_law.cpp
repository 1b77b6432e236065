#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <type_traits>

#include "sfplap/limit_law.hpp"
#include "sfplap/rng.hpp"

#include "free_oracle.hpp"

using namespace sfplap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const LimitLawParams degenerate{ParetoParams{5.0}, std::nullopt, true};

}  // namespace

TEST_CASE("gaussian moments") {
    CHECK(gaussian_moment(0) == 1);
    CHECK(gaussian_moment(1) == 0);
    CHECK(gaussian_moment(2) == 1);
    CHECK(gaussian_moment(4) == 3);
    CHECK(gaussian_moment_exact(10) == 945);
}

TEST_CASE("words") {
    const MomentComposition w{"aabab"};
    CHECK(w.a_count() + w.b_count() == w.length());
    CHECK(w.runs() == std::vector<std::pair<std::size_t, std::size_t>>{{2, 1}, {1, 1}});
    CHECK(MomentComposition{"bab"}.runs() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 1}});
    // b after the j-th a-run sits at 1 + M(j) mod M(k)
    CHECK(MomentComposition{"abab"}.b_attachments() == std::vector<std::pair<int, std::size_t>>{{2, 1}, {1, 1}});
    CHECK(MomentComposition{"aabb"}.b_attachments() == std::vector<std::pair<int, std::size_t>>{{1, 2}});
    CHECK(MomentComposition{"bbbb"}.b_attachments() == std::vector<std::pair<int, std::size_t>>{{1, 4}});
    CHECK(enumerate_words(4).size() == 16);
    CHECK_THROWS(MomentComposition{"abc"}.validate());
}

TEST_CASE("epsilon factor") {
    CHECK(epsilon_factor({{1}, {2}}, MomentComposition{"aa"}) == 1.0);
    CHECK(epsilon_factor({}, MomentComposition{"bbbb"}) == 3.0);
    CHECK(epsilon_factor({{1}, {2}}, MomentComposition{"abab"}) == 0.0);
    CHECK(epsilon_factor({{1}, {2}}, MomentComposition{"abba"}) == 1.0);
}

TEST_CASE("homomorphism density") {
    const LimitLawParams law{ParetoParams{5.0}, 1e3, false};
    const double ew = truncated_pareto_moment(law.pareto, 1e3, 1);
    const auto edge = partition_graph(PairPartition{2, {{1, 2}}});
    CHECK_THAT(homomorphism_density(augment_with_leaves(edge, {}), law), WithinRel(ew * ew, 1e-14));
    CHECK(homomorphism_density(augment_with_leaves(edge, {}), degenerate) == 1.0);
    const auto root = walk_graph({}, 0);
    CHECK_THAT(homomorphism_density(augment_with_leaves(root, {{0, 1}}), law), WithinRel(ew * ew, 1e-14));
    const auto crossing = partition_graph(PairPartition{4, {{1, 3}, {2, 4}}});
    CHECK_THROWS(homomorphism_density(augment_with_leaves(crossing, {}), law));
}

TEST_CASE("limit moments for degenerate weights") {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> expected{0, 2, 0, 9};
    for (std::size_t k = 1; k <= 4; ++k) {
        CHECK(limit_moment(k, degenerate) == expected[k - 1]);
        CHECK(limit_moment_degenerate_exact(k) == static_cast<std::uint64_t>(expected[k - 1]));
    }
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1.0);
    for (std::size_t k = 1; k <= 6; ++k) {
        INFO("k=" << k);
        CHECK_THAT(limit_moment(k, degenerate), WithinAbs(oracle::free_moment(k), 1e-12));
    }
    // the oracle reaches further at little cost
    CHECK(double(limit_moment_degenerate_exact(8)) == oracle::free_moment(8));
    CHECK(limit_moment(0, degenerate) == 1.0);
    CHECK_THROWS(limit_moment(12, degenerate));
}

TEST_CASE("word trace for M4") {
    std::map<std::string, double> by_word;
    for (const auto& c : limit_moment_terms(4, degenerate)) by_word[c.word.word] = c.value;
    CHECK(by_word["aaaa"] == 2.0);
    CHECK(by_word["bbbb"] == 3.0);
    for (const char* w : {"aabb", "abba", "bbaa", "baab"}) CHECK(by_word[w] == 1.0);
    CHECK(by_word["abab"] == 0.0);
    CHECK(by_word["baba"] == 0.0);
}

TEST_CASE("odd block parity kills a term exactly") {
    for (std::size_t k : {4u, 6u, 8u})
        for (const auto& c : limit_moment_terms(k, LimitLawParams{ParetoParams{6.0}, 1e3, false})) {
            if (c.partitions > 0 && c.odd_parity_blocks == c.partitions) REQUIRE(c.value == 0.0);
            if (c.word.a_count() % 2) REQUIRE(c.value == 0.0);
        }
}

TEST_CASE("limit moments with weights") {
    const LimitLawParams law{ParetoParams{5.0}, 1e3, false};
    const double ew = truncated_pareto_moment(law.pareto, 1e3, 1);
    const double ew2 = truncated_pareto_moment(law.pareto, 1e3, 2);
    CHECK_THAT(limit_moment(2, law), WithinRel(2 * ew * ew, 1e-14));
    CHECK_THAT(limit_moment(2, law), WithinAbs(2.0 * 16.0 / 9.0, 1e-3 * 4));
    // aaaa: two paths, bbbb: 3, four mixed words: one each; every term is E[W^2] E[W]^2
    CHECK_THAT(limit_moment(4, law), WithinRel(9 * ew2 * ew * ew, 1e-13));
    CHECK(limit_moment(3, law) == 0.0);
    // untruncated law needs the moments to exist
    CHECK_NOTHROW(limit_moment(4, LimitLawParams{ParetoParams{5.0}, std::nullopt, false}));
    CHECK_THROWS_AS(limit_moment(8, LimitLawParams{ParetoParams{4.1}, std::nullopt, false}), infinite_moment);
    // no spatial parameter anywhere in the signature
    static_assert(std::is_invocable_r_v<double, decltype(&limit_moment), std::size_t, const LimitLawParams&>);
}

TEST_CASE("Carleman diagnostic") {
    const auto c = carleman_diagnostic({2, 9});
    CHECK_THAT(c[0], WithinAbs(0.7071, 1e-4));
    CHECK_THAT(c[1], WithinAbs(0.4330, 1e-4));
    const auto cat = carleman_diagnostic({1, 2, 5, 14, 42});
    for (double v : cat) CHECK(v <= 1.0);
    CHECK_THROWS_AS(carleman_diagnostic({2, -1}), integrity_error);
}

TEST_CASE("gaussian Stieltjes transform") {
    // on the imaginary axis: i sqrt(pi/2) exp(y^2/2) erfc(y/sqrt 2)
    for (double y : {0.001, 0.01, 0.1, 1.0, 5.0}) {
        const auto g = gaussian_stieltjes({0, y});
        CHECK_THAT(g.real(), WithinAbs(0.0, 1e-12));
        CHECK_THAT(g.imag(), WithinAbs(std::sqrt(M_PI / 2) * std::exp(y * y / 2) * std::erfc(y / std::sqrt(2.0)), 1e-9));
    }
    for (double e : {-3.0, -0.7, 0.2, 2.5, 9.0})
        for (double eta : {0.005, 0.3}) {
            const std::complex<double> z(e, eta);
            const auto a = gaussian_stieltjes(z), b = gaussian_stieltjes(-std::conj(z));
            CHECK_THAT(b.real(), WithinAbs(-a.real(), 1e-10));
            CHECK_THAT(b.imag(), WithinAbs(a.imag(), 1e-10));
        }
    const std::complex<double> far(0, 1e3);
    CHECK(std::abs(far * gaussian_stieltjes(far) + 1.0) < 1e-5);
    CHECK_THROWS(gaussian_stieltjes({0, 0}));
    CHECK_THROWS(gaussian_stieltjes({1, -1}));
}

TEST_CASE("gaussian Stieltjes transform against Monte Carlo") {
    const rng::Stream s(77, "g");
    const std::size_t n = 10'000'000;
    std::complex<double> sum = 0.0;
    double sq_re = 0.0, sq_im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = 1.0 / (s.gaussian(i) - std::complex<double>(0, 1));
        sum += v;
        sq_re += v.real() * v.real();
        sq_im += v.imag() * v.imag();
    }
    const auto mean = sum / double(n);
    const double se_re = std::sqrt((sq_re / n - mean.real() * mean.real()) / n);
    const double se_im = std::sqrt((sq_im / n - mean.imag() * mean.imag()) / n);
    const auto g = gaussian_stieltjes({0, 1});
    CHECK(std::abs(mean.real() - g.real()) < 3 * se_re);
    CHECK(std::abs(mean.imag() - g.imag()) < 3 * se_im);
}

TEST_CASE("semicircle plus Gaussian density") {
    const auto pts = semicircle_free_conv_density(StieltjesGrid::uniform(-6, 6, 1201, 1e-2));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        REQUIRE(pts[i].converged);
        REQUIRE(pts[i].iterations <= 200);
        REQUIRE(pts[i].density >= 0.0);
        REQUIRE(std::abs(pts[i].density - pts[pts.size() - 1 - i].density) < 1e-6);
    }
    CHECK_THAT(density_moment(pts, 0), WithinAbs(1.0, 0.01));
    CHECK_THAT(density_moment(pts, 2), WithinAbs(2.0, 0.05));
    const GridCdf cdf(pts);
    CHECK(cdf(-7) == 0.0);
    CHECK(cdf(7) == 1.0);
    CHECK_THAT(cdf(0.0), WithinAbs(0.5, 1e-9));

    // the fixed point itself: m = G_g(z + m)
    const auto& p = pts[700];
    const auto z = std::complex<double>(p.energy, 1e-2);
    CHECK(std::abs(p.stieltjes - gaussian_stieltjes(z + p.stieltjes)) < 1e-9);

    StieltjesGrid bad = StieltjesGrid::uniform(-1, 1, 3, 1e-4);
    CHECK_THROWS_AS(semicircle_free_conv_density(bad), invalid_parameter);
    StieltjesGrid tight = StieltjesGrid::uniform(0, 0, 1, 1e-2);
    tight.max_iterations = 2;
    const auto flagged = semicircle_free_conv_density(tight);
    CHECK_FALSE(flagged[0].converged);
}
