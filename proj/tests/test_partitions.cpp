#include <catch_amalgamated.hpp>

#include "sfplap/partitions.hpp"

using namespace sfplap;

namespace {

std::size_t double_factorial(std::size_t k) {
    std::size_t r = 1;
    for (std::size_t j = k; j > 1; j -= 2) r *= j;
    return r;
}

std::size_t catalan(std::size_t n) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
    return c;
}

}  // namespace

TEST_CASE("pair partition counts") {
    CHECK(enumerate_pair_partitions(0).size() == 1);
    CHECK(enumerate_pair_partitions(3).empty());
    for (std::size_t k = 2; k <= 10; k += 2) {
        INFO("k=" << k);
        CHECK(enumerate_pair_partitions(k).size() == double_factorial(k - 1));
        CHECK(enumerate_noncrossing_pair_partitions(k).size() == catalan(k / 2));
    }
    CHECK_THROWS(enumerate_pair_partitions(18));
}

TEST_CASE("pair partitions are valid, distinct and ordered") {
    const auto all = enumerate_pair_partitions(6);
    for (const auto& p : all) CHECK_NOTHROW(p.validate());
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].pairs < all[i].pairs);
    CHECK_THROWS(PairPartition{4, {{1, 2}, {2, 3}}}.validate());
    CHECK_THROWS(PairPartition{4, {{1, 2}}}.validate());
}

TEST_CASE("crossing") {
    CHECK(is_noncrossing(PairPartition{4, {{1, 2}, {3, 4}}}));
    CHECK(is_noncrossing(PairPartition{4, {{1, 4}, {2, 3}}}));
    CHECK_FALSE(is_noncrossing(PairPartition{4, {{1, 3}, {2, 4}}}));
}

TEST_CASE("gamma pi") {
    CHECK(gamma_pi(PairPartition{2, {{1, 2}}}) == Blocks{{1}, {2}});
    // pi = (12)(34): 1 -> 2 -> 3, 3 -> 4 -> 1; 2 -> 1 -> 2; 4 -> 3 -> 4
    CHECK(gamma_pi(PairPartition{4, {{1, 2}, {3, 4}}}) == Blocks{{1, 3}, {2}, {4}});
    CHECK(gamma_pi(PairPartition{4, {{1, 4}, {2, 3}}}) == Blocks{{1}, {2, 4}, {3}});
    // crossing (13)(24): 1 -> 4 -> 3 -> 2 -> 1, one cycle
    CHECK(gamma_pi(PairPartition{4, {{1, 3}, {2, 4}}}) == Blocks{{1, 2, 3, 4}});
}

TEST_CASE("non-crossing exactly when the graph is a doubled tree") {
    for (std::size_t k = 2; k <= 10; k += 2)
        for (const auto& p : enumerate_pair_partitions(k)) {
            const auto g = partition_graph(p);
            REQUIRE(g.total_traversals() == k);
            REQUIRE(is_nc_tree(g, k) == is_noncrossing(p));
            if (is_noncrossing(p)) REQUIRE(gamma_pi(p).size() == k / 2 + 1);
        }
}

TEST_CASE("walk graph") {
    const auto g = partition_graph(PairPartition{4, {{1, 2}, {3, 4}}});
    REQUIRE(g.vertices.size() == 3);
    CHECK(g.root == 0);
    CHECK(g.vertex_of(3) == 0);
    CHECK(g.degree(0) == 2);
    CHECK(g.degree(1) == 1);
    CHECK(g.edges.size() == 2);
    for (const auto& e : g.edges) CHECK(e.traversal_count == 2);

    const auto empty = walk_graph({}, 0);
    CHECK(empty.vertices.size() == 1);
    CHECK(empty.edges.empty());
    CHECK(is_nc_tree(empty, 0));

    CHECK_THROWS(walk_graph({{1, 2}}, 3));
    CHECK_THROWS(walk_graph({{1, 2}, {2, 3}}, 3));
    CHECK_THROWS(g.vertex_of(9));

    // self loop from a singleton walk
    const auto loop = walk_graph({{1}}, 1);
    CHECK(loop.edges.size() == 1);
    CHECK(loop.degree(0) == 2);
    CHECK_FALSE(is_nc_tree(loop, 1));
}

TEST_CASE("leaf augmentation") {
    const auto g = partition_graph(PairPartition{2, {{1, 2}}});
    const auto a = augment_with_leaves(g, {{0, 2}});
    CHECK(a.total_leaves() == 2);
    CHECK(a.degree(0) == 3);
    CHECK(a.degree(1) == 1);
    CHECK(a.vertex_count() == 4);
    CHECK(a.edge_count() == 3);
    CHECK_THROWS(augment_with_leaves(g, {{5, 1}}));
}
