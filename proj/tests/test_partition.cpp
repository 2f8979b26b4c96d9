#include <doctest.h>

#include <algorithm>
#include <set>

#include "noah/partition.hpp"
#include "oracles.hpp"

using namespace noah;

namespace {

AttributedHypergraph make(int n, std::vector<std::vector<int>> edges) {
    AttributedHypergraph h;
    h.node_count = n;
    h.attributes = BinaryMatrix(n, 1);
    h.hyperedges = std::move(edges);
    return h;
}

bool is_hitting_set(const AttributedHypergraph& h, const std::vector<int>& s) {
    std::set<int> in(s.begin(), s.end());
    return std::all_of(h.hyperedges.begin(), h.hyperedges.end(), [&](const auto& e) {
        return std::any_of(e.begin(), e.end(), [&](int v) { return in.count(v) > 0; });
    });
}

bool is_minimal(const AttributedHypergraph& h, const std::vector<int>& s) {
    for (size_t i = 0; i < s.size(); ++i) {
        std::vector<int> without = s;
        without.erase(without.begin() + i);
        if (is_hitting_set(h, without)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("minimal_hitting_set on the chain {1,2},{2,3} is always {2}") {
    auto h = make(4, {{1, 2}, {2, 3}});
    for (uint64_t seed = 0; seed < 64; ++seed) {
        Rng rng(seed);
        CHECK(minimal_hitting_set(h, rng) == std::vector<int>{2});
    }
}

TEST_CASE("minimal_hitting_set forced singleton") {
    auto h = make(1, {{0}});
    Rng rng(3);
    CHECK(minimal_hitting_set(h, rng) == std::vector<int>{0});
}

TEST_CASE("minimal_hitting_set of one pair edge is a single node") {
    auto h = make(2, {{0, 1}});
    for (uint64_t seed = 0; seed < 32; ++seed) {
        Rng rng(seed);
        auto s = minimal_hitting_set(h, rng);
        REQUIRE(s.size() == 1);
        CHECK((s[0] == 0 || s[0] == 1));
    }
}

TEST_CASE("minimal_hitting_set is a minimal hitting set on random instances") {
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        auto h = oracle::random_hypergraph(rng, 3 + static_cast<int>(rng.uniform_below(8)),
                                           1 + static_cast<int>(rng.uniform_below(10)), 1);
        Rng inner(rng.next_u64());
        auto s = minimal_hitting_set(h, inner);
        CHECK(is_hitting_set(h, s));
        CHECK(is_minimal(h, s));
    }
}

TEST_CASE("umhs_partition splits the chain as expected") {
    auto h = make(4, {{1, 2}, {2, 3}});
    for (int rounds : {1, 3, 8}) {
        Rng rng(5);
        auto p = umhs_partition(h, rounds, rng);
        CHECK(p.core == std::vector<int>{2});
        CHECK(p.fringe == std::vector<int>{0, 1, 3});
        CHECK(p.rounds_used == rounds);
    }
}

TEST_CASE("umhs_partition of a single all-covering hyperedge keeps one core node") {
    auto h = make(5, {{0, 1, 2, 3, 4}});
    Rng rng(17);
    auto p = umhs_partition(h, 1, rng);
    CHECK(p.core_size() == 1);
    CHECK(p.fringe_size() == 4);
}

TEST_CASE("umhs core is a hitting set and partition is exact") {
    Rng rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        auto h = oracle::random_hypergraph(rng, 4 + static_cast<int>(rng.uniform_below(10)),
                                           2 + static_cast<int>(rng.uniform_below(12)), 1);
        Rng inner(rng.next_u64());
        auto p = umhs_partition(h, 4, inner);
        CHECK(is_hitting_set(h, p.core));
        CHECK(p.core_size() + p.fringe_size() == h.node_count);
        for (int v : p.core) CHECK(p.core_pos[v] >= 0);
        for (int v : p.fringe) CHECK(p.fringe_pos[v] >= 0);
        // disjoint by construction of the position maps
        for (int v = 0; v < h.node_count; ++v) {
            CHECK(((p.core_pos[v] >= 0) != (p.fringe_pos[v] >= 0)));
        }
    }
}

TEST_CASE("umhs rounds are monotone when earlier seeds are reused") {
    Rng outer(41);
    for (int trial = 0; trial < 10; ++trial) {
        auto h = oracle::random_hypergraph(outer, 8, 10, 1);
        const uint64_t seed = outer.next_u64();
        Rng r1(seed), r2(seed);
        auto small = umhs_partition(h, 3, r1);
        auto large = umhs_partition(h, 4, r2);
        CHECK(std::includes(large.core.begin(), large.core.end(), small.core.begin(),
                            small.core.end()));
    }
}

TEST_CASE("umhs_partition is deterministic for a fixed seed") {
    Rng outer(77);
    auto h = oracle::random_hypergraph(outer, 12, 20, 2);
    Rng a(2024), b(2024);
    auto p1 = umhs_partition(h, 10, a);
    auto p2 = umhs_partition(h, 10, b);
    CHECK(p1.core == p2.core);
    CHECK(p1.fringe == p2.fringe);
}

TEST_CASE("degree-0 nodes always land in the fringe") {
    auto h = make(5, {{1, 2}, {2, 3}});  // nodes 0 and 4 isolated
    Rng rng(8);
    auto p = umhs_partition(h, 6, rng);
    CHECK(p.core_pos[0] < 0);
    CHECK(p.core_pos[4] < 0);
}

TEST_CASE("umhs_partition rejects zero rounds") {
    auto h = make(2, {{0, 1}});
    Rng rng(1);
    CHECK_THROWS_AS(umhs_partition(h, 0, rng), std::invalid_argument);
}
