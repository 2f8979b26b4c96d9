#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "noah/hypergraph.hpp"
#include "noah/rng.hpp"
#include "oracles.hpp"

using namespace noah;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

}  // namespace

TEST_CASE("load_hypergraph parses the smallest well-formed input") {
    auto edges = write_temp("hg_edges_a.txt", "0 1\n1 2\n");
    auto attrs = write_temp("hg_attrs_a.txt", "1\n0\n1\n");
    auto h = load_hypergraph(edges, attrs);
    CHECK(h.node_count == 3);
    CHECK(h.edge_count() == 2);
    CHECK(h.attr_count() == 1);
    CHECK(h.hyperedges[0] == std::vector<int>{0, 1});
    CHECK(h.attributes.at(0, 0) == 1);
    CHECK(h.attributes.at(1, 0) == 0);
}

TEST_CASE("load_hypergraph accepts comma separators and comments") {
    auto edges = write_temp("hg_edges_b.txt", "# comment\n0,1,2\n2, 0\n");
    auto attrs = write_temp("hg_attrs_b.txt", "1 0\n0 0\n1 1\n");
    auto h = load_hypergraph(edges, attrs);
    CHECK(h.edge_count() == 2);
    CHECK(h.hyperedges[0] == std::vector<int>{0, 1, 2});
    CHECK(h.hyperedges[1] == std::vector<int>{0, 2});
}

TEST_CASE("load_hypergraph deduplicates repeated ids with a warning") {
    auto edges = write_temp("hg_edges_c.txt", "0 0 1\n");
    auto attrs = write_temp("hg_attrs_c.txt", "1\n0\n");
    std::vector<std::string> warnings;
    auto h = load_hypergraph(edges, attrs, &warnings);
    CHECK(h.hyperedges[0] == std::vector<int>{0, 1});
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find(":1") != std::string::npos);
}

TEST_CASE("load_hypergraph rejects malformed inputs with line numbers") {
    auto attrs = write_temp("hg_attrs_d.txt", "1\n0\n");

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_hypergraph("/nonexistent/file.txt", attrs), std::invalid_argument);
    }
    SUBCASE("node id out of range") {
        auto edges = write_temp("hg_edges_d1.txt", "0 1\n1 7\n");
        CHECK_THROWS_WITH_AS(load_hypergraph(edges, attrs),
                             doctest::Contains(":2"), std::invalid_argument);
    }
    SUBCASE("empty hyperedge line") {
        auto edges = write_temp("hg_edges_d2.txt", "0 1\n\n1\n");
        CHECK_THROWS_WITH_AS(load_hypergraph(edges, attrs),
                             doctest::Contains(":2"), std::invalid_argument);
    }
    SUBCASE("non-binary attribute token") {
        auto edges = write_temp("hg_edges_d3.txt", "0 1\n");
        auto bad = write_temp("hg_attrs_d3.txt", "1\n2\n");
        CHECK_THROWS_WITH_AS(load_hypergraph(edges, bad),
                             doctest::Contains(":2"), std::invalid_argument);
    }
}

TEST_CASE("save and reload round-trips the structure") {
    Rng rng(11);
    auto h = oracle::random_hypergraph(rng, 9, 14, 3);
    auto edges = fs::temp_directory_path() / "hg_rt_edges.txt";
    auto attrs = fs::temp_directory_path() / "hg_rt_attrs.txt";
    save_edges(h, edges);
    save_attributes(h, attrs);
    auto back = load_hypergraph(edges, attrs);
    CHECK(back.node_count == h.node_count);
    CHECK(back.hyperedges == h.hyperedges);
    CHECK(back.attributes == h.attributes);
}

TEST_CASE("degree_vector counts incidences") {
    AttributedHypergraph h;
    h.node_count = 3;
    h.attributes = BinaryMatrix(3, 1);
    h.hyperedges = {{0, 1}, {1, 2}};
    CHECK(degree_vector(h) == std::vector<int>{1, 2, 1});

    AttributedHypergraph single;
    single.node_count = 2;
    single.attributes = BinaryMatrix(2, 1);
    single.hyperedges = {{0}};
    CHECK(degree_vector(single) == std::vector<int>{1, 0});
}

TEST_CASE("size_vector lists hyperedge sizes") {
    AttributedHypergraph h;
    h.node_count = 4;
    h.attributes = BinaryMatrix(4, 1);
    h.hyperedges = {{0, 1}, {1, 2, 3}};
    CHECK(size_vector(h) == std::vector<int>{2, 3});

    h.hyperedges = {{0}, {1}, {2}};
    CHECK(size_vector(h) == std::vector<int>{1, 1, 1});
}

TEST_CASE("sum of sizes equals sum of degrees on random instances") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        auto h = oracle::random_hypergraph(rng, 2 + static_cast<int>(rng.uniform_below(10)),
                                           1 + static_cast<int>(rng.uniform_below(12)), 2);
        const auto deg = degree_vector(h);
        const auto sz = size_vector(h);
        long long total_deg = 0, total_sz = 0;
        for (int d : deg) total_deg += d;
        for (int s : sz) total_sz += s;
        CHECK(total_deg == total_sz);
    }
}

TEST_CASE("binarize_attributes expands categorical and thresholds continuous") {
    RawAttributeTable raw;
    raw.rows = 3;
    RawColumn cat;
    cat.kind = RawColumn::Kind::categorical;
    cat.labels = {"A", "B", "A"};
    raw.columns.push_back(cat);

    SUBCASE("one-hot of two values") {
        auto m = binarize_attributes(raw, {});
        REQUIRE(m.cols == 2);
        CHECK(m.at(0, 0) == 1);
        CHECK(m.at(0, 1) == 0);
        CHECK(m.at(1, 0) == 0);
        CHECK(m.at(1, 1) == 1);
        CHECK(m.at(2, 0) == 1);
    }

    SUBCASE("continuous thresholding") {
        RawAttributeTable cont;
        cont.rows = 2;
        RawColumn col;
        col.kind = RawColumn::Kind::continuous;
        col.values = {0.2, 0.9};
        cont.columns.push_back(col);
        auto m = binarize_attributes(cont, {{0, 0.5}});
        REQUIRE(m.cols == 1);
        CHECK(m.at(0, 0) == 0);
        CHECK(m.at(1, 0) == 1);
    }

    SUBCASE("mixed table expands to the expected width") {
        RawAttributeTable mixed;
        mixed.rows = 3;
        RawColumn c3;
        c3.kind = RawColumn::Kind::categorical;
        c3.labels = {"x", "y", "z"};
        RawColumn cc;
        cc.kind = RawColumn::Kind::continuous;
        cc.values = {1.0, 2.0, 3.0};
        mixed.columns = {c3, cc};
        auto m = binarize_attributes(mixed, {{1, 2.0}});
        CHECK(m.cols == 4);  // 3 one-hot + 1 thresholded
    }

    SUBCASE("missing threshold is rejected") {
        RawAttributeTable cont;
        cont.rows = 1;
        RawColumn col;
        col.kind = RawColumn::Kind::continuous;
        col.values = {0.5};
        cont.columns.push_back(col);
        CHECK_THROWS_AS(binarize_attributes(cont, {}), std::invalid_argument);
    }
}

TEST_CASE("binarize_attributes puts exactly one 1 per categorical row") {
    Rng rng(23);
    RawAttributeTable raw;
    raw.rows = 20;
    RawColumn cat;
    cat.kind = RawColumn::Kind::categorical;
    const char* values[] = {"red", "green", "blue", "teal"};
    for (int i = 0; i < raw.rows; ++i) cat.labels.push_back(values[rng.uniform_below(4)]);
    raw.columns.push_back(cat);
    auto m = binarize_attributes(raw, {});
    for (int r = 0; r < m.rows; ++r) {
        int ones = 0;
        for (int c = 0; c < m.cols; ++c) {
            const int v = m.at(r, c);
            CHECK((v == 0 || v == 1));
            ones += v;
        }
        CHECK(ones == 1);
    }
}
