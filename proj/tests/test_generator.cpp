#include <doctest.h>

#include <cmath>

#include "noah/generator.hpp"
#include "oracles.hpp"

using namespace noah;

namespace {

NoahParams constant_params(int seed_len, int k, double theta_c, double theta_f) {
    NoahParams p;
    p.p_seed.assign(seed_len, 1.0 / seed_len);
    p.theta_core.assign(k, AffinityMatrix{{{theta_c, theta_c}, {theta_c, theta_c}}});
    p.theta_fringe.assign(k, AffinityMatrix{{{theta_f, theta_f}, {theta_f, theta_f}}});
    return p;
}

}  // namespace

TEST_CASE("core_attach_prob multiplies per-attribute affinities") {
    BinaryMatrix x(2, 2);
    auto p = constant_params(2, 2, 0.5, 0.5);
    CHECK(core_attach_prob(p, x, 0, 1) == doctest::Approx(0.25).epsilon(1e-12));

    BinaryMatrix x1(2, 1);
    x1.at(0, 0) = 1;
    x1.at(1, 0) = 1;
    NoahParams p1 = constant_params(2, 1, 0.5, 0.5);
    p1.theta_core[0] = {{{0.9, 0.1}, {0.1, 0.9}}};
    CHECK(core_attach_prob(p1, x1, 0, 1) == doctest::Approx(0.9).epsilon(1e-12));

    // three attributes, agreement on two of them
    BinaryMatrix x3(2, 3);
    x3.at(0, 0) = 1;
    x3.at(1, 0) = 1;  // agree
    x3.at(0, 1) = 0;
    x3.at(1, 1) = 0;  // agree
    x3.at(0, 2) = 1;
    x3.at(1, 2) = 0;  // differ
    NoahParams p3 = constant_params(2, 3, 0.5, 0.5);
    for (auto& t : p3.theta_core) t = {{{0.8, 0.2}, {0.2, 0.8}}};
    CHECK(core_attach_prob(p3, x3, 0, 1) == doctest::Approx(0.128).epsilon(1e-12));
}

TEST_CASE("mix_core_attributes follows the group means") {
    BinaryMatrix x(3, 2);
    x.at(0, 0) = 1;
    x.at(1, 0) = 1;
    x.at(2, 0) = 1;  // column 0 all ones
    // column 1 all zeros
    Rng rng(5);
    auto mixed = mix_core_attributes(x, {0, 1, 2}, rng);
    CHECK(mixed[0] == 1);
    CHECK(mixed[1] == 0);
}

TEST_CASE("mix_core_attributes empirical frequency matches the mean") {
    BinaryMatrix x(3, 1);
    x.at(0, 0) = 1;
    x.at(1, 0) = 1;
    x.at(2, 0) = 0;
    Rng rng(99);
    const int trials = 100000;
    int ones = 0;
    for (int t = 0; t < trials; ++t) {
        ones += mix_core_attributes(x, {0, 1, 2}, rng)[0];
    }
    CHECK(std::abs(ones / static_cast<double>(trials) - 2.0 / 3.0) < 0.01);
}

TEST_CASE("fringe_attach_prob looks up the mixed vector against the candidate") {
    BinaryMatrix x(1, 3);
    auto p = constant_params(1, 3, 0.5, 0.5);
    CHECK(fringe_attach_prob(p, {0, 0, 0}, 0, x) == doctest::Approx(0.125).epsilon(1e-12));

    BinaryMatrix x1(1, 1);
    x1.at(0, 0) = 1;
    NoahParams p1 = constant_params(1, 1, 0.5, 0.5);
    p1.theta_fringe[0] = {{{0.2, 0.6}, {0.3, 0.7}}};
    CHECK(fringe_attach_prob(p1, {0}, 0, x1) == doctest::Approx(0.6).epsilon(1e-12));

    // two attributes: product of the two looked-up entries
    BinaryMatrix x2(1, 2);
    x2.at(0, 0) = 1;
    x2.at(0, 1) = 0;
    NoahParams p2 = constant_params(1, 2, 0.5, 0.5);
    p2.theta_fringe[0] = {{{0.11, 0.37}, {0.53, 0.71}}};
    p2.theta_fringe[1] = {{{0.23, 0.29}, {0.41, 0.47}}};
    const double expected = p2.theta_fringe[0][1][1] * p2.theta_fringe[1][0][0];
    CHECK(fringe_attach_prob(p2, {1, 0}, 0, x2) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("near-zero affinities collapse hyperedges to the seed") {
    Rng setup(3);
    auto h = oracle::random_hypergraph(setup, 8, 1, 2);
    auto part = CoreFringePartition::from_core_set(8, {0, 1, 2, 3});
    NoahParams p = constant_params(4, 2, 1e-6, 1e-6);
    // P(any extra attachment) <= |V| * 1e-6 per union bound
    int extras = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_stream(404, t));
        auto e = generate_hyperedge(p, part, h.attributes, rng);
        if (e.size() > 1) extras++;
    }
    CHECK(extras <= 2);
}

TEST_CASE("identity-like affinities with shared attributes fill the core") {
    const int c = 6, k = 2;
    BinaryMatrix x(c, k);
    for (auto& v : x.data) v = 1;  // all nodes share attributes
    auto part = CoreFringePartition::from_core_set(c, {0, 1, 2, 3, 4, 5});
    const double eps = 0.05;
    NoahParams p = constant_params(c, k, eps, eps);
    for (auto& t : p.theta_core) t = {{{1.0 - eps, eps}, {eps, 1.0 - eps}}};

    double mean_core = 0.0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_stream(11, t));
        mean_core += static_cast<double>(generate_hyperedge(p, part, x, rng).size());
    }
    mean_core /= trials;
    const double expected = 1.0 + (c - 1) * std::pow(1.0 - eps, k);
    CHECK(mean_core == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("singleton core makes the seed deterministic") {
    BinaryMatrix x(3, 1);
    auto part = CoreFringePartition::from_core_set(3, {2});
    NoahParams p = constant_params(1, 1, 0.5, 1e-6);
    for (int t = 0; t < 50; ++t) {
        Rng rng(derive_stream(7, t));
        auto e = generate_hyperedge(p, part, x, rng);
        CHECK(std::find(e.begin(), e.end(), 2) != e.end());
    }
}

TEST_CASE("generate validates the edge count and is reproducible") {
    Rng setup(21);
    auto h = oracle::random_hypergraph(setup, 10, 4, 2);
    auto part = CoreFringePartition::from_core_set(10, {0, 2, 4, 6});
    Rng prng(31);
    auto params = oracle::random_params(prng, 4, 2);

    CHECK_THROWS_AS(generate(params, part, h.attributes, 0, 1), std::invalid_argument);

    auto one = generate(params, part, h.attributes, 1, 9);
    CHECK(one.edge_count() == 1);

    auto a = generate(params, part, h.attributes, 40, 1234);
    auto b = generate(params, part, h.attributes, 40, 1234);
    CHECK(a.hyperedges == b.hyperedges);
    CHECK(a.attributes == h.attributes);

    // every hyperedge contains at least one core node (the seed)
    for (const auto& e : a.hyperedges) {
        CHECK(std::any_of(e.begin(), e.end(), [&](int v) { return part.core_pos[v] >= 0; }));
    }
}

TEST_CASE("constant affinities give the analytic binomial sizes") {
    // with value-independent thetas the attributes cannot matter
    const int n = 12, k = 3;
    Rng setup(77);
    auto h = oracle::random_hypergraph(setup, n, 1, k);
    auto part = CoreFringePartition::from_core_set(n, {0, 1, 2, 3, 4});
    const double tc = 0.7, tf = 0.6;  // per-attribute; products are tc^k, tf^k
    NoahParams p = constant_params(5, k, tc, tf);

    const double pc = std::pow(tc, k), pf = std::pow(tf, k);
    const double expected_mean = 1.0 + 4 * pc + 7 * pf;
    const double variance = 4 * pc * (1 - pc) + 7 * pf * (1 - pf);

    const int m = 20000;
    auto gen = generate(p, part, h.attributes, m, 5150);
    double mean = 0.0;
    for (const auto& e : gen.hyperedges) mean += static_cast<double>(e.size());
    mean /= m;
    CHECK(std::abs(mean - expected_mean) < 3.5 * std::sqrt(variance / m));
}

TEST_CASE("noah_cf mode requires the all-core partition") {
    Rng setup(2);
    auto h = oracle::random_hypergraph(setup, 6, 3, 1);
    auto part = CoreFringePartition::from_core_set(6, {0, 1});
    Rng prng(3);
    auto params = oracle::random_params(prng, 2, 1);
    GenOptions opts;
    opts.mode = GenMode::noah_cf;
    Rng rng(4);
    CHECK_THROWS_AS(generate_hyperedge(params, part, h.attributes, rng, opts),
                    std::invalid_argument);

    auto all = all_core_partition(h);
    Rng prng2(5);
    auto cf_params = oracle::random_params(prng2, 6, 1);
    auto gen = generate(cf_params, all, h.attributes, 5, 777, opts);
    CHECK(gen.edge_count() == 5);
}

TEST_CASE("shared_mix draws one mixed vector per hyperedge") {
    // With heterogeneous core attributes and near-deterministic fringe
    // affinities, shared_mix makes all fringe decisions agree per edge.
    const int n = 8, k = 1;
    BinaryMatrix x(n, k);
    for (int v = 0; v < 4; ++v) x.at(v, 0) = v % 2;  // mixed core column
    for (int v = 4; v < n; ++v) x.at(v, 0) = 0;
    auto part = CoreFringePartition::from_core_set(n, {0, 1, 2, 3});
    NoahParams p = constant_params(4, k, 0.999, 0.5);
    p.theta_fringe[0] = {{{0.999, 0.999}, {0.001, 0.001}}};  // attach iff x_mix = 0

    GenOptions shared;
    shared.shared_mix = true;
    int mixed_outcomes = 0;
    for (int t = 0; t < 300; ++t) {
        Rng rng(derive_stream(900, t));
        auto e = generate_hyperedge(p, part, x, rng, shared);
        int fringe_members = 0;
        for (int v : e) {
            if (v >= 4) fringe_members++;
        }
        if (fringe_members != 0 && fringe_members != 4) mixed_outcomes++;
    }
    // all four fringe candidates see the same draw, so outcomes are all-or-none
    CHECK(mixed_outcomes <= 6);
}
