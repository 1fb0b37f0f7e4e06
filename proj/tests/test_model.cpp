#include <doctest.h>

#include <random>
#include <set>

#include "dynwalk/dynwalk.hpp"
#include "support.hpp"

using namespace dynwalk;
using dwtest::add_edge;
using dwtest::empty_graph;

namespace {

ConfigSetError::Kind kind_of(const std::vector<RawMatrix>& raw)
{
    try {
        validate_config_set(raw);
    } catch (const ConfigSetError& e) {
        return e.kind();
    }
    FAIL("expected ConfigSetError");
    return ConfigSetError::Kind::Empty;
}

RawMatrix triangle()
{
    RawMatrix a = empty_graph(3);
    add_edge(a, 0, 1);
    add_edge(a, 1, 2);
    add_edge(a, 0, 2);
    return a;
}

}  // namespace

TEST_CASE("single edge config set")
{
    const auto cs = validate_config_set({{{0, 1}, {1, 0}}});
    CHECK(cs.num_nodes() == 2);
    CHECK(cs.num_configs() == 1);
    CHECK(cs.degree(0, 0) == 1);
    CHECK(cs.degree(0, 1) == 1);
    CHECK(cs.neighbors(0, 0).size() == 1);
    CHECK(cs.neighbors(0, 0)[0] == 1);
    CHECK(cs.labels() == std::vector<std::string>{"1", "2"});
}

TEST_CASE("config set validation errors")
{
    CHECK(kind_of({}) == ConfigSetError::Kind::Empty);
    CHECK(kind_of({empty_graph(3), empty_graph(4)}) == ConfigSetError::Kind::DimensionMismatch);
    CHECK(kind_of({{{0, 2}, {2, 0}}}) == ConfigSetError::Kind::NonBinary);
    CHECK(kind_of({{{0, 1}, {0, 0}}}) == ConfigSetError::Kind::Asymmetric);
    CHECK(kind_of({{{1, 0}, {0, 0}}}) == ConfigSetError::Kind::NonzeroDiagonal);
    CHECK(kind_of({{{0, 1, 0}, {1, 0}, {0, 0, 0}}}) == ConfigSetError::Kind::NotSquare);
    CHECK_THROWS_AS(validate_config_set({empty_graph(2)}, {"a"}), ConfigSetError);

    try {
        validate_config_set({empty_graph(3), {{0, 0, 0}, {0, 0, 3}, {0, 3, 0}}});
    } catch (const ConfigSetError& e) {
        CHECK(e.config() == 1);
        CHECK(e.u() == 1);
        CHECK(e.v() == 2);
    }
}

TEST_CASE("t-connectivity")
{
    CHECK(t_connectivity(validate_config_set({triangle()})).connected);

    RawMatrix a = empty_graph(3), b = empty_graph(3);
    add_edge(a, 0, 1);
    add_edge(b, 1, 2);
    CHECK(t_connectivity(validate_config_set({a, b})).connected);

    RawMatrix c = empty_graph(4), d = empty_graph(4);
    add_edge(c, 0, 1);
    add_edge(d, 1, 2);
    const auto tc = t_connectivity(validate_config_set({c, d}));
    CHECK_FALSE(tc.connected);
    REQUIRE(tc.union_components.size() == 2);
    CHECK(tc.union_components[1] == std::vector<std::size_t>{3});
}

TEST_CASE("connected components")
{
    const auto tri = connected_components(validate_config_set({triangle()}));
    REQUIRE(tri.num_components(0) == 1);
    CHECK(tri.blocks[0][0].size() == 3);

    RawMatrix a = empty_graph(3);
    add_edge(a, 0, 1);
    const auto p = connected_components(validate_config_set({a}));
    REQUIRE(p.num_components(0) == 2);
    CHECK(p.blocks[0][0] == std::vector<std::size_t>{0, 1});
    CHECK(p.blocks[0][1] == std::vector<std::size_t>{2});
    CHECK(p.component_of[0][2] == 1);

    const auto sc = preset("star-circle");
    const auto parts = connected_components(sc.configs);
    for (std::size_t k = 0; k < sc.configs.num_configs(); ++k) {
        REQUIRE(parts.num_components(k) == 1);
        CHECK(parts.blocks[k][0].size() == 10);
    }
}

TEST_CASE("edge-markovian expansion")
{
    EdgeMarkovSpec one;
    one.num_nodes = 2;
    one.edges = {{0, 1, 1.0, 3.0}};
    const auto m1 = expand_edge_markovian(one);
    CHECK(m1.configs.num_configs() == 2);
    CHECK(m1.sigma[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(m1.sigma[1] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK_FALSE(m1.configs.edge(0, 0, 1));
    CHECK(m1.configs.edge(1, 0, 1));

    const auto k3 = preset("k3");
    REQUIRE(k3.configs.num_configs() == 8);
    const auto sigma = stationary_sigma(k3.env);
    for (std::size_t k = 0; k < 8; ++k)
        CHECK(sigma[k] == doctest::Approx(0.125).epsilon(1e-12));

    const auto kite = preset("kite");
    REQUIRE(kite.edge_source);
    CHECK(kite.configs.num_configs() == (std::size_t{1} << kite.edge_source->edges.size()));
    std::size_t thick = 0;
    for (const auto& e : kite.edge_source->edges)
        if (e.rate_on == 100.0) {
            ++thick;
            CHECK(e.on_fraction() == doctest::Approx(100.0 / 110.0));
        }
    CHECK(thick == 3);
}

TEST_CASE("edge-markovian expansion rejects oversized edge sets")
{
    EdgeMarkovSpec big;
    big.num_nodes = 8;
    for (std::size_t u = 0; u < 8; ++u)
        for (std::size_t v = u + 1; v < 8; ++v)
            big.edges.push_back({u, v, 1.0, 1.0});
    CHECK_THROWS_AS(expand_edge_markovian(big), ValidationError);

    EdgeMarkovSpec bad;
    bad.num_nodes = 2;
    bad.edges = {{0, 1, 0.0, 1.0}};
    CHECK_THROWS_AS(expand_edge_markovian(bad), ValidationError);
    bad.edges = {{0, 0, 1.0, 1.0}};
    CHECK_THROWS_AS(expand_edge_markovian(bad), ValidationError);
    bad.edges = {{0, 1, 1.0, 1.0}, {1, 0, 1.0, 1.0}};
    CHECK_THROWS_AS(expand_edge_markovian(bad), ValidationError);
}

TEST_CASE("bus preset")
{
    const auto bus = preset("bus");
    CHECK(bus.num_nodes() == 4);
    CHECK(t_connectivity(bus.configs).connected);
    CHECK(bus.env.num_states() == 6400);
}

TEST_CASE("bus model degenerate and two-line cases")
{
    BusSystemSpec one;
    one.stops = {"a", "b", "c"};
    one.lines = {{"L", {0, 1, 2}, 1, {1, 1, 1}, {1, 1, 1}}};
    const auto m1 = build_bus_model(one);
    CHECK(m1.configs.num_nodes() == 1);
    for (std::size_t k = 0; k < m1.configs.num_configs(); ++k)
        CHECK(m1.configs.degree(k, 0) == 0);

    BusSystemSpec two;
    two.stops = {"a", "b", "c"};
    two.lines = {{"L1", {0, 1}, 1, {1, 2}, {1, 1}}, {"L2", {1, 2}, 1, {3, 1}, {2, 1}}};
    const auto m2 = build_bus_model(two);
    CHECK(m2.configs.num_nodes() == 2);
    CHECK(m2.configs.num_configs() == 2);
    CHECK(t_connectivity(m2.configs).connected);
    CHECK(m2.env.num_states() == 16);

    BusSystemSpec capped = two;
    capped.state_cap = 10;
    CHECK_THROWS_AS(build_bus_model(capped), ValidationError);
}

TEST_CASE("bus positions decode with bus 0 least significant")
{
    BusSystemSpec two;
    two.stops = {"a", "b", "c"};
    two.lines = {{"L1", {0, 1}, 1, {1, 1}, {1, 1}}, {"L2", {1, 2}, 1, {1, 1}, {1, 1}}};
    CHECK(bus_positions(two, 0) == std::vector<std::size_t>{0, 0});
    CHECK(bus_positions(two, 1) == std::vector<std::size_t>{1, 0});
    CHECK(bus_positions(two, 4) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("property: handshake and component blocks" * doctest::description("random models"))
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = dwtest::random_disconnected_model(rng, 9, 4);
        const auto& cs = g.configs;
        const auto parts = connected_components(cs);
        for (std::size_t k = 0; k < cs.num_configs(); ++k) {
            std::size_t sum = 0;
            for (std::size_t v = 0; v < cs.num_nodes(); ++v)
                sum += cs.degree(k, v);
            CHECK(sum % 2 == 0);

            // Re-union the blocks and compare with A_k.
            std::size_t inside = 0;
            for (const auto& block : parts.blocks[k])
                for (auto u : block)
                    for (auto v : block)
                        inside += cs.edge(k, u, v);
            CHECK(inside == sum);
            for (std::size_t u = 0; u < cs.num_nodes(); ++u)
                for (std::size_t v = 0; v < cs.num_nodes(); ++v)
                    if (cs.edge(k, u, v))
                        CHECK(parts.component_of[k][u] == parts.component_of[k][v]);
        }
    }
}

TEST_CASE("property: edge-markovian sigma and single-edge transitions")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const auto spec = dwtest::random_edge_markov(rng, 5, 6);
        const auto em = expand_edge_markovian(spec);
        const Eigen::VectorXd balance = stationary_sigma(em.env).values();
        CHECK((balance - em.sigma).lpNorm<Eigen::Infinity>() <= 1e-12);

        const auto& q = em.env.generator();
        for (Eigen::Index s = 0; s < q.outerSize(); ++s) {
            std::size_t off = 0;
            for (SparseRows::InnerIterator it(q, s); it; ++it)
                if (it.col() != s && it.value() != 0.0) {
                    ++off;
                    CHECK(std::popcount(static_cast<unsigned>(s ^ it.col())) == 1);
                }
            CHECK(off == spec.edges.size());
        }
    }
}

TEST_CASE("property: bus configurations are unions of cliques")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> rate(0.2, 5.0);
    auto spec = preset("bus").bus_source.value();
    for (int draw = 0; draw < 3; ++draw) {
        for (auto& line : spec.lines) {
            for (auto& r : line.dwell_rates)
                r = rate(rng);
            for (auto& r : line.travel_rates)
                r = rate(rng);
        }
        const auto bm = build_bus_model(spec);
        const auto parts = connected_components(bm.configs);
        for (std::size_t k = 0; k < bm.configs.num_configs(); ++k)
            for (const auto& block : parts.blocks[k])
                for (auto u : block)
                    for (auto v : block)
                        if (u != v)
                            CHECK(bm.configs.edge(k, u, v));
    }
}
