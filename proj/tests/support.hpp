#pragma once

// Random model generators shared by the property tests and the acceptance
// binary. Everything is driven by an explicitly seeded engine so failures
// reproduce.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "dynwalk/dynwalk.hpp"

namespace dwtest {

using dynwalk::RawMatrix;

inline RawMatrix empty_graph(std::size_t n)
{
    return RawMatrix(n, std::vector<int>(n, 0));
}

inline void add_edge(RawMatrix& a, std::size_t u, std::size_t v)
{
    a[u][v] = a[v][u] = 1;
}

inline bool is_connected(const RawMatrix& a)
{
    const std::size_t n = a.size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v)
            if (a[u][v] && !seen[v]) {
                seen[v] = true;
                ++count;
                stack.push_back(v);
            }
    }
    return count == n;
}

// Erdos-Renyi graph with edge probability p.
inline RawMatrix random_graph(std::mt19937_64& rng, std::size_t n, double p)
{
    std::bernoulli_distribution coin(p);
    RawMatrix a = empty_graph(n);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
            if (coin(rng))
                add_edge(a, u, v);
    return a;
}

// Random spanning tree plus extra edges: always connected.
inline RawMatrix random_connected_graph(std::mt19937_64& rng, std::size_t n, double p)
{
    RawMatrix a = random_graph(rng, n, p);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        add_edge(a, order[i], order[pick(rng)]);
    }
    return a;
}

// Complete graph of environment rates drawn from [lo, hi].
inline dynwalk::EnvironmentSpec random_environment(std::mt19937_64& rng, std::size_t m, double lo = 0.2,
                                                   double hi = 3.0)
{
    std::uniform_real_distribution<double> rate(lo, hi);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (Eigen::Index a = 0; a < r.rows(); ++a)
        for (Eigen::Index b = 0; b < r.cols(); ++b)
            if (a != b)
                r(a, b) = rate(rng);
    return dynwalk::EnvironmentSpec::from_dense(r);
}

inline bool union_connected(const std::vector<RawMatrix>& configs)
{
    RawMatrix u = empty_graph(configs.front().size());
    for (const auto& a : configs)
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j)
                u[i][j] |= a[i][j];
    return is_connected(u);
}

inline dynwalk::DynamicGraph assemble(std::mt19937_64& rng, std::vector<RawMatrix> configs)
{
    const std::size_t m = configs.size();
    auto cs = dynwalk::validate_config_set(configs);
    return dynwalk::make_dynamic_graph(std::move(cs), random_environment(rng, m), "random");
}

// Every configuration connected.
inline dynwalk::DynamicGraph random_connected_model(std::mt19937_64& rng, std::size_t max_n, std::size_t max_m)
{
    std::uniform_int_distribution<std::size_t> pick_n(3, max_n), pick_m(2, max_m);
    std::uniform_real_distribution<double> pick_p(0.1, 0.6);
    const std::size_t n = pick_n(rng), m = pick_m(rng);
    std::vector<RawMatrix> configs;
    for (std::size_t k = 0; k < m; ++k)
        configs.push_back(random_connected_graph(rng, n, pick_p(rng)));
    return assemble(rng, std::move(configs));
}

// T-connected, with at least one disconnected configuration.
inline dynwalk::DynamicGraph random_disconnected_model(std::mt19937_64& rng, std::size_t max_n, std::size_t max_m)
{
    std::uniform_int_distribution<std::size_t> pick_n(3, max_n), pick_m(2, max_m);
    std::uniform_real_distribution<double> pick_p(0.15, 0.5);
    for (;;) {
        const std::size_t n = pick_n(rng), m = pick_m(rng);
        std::vector<RawMatrix> configs;
        for (std::size_t k = 0; k < m; ++k)
            configs.push_back(random_graph(rng, n, pick_p(rng)));
        const bool some_disconnected =
            std::any_of(configs.begin(), configs.end(), [](const RawMatrix& a) { return !is_connected(a); });
        if (some_disconnected && union_connected(configs))
            return assemble(rng, std::move(configs));
    }
}

// T-connected, configurations arbitrary.
inline dynwalk::DynamicGraph random_t_connected_model(std::mt19937_64& rng, std::size_t max_n, std::size_t max_m)
{
    std::bernoulli_distribution coin(0.5);
    return coin(rng) ? random_connected_model(rng, max_n, max_m) : random_disconnected_model(rng, max_n, max_m);
}

// Each configuration a disjoint union of cliques, union connected.
inline dynwalk::DynamicGraph random_clique_model(std::mt19937_64& rng, std::size_t max_n, std::size_t max_m)
{
    std::uniform_int_distribution<std::size_t> pick_n(3, max_n), pick_m(2, max_m);
    for (;;) {
        const std::size_t n = pick_n(rng), m = pick_m(rng);
        std::uniform_int_distribution<std::size_t> group(0, n / 2);
        std::vector<RawMatrix> configs;
        for (std::size_t k = 0; k < m; ++k) {
            std::vector<std::size_t> g(n);
            for (auto& x : g)
                x = group(rng);
            RawMatrix a = empty_graph(n);
            for (std::size_t u = 0; u < n; ++u)
                for (std::size_t v = u + 1; v < n; ++v)
                    if (g[u] == g[v])
                        add_edge(a, u, v);
            configs.push_back(std::move(a));
        }
        if (union_connected(configs))
            return assemble(rng, std::move(configs));
    }
}

inline dynwalk::EdgeMarkovSpec random_edge_markov(std::mt19937_64& rng, std::size_t max_n, std::size_t max_edges)
{
    std::uniform_int_distribution<std::size_t> pick_n(2, max_n);
    std::uniform_real_distribution<double> log_rate(-2.0, 2.0);
    dynwalk::EdgeMarkovSpec spec;
    spec.num_nodes = pick_n(rng);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t u = 0; u < spec.num_nodes; ++u)
        for (std::size_t v = u + 1; v < spec.num_nodes; ++v)
            pairs.emplace_back(u, v);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    std::uniform_int_distribution<std::size_t> pick_e(1, std::min(max_edges, pairs.size()));
    pairs.resize(pick_e(rng));
    for (auto [u, v] : pairs) {
        dynwalk::EdgeMarkovSpec::Edge e;
        e.u = u;
        e.v = v;
        e.rate_off = std::pow(10.0, log_rate(rng));
        e.rate_on = std::pow(10.0, log_rate(rng));
        spec.edges.push_back(e);
    }
    return spec;
}

}  // namespace dwtest
