#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dynwalk/environment.hpp"
#include "dynwalk/error.hpp"

namespace dynwalk {

using RawMatrix = std::vector<std::vector<int>>;

/// Validation failure on a raw configuration list. `config`, `u`, `v` name
/// the offending entry (0-based) where one exists.
class ConfigSetError : public ValidationError {
public:
    enum class Kind { Empty, NotSquare, DimensionMismatch, NonBinary, Asymmetric, NonzeroDiagonal, BadLabels };

    ConfigSetError(Kind kind, std::size_t config, std::size_t u, std::size_t v, const std::string& what)
        : ValidationError(what), kind_(kind), config_(config), u_(u), v_(v) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t config() const noexcept { return config_; }
    std::size_t u() const noexcept { return u_; }
    std::size_t v() const noexcept { return v_; }

private:
    Kind kind_;
    std::size_t config_, u_, v_;
};

/// The n nodes and m symmetric 0/1 adjacency matrices A_1..A_m, with degrees
/// and neighbor lists cached at construction.
class ConfigSet {
public:
    ConfigSet() = default;

    std::size_t num_nodes() const noexcept { return n_; }
    std::size_t num_configs() const noexcept { return m_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    bool edge(std::size_t k, std::size_t u, std::size_t v) const { return adj_[(k * n_ + u) * n_ + v] != 0; }
    std::size_t degree(std::size_t k, std::size_t v) const { return deg_[k * n_ + v]; }
    std::span<const std::uint32_t> neighbors(std::size_t k, std::size_t v) const
    {
        const std::size_t row = k * n_ + v;
        return {nbr_.data() + nbr_offset_[row], nbr_offset_[row + 1] - nbr_offset_[row]};
    }

    Eigen::MatrixXi adjacency(std::size_t k) const;
    // Degrees as an m x n matrix.
    Eigen::MatrixXd degree_matrix() const;
    RawMatrix raw(std::size_t k) const;

    friend ConfigSet validate_config_set(const std::vector<RawMatrix>& raw, std::vector<std::string> labels);

private:
    std::size_t n_ = 0, m_ = 0;
    std::vector<std::string> labels_;
    std::vector<std::uint8_t> adj_;  // m * n * n
    std::vector<std::uint32_t> deg_;
    std::vector<std::size_t> nbr_offset_;
    std::vector<std::uint32_t> nbr_;
};

ConfigSet validate_config_set(const std::vector<RawMatrix>& raw, std::vector<std::string> labels = {});

struct TConnectivity {
    bool connected = false;
    Eigen::MatrixXi union_adjacency;
    std::vector<std::vector<std::size_t>> union_components;  // ordered by smallest node
};

TConnectivity t_connectivity(const ConfigSet& cs);

/// Per-configuration partition of the nodes into connected components.
/// Blocks are ordered by their smallest node, members ascending.
struct ComponentPartition {
    std::vector<std::vector<std::vector<std::size_t>>> blocks;  // [k][l] -> nodes
    std::vector<std::vector<std::size_t>> component_of;         // [k][v] -> l

    std::size_t num_components(std::size_t k) const { return blocks[k].size(); }
};

ComponentPartition connected_components(const ConfigSet& cs);

// Edge-Markovian dynamics: each base edge flips On/Off independently.
struct EdgeMarkovSpec {
    struct Edge {
        std::size_t u = 0, v = 0;
        double rate_off = 1.0;  // On -> Off (Lambda_0)
        double rate_on = 1.0;   // Off -> On (Lambda_1)

        double on_fraction() const { return rate_on / (rate_off + rate_on); }
    };

    std::size_t num_nodes = 0;
    std::vector<std::string> labels;
    std::vector<Edge> edges;
    std::size_t max_edges = 20;

    void validate() const;
};

struct EdgeMarkovModel {
    ConfigSet configs;
    EnvironmentSpec env;
    Eigen::VectorXd sigma;  // product form, indexed by edge-subset bitmask
};

/// Expands into 2^|E| configurations, configuration k containing edge i iff
/// bit i of k is set. Sigma comes from the product of per-edge On fractions
/// and is checked against the balance solve for small expansions.
EdgeMarkovModel expand_edge_markovian(const EdgeMarkovSpec& spec);

Eigen::VectorXd edge_markov_sigma(const EdgeMarkovSpec& spec);

struct BusSystemSpec {
    struct Line {
        std::string name;
        std::vector<std::size_t> stops;  // cyclic sequence, indices into `stops`
        std::size_t buses = 1;
        std::vector<double> dwell_rates;   // per position in `stops`
        std::vector<double> travel_rates;  // leg from position j to j+1 (cyclic)
    };

    std::vector<std::string> stops;
    std::vector<Line> lines;
    std::size_t state_cap = 200'000;

    std::size_t total_buses() const;
    void validate() const;
};

struct BusModel {
    ConfigSet configs;   // one node per bus, distinct connectivity graphs only
    EnvironmentSpec env;  // over joint bus positions
    std::vector<std::size_t> bus_line;  // bus -> line
};

/// Environment state = every bus's position, where a line with s stops has
/// 2s positions: 2j at stop j, 2j+1 travelling from stop j to j+1. Buses move
/// one at a time. Buses sharing a physical stop form a clique.
BusModel build_bus_model(const BusSystemSpec& spec);

// Decodes an environment state of `build_bus_model` into per-bus positions.
std::vector<std::size_t> bus_positions(const BusSystemSpec& spec, std::size_t state);

/// A complete dynamic graph: configurations plus the environment driving
/// them, with the generating spec kept when the model came from a builder.
struct DynamicGraph {
    std::string name;
    ConfigSet configs;
    EnvironmentSpec env;
    std::optional<EdgeMarkovSpec> edge_source;
    std::optional<BusSystemSpec> bus_source;

    std::size_t num_nodes() const { return configs.num_nodes(); }
    void check_consistent() const;
};

DynamicGraph make_dynamic_graph(ConfigSet cs, EnvironmentSpec env, std::string name = {});
DynamicGraph make_dynamic_graph(const EdgeMarkovSpec& spec, std::string name = {});
DynamicGraph make_dynamic_graph(const BusSystemSpec& spec, std::string name = {});

}  // namespace dynwalk
