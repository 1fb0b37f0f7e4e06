#include "dynwalk/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace dynwalk {

namespace {

std::string at(std::size_t k, std::size_t u, std::size_t v)
{
    std::ostringstream os;
    os << "config " << k << ", entry (" << u << "," << v << ")";
    return os.str();
}

// Components of an adjacency predicate over n nodes; ordered by smallest node.
template <class Adjacent>
std::vector<std::vector<std::size_t>> components_of(std::size_t n, Adjacent&& adjacent)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> queue;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s])
            continue;
        std::vector<std::size_t> block;
        queue.assign(1, s);
        seen[s] = 1;
        while (!queue.empty()) {
            const std::size_t u = queue.back();
            queue.pop_back();
            block.push_back(u);
            for (std::size_t v = 0; v < n; ++v)
                if (!seen[v] && adjacent(u, v)) {
                    seen[v] = 1;
                    queue.push_back(v);
                }
        }
        std::sort(block.begin(), block.end());
        out.push_back(std::move(block));
    }
    return out;
}

}  // namespace

ConfigSet validate_config_set(const std::vector<RawMatrix>& raw, std::vector<std::string> labels)
{
    using Kind = ConfigSetError::Kind;
    if (raw.empty())
        throw ConfigSetError(Kind::Empty, 0, 0, 0, "config set: no configurations given");

    const std::size_t n = raw.front().size();
    if (n == 0)
        throw ConfigSetError(Kind::Empty, 0, 0, 0, "config set: configuration 0 has no nodes");
    for (std::size_t k = 0; k < raw.size(); ++k) {
        if (raw[k].size() != n)
            throw ConfigSetError(Kind::DimensionMismatch, k, 0, 0,
                                 "config set: configuration " + std::to_string(k) + " has "
                                     + std::to_string(raw[k].size()) + " rows, expected " + std::to_string(n));
        for (std::size_t u = 0; u < n; ++u)
            if (raw[k][u].size() != n)
                throw ConfigSetError(Kind::NotSquare, k, u, 0,
                                     "config set: configuration " + std::to_string(k) + " row " + std::to_string(u)
                                         + " has " + std::to_string(raw[k][u].size()) + " entries, expected "
                                         + std::to_string(n));
    }
    for (std::size_t k = 0; k < raw.size(); ++k)
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v) {
                const int a = raw[k][u][v];
                if (a != 0 && a != 1)
                    throw ConfigSetError(Kind::NonBinary, k, u, v,
                                         "config set: non-binary value " + std::to_string(a) + " at " + at(k, u, v));
            }
    for (std::size_t k = 0; k < raw.size(); ++k)
        for (std::size_t u = 0; u < n; ++u) {
            if (raw[k][u][u] != 0)
                throw ConfigSetError(Kind::NonzeroDiagonal, k, u, u, "config set: nonzero diagonal at " + at(k, u, u));
            for (std::size_t v = u + 1; v < n; ++v)
                if (raw[k][u][v] != raw[k][v][u])
                    throw ConfigSetError(Kind::Asymmetric, k, u, v, "config set: asymmetric at " + at(k, u, v));
        }

    if (labels.empty())
        labels = index_labels(n);
    if (labels.size() != n)
        throw ConfigSetError(Kind::BadLabels, 0, 0, 0, "config set: expected " + std::to_string(n) + " node labels");

    ConfigSet cs;
    cs.n_ = n;
    cs.m_ = raw.size();
    cs.labels_ = std::move(labels);
    cs.adj_.resize(cs.m_ * n * n);
    cs.deg_.assign(cs.m_ * n, 0);
    cs.nbr_offset_.assign(cs.m_ * n + 1, 0);
    for (std::size_t k = 0; k < cs.m_; ++k)
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v)
                if (raw[k][u][v]) {
                    cs.adj_[(k * n + u) * n + v] = 1;
                    ++cs.deg_[k * n + u];
                    cs.nbr_.push_back(static_cast<std::uint32_t>(v));
                }
    for (std::size_t row = 0; row < cs.m_ * n; ++row)
        cs.nbr_offset_[row + 1] = cs.nbr_offset_[row] + cs.deg_[row];
    return cs;
}

Eigen::MatrixXi ConfigSet::adjacency(std::size_t k) const
{
    Eigen::MatrixXi a(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t u = 0; u < n_; ++u)
        for (std::size_t v = 0; v < n_; ++v)
            a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = edge(k, u, v) ? 1 : 0;
    return a;
}

Eigen::MatrixXd ConfigSet::degree_matrix() const
{
    Eigen::MatrixXd d(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
    for (std::size_t k = 0; k < m_; ++k)
        for (std::size_t v = 0; v < n_; ++v)
            d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v)) = static_cast<double>(degree(k, v));
    return d;
}

RawMatrix ConfigSet::raw(std::size_t k) const
{
    RawMatrix out(n_, std::vector<int>(n_, 0));
    for (std::size_t u = 0; u < n_; ++u)
        for (std::size_t v = 0; v < n_; ++v)
            out[u][v] = edge(k, u, v) ? 1 : 0;
    return out;
}

TConnectivity t_connectivity(const ConfigSet& cs)
{
    const std::size_t n = cs.num_nodes();
    TConnectivity out;
    out.union_adjacency = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < cs.num_configs(); ++k)
        for (std::size_t u = 0; u < n; ++u)
            for (auto v : cs.neighbors(k, u))
                out.union_adjacency(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = 1;
    out.union_components = components_of(n, [&](std::size_t u, std::size_t v) {
        return out.union_adjacency(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) != 0;
    });
    out.connected = out.union_components.size() == 1;
    return out;
}

ComponentPartition connected_components(const ConfigSet& cs)
{
    ComponentPartition p;
    const std::size_t n = cs.num_nodes();
    p.blocks.resize(cs.num_configs());
    p.component_of.assign(cs.num_configs(), std::vector<std::size_t>(n, 0));
    for (std::size_t k = 0; k < cs.num_configs(); ++k) {
        p.blocks[k] = components_of(n, [&](std::size_t u, std::size_t v) { return cs.edge(k, u, v); });
        for (std::size_t l = 0; l < p.blocks[k].size(); ++l)
            for (auto v : p.blocks[k][l])
                p.component_of[k][v] = l;
    }
    return p;
}

void EdgeMarkovSpec::validate() const
{
    if (num_nodes == 0)
        throw ValidationError("edge-Markovian spec: no nodes");
    if (!labels.empty() && labels.size() != num_nodes)
        throw ValidationError("edge-Markovian spec: label count does not match node count");
    if (edges.size() > max_edges || edges.size() >= 63) {
        std::ostringstream os;
        os << "edge-Markovian spec: " << edges.size() << " edges would expand into 2^" << edges.size()
           << " configurations; the cap is " << max_edges << " edges";
        throw ValidationError(os.str());
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (e.u >= num_nodes || e.v >= num_nodes || e.u == e.v)
            throw ValidationError("edge-Markovian spec: edge " + std::to_string(i) + " has invalid endpoints");
        if (!seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second)
            throw ValidationError("edge-Markovian spec: edge " + std::to_string(i) + " is a duplicate");
        if (!(e.rate_off > 0.0) || !(e.rate_on > 0.0) || !std::isfinite(e.rate_off) || !std::isfinite(e.rate_on))
            throw ValidationError("edge-Markovian spec: edge " + std::to_string(i) + " needs positive finite rates");
    }
}

Eigen::VectorXd edge_markov_sigma(const EdgeMarkovSpec& spec)
{
    spec.validate();
    const std::size_t m = std::size_t{1} << spec.edges.size();
    Eigen::VectorXd sigma(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        double p = 1.0;
        for (std::size_t i = 0; i < spec.edges.size(); ++i) {
            const double q = spec.edges[i].on_fraction();
            p *= (k >> i & 1U) ? q : 1.0 - q;
        }
        sigma[static_cast<Eigen::Index>(k)] = p;
    }
    return sigma;
}

EdgeMarkovModel expand_edge_markovian(const EdgeMarkovSpec& spec)
{
    spec.validate();
    const std::size_t n = spec.num_nodes;
    const std::size_t ne = spec.edges.size();
    const std::size_t m = std::size_t{1} << ne;

    std::vector<RawMatrix> raw(m, RawMatrix(n, std::vector<int>(n, 0)));
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < ne; ++i)
            if (k >> i & 1U) {
                raw[k][spec.edges[i].u][spec.edges[i].v] = 1;
                raw[k][spec.edges[i].v][spec.edges[i].u] = 1;
            }

    SparseRows rates(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(m * ne);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < ne; ++i) {
            const std::size_t l = k ^ (std::size_t{1} << i);
            const double r = (k >> i & 1U) ? spec.edges[i].rate_off : spec.edges[i].rate_on;
            trips.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l), r);
        }
    rates.setFromTriplets(trips.begin(), trips.end());

    EdgeMarkovModel out{validate_config_set(raw, spec.labels), EnvironmentSpec(rates), edge_markov_sigma(spec)};

    if (m <= 4096) {
        const Eigen::VectorXd balance = stationary_states(out.env);
        const double gap = (balance - out.sigma).lpNorm<Eigen::Infinity>();
        if (gap > 1e-9)
            throw SolverError("edge-Markovian expansion: product-form sigma disagrees with the balance solve by "
                              + std::to_string(gap));
    }
    return out;
}

std::size_t BusSystemSpec::total_buses() const
{
    std::size_t total = 0;
    for (const auto& line : lines)
        total += line.buses;
    return total;
}

void BusSystemSpec::validate() const
{
    if (lines.empty())
        throw ValidationError("bus system: no lines");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        const std::string where = "bus system: line " + std::to_string(i);
        if (line.stops.empty())
            throw ValidationError(where + " has no stops");
        if (line.buses == 0)
            throw ValidationError(where + " has no buses");
        for (auto s : line.stops)
            if (s >= stops.size())
                throw ValidationError(where + " references unknown stop " + std::to_string(s));
        if (line.dwell_rates.size() != line.stops.size() || line.travel_rates.size() != line.stops.size())
            throw ValidationError(where + " needs one dwell rate and one travel rate per stop");
        for (double r : line.dwell_rates)
            if (!(r > 0.0) || !std::isfinite(r))
                throw ValidationError(where + " has a non-positive dwell rate");
        for (double r : line.travel_rates)
            if (!(r > 0.0) || !std::isfinite(r))
                throw ValidationError(where + " has a non-positive travel rate");
    }
}

std::vector<std::size_t> bus_positions(const BusSystemSpec& spec, std::size_t state)
{
    std::vector<std::size_t> pos;
    for (const auto& line : spec.lines)
        for (std::size_t b = 0; b < line.buses; ++b) {
            const std::size_t radix = 2 * line.stops.size();
            pos.push_back(state % radix);
            state /= radix;
        }
    return pos;
}

BusModel build_bus_model(const BusSystemSpec& spec)
{
    spec.validate();

    std::vector<std::size_t> radix, line_of;
    for (std::size_t i = 0; i < spec.lines.size(); ++i)
        for (std::size_t b = 0; b < spec.lines[i].buses; ++b) {
            radix.push_back(2 * spec.lines[i].stops.size());
            line_of.push_back(i);
        }
    const std::size_t nb = radix.size();

    std::size_t states = 1;
    for (auto r : radix) {
        if (states > spec.state_cap / r)
            throw ValidationError("bus system: environment state space exceeds the cap of "
                                  + std::to_string(spec.state_cap) + " states");
        states *= r;
    }

    std::vector<std::size_t> stride(nb, 1);
    for (std::size_t b = 1; b < nb; ++b)
        stride[b] = stride[b - 1] * radix[b - 1];

    std::vector<RawMatrix> configs;
    std::unordered_map<std::string, std::size_t> config_index;
    std::vector<std::size_t> config_of_state(states);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(states * nb);

    std::vector<std::size_t> pos(nb, 0);
    std::string key(nb * nb, '0');
    for (std::size_t s = 0; s < states; ++s) {
        std::size_t rest = s;
        for (std::size_t b = 0; b < nb; ++b) {
            pos[b] = rest % radix[b];
            rest /= radix[b];
        }

        auto physical_stop = [&](std::size_t b) -> std::ptrdiff_t {
            if (pos[b] % 2 != 0)
                return -1;
            return static_cast<std::ptrdiff_t>(spec.lines[line_of[b]].stops[pos[b] / 2]);
        };
        for (std::size_t a = 0; a < nb; ++a)
            for (std::size_t b = 0; b < nb; ++b) {
                const auto sa = physical_stop(a);
                key[a * nb + b] = (a != b && sa >= 0 && sa == physical_stop(b)) ? '1' : '0';
            }
        auto [it, inserted] = config_index.try_emplace(key, configs.size());
        if (inserted) {
            RawMatrix m(nb, std::vector<int>(nb, 0));
            for (std::size_t a = 0; a < nb; ++a)
                for (std::size_t b = 0; b < nb; ++b)
                    m[a][b] = key[a * nb + b] == '1';
            configs.push_back(std::move(m));
        }
        config_of_state[s] = it->second;

        for (std::size_t b = 0; b < nb; ++b) {
            const auto& line = spec.lines[line_of[b]];
            const std::size_t j = pos[b] / 2;
            const double r = pos[b] % 2 == 0 ? line.dwell_rates[j] : line.travel_rates[j];
            const std::size_t next = (pos[b] + 1) % radix[b];
            const std::size_t target = s - pos[b] * stride[b] + next * stride[b];
            trips.emplace_back(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(target), r);
        }
    }

    SparseRows rates(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
    rates.setFromTriplets(trips.begin(), trips.end());

    std::vector<std::string> labels;
    for (std::size_t i = 0; i < spec.lines.size(); ++i) {
        const std::string line_name = spec.lines[i].name.empty() ? "L" + std::to_string(i + 1) : spec.lines[i].name;
        for (std::size_t b = 0; b < spec.lines[i].buses; ++b)
            labels.push_back(line_name + "B" + std::to_string(b + 1));
    }

    BusModel out;
    const std::size_t num_configs = configs.size();
    out.configs = validate_config_set(configs, std::move(labels));
    out.env = EnvironmentSpec(rates, std::move(config_of_state), num_configs);
    out.bus_line = std::move(line_of);
    return out;
}

void DynamicGraph::check_consistent() const
{
    if (env.num_configs() != configs.num_configs())
        throw ValidationError("model: environment has " + std::to_string(env.num_configs())
                              + " configuration labels but the config set has " + std::to_string(configs.num_configs()));
}

DynamicGraph make_dynamic_graph(ConfigSet cs, EnvironmentSpec env, std::string name)
{
    DynamicGraph g{std::move(name), std::move(cs), std::move(env), std::nullopt, std::nullopt};
    g.check_consistent();
    return g;
}

DynamicGraph make_dynamic_graph(const EdgeMarkovSpec& spec, std::string name)
{
    auto expanded = expand_edge_markovian(spec);
    DynamicGraph g{std::move(name), std::move(expanded.configs), std::move(expanded.env), spec, std::nullopt};
    return g;
}

DynamicGraph make_dynamic_graph(const BusSystemSpec& spec, std::string name)
{
    auto built = build_bus_model(spec);
    DynamicGraph g{std::move(name), std::move(built.configs), std::move(built.env), std::nullopt, spec};
    return g;
}

}  // namespace dynwalk
