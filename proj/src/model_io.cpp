#include "dynwalk/model_io.hpp"

#include <fstream>
#include <set>

namespace dynwalk {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object())
        throw ValidationError(where + ": expected an object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ValidationError(where + ": unknown key \"" + item.key() + "\"");
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where)
{
    if (!j.contains(key))
        throw ValidationError(where + ": missing key \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(where + ": bad value for \"" + key + "\": " + e.what());
    }
}

EdgeMarkovSpec edge_markov_from_json(const json& j)
{
    const std::string where = "edge_markov";
    reject_unknown(j, {"nodes", "edges", "max_edges"}, where);
    EdgeMarkovSpec spec;
    spec.labels = get<std::vector<std::string>>(j, "nodes", where);
    spec.num_nodes = spec.labels.size();
    if (j.contains("max_edges"))
        spec.max_edges = get<std::size_t>(j, "max_edges", where);
    for (const auto& e : get<json>(j, "edges", where)) {
        reject_unknown(e, {"u", "v", "rate_on", "rate_off"}, where + ".edges[]");
        EdgeMarkovSpec::Edge edge;
        edge.u = get<std::size_t>(e, "u", where);
        edge.v = get<std::size_t>(e, "v", where);
        edge.rate_on = get<double>(e, "rate_on", where);
        edge.rate_off = get<double>(e, "rate_off", where);
        spec.edges.push_back(edge);
    }
    spec.validate();
    return spec;
}

BusSystemSpec bus_from_json(const json& j)
{
    const std::string where = "bus_system";
    reject_unknown(j, {"stops", "lines", "state_cap"}, where);
    BusSystemSpec spec;
    spec.stops = get<std::vector<std::string>>(j, "stops", where);
    if (j.contains("state_cap"))
        spec.state_cap = get<std::size_t>(j, "state_cap", where);
    for (const auto& l : get<json>(j, "lines", where)) {
        reject_unknown(l, {"name", "stops", "buses", "dwell_rates", "travel_rates"}, where + ".lines[]");
        BusSystemSpec::Line line;
        if (l.contains("name"))
            line.name = get<std::string>(l, "name", where);
        line.stops = get<std::vector<std::size_t>>(l, "stops", where);
        line.buses = get<std::size_t>(l, "buses", where);
        line.dwell_rates = get<std::vector<double>>(l, "dwell_rates", where);
        line.travel_rates = get<std::vector<double>>(l, "travel_rates", where);
        spec.lines.push_back(std::move(line));
    }
    spec.validate();
    return spec;
}

}  // namespace

DynamicGraph model_from_json(const json& j)
{
    reject_unknown(j, {"name", "nodes", "configs", "env_rates", "edge_markov", "bus_system"}, "model");
    const std::string name = j.contains("name") ? get<std::string>(j, "name", "model") : std::string{};
    const int sources = int(j.contains("configs")) + int(j.contains("edge_markov")) + int(j.contains("bus_system"));
    if (sources != 1)
        throw ValidationError("model: exactly one of \"configs\", \"edge_markov\", \"bus_system\" is required");

    if (j.contains("edge_markov")) {
        if (j.contains("nodes") || j.contains("env_rates"))
            throw ValidationError("model: \"nodes\"/\"env_rates\" belong to the explicit form only");
        return make_dynamic_graph(edge_markov_from_json(j.at("edge_markov")), name);
    }
    if (j.contains("bus_system")) {
        if (j.contains("nodes") || j.contains("env_rates"))
            throw ValidationError("model: \"nodes\"/\"env_rates\" belong to the explicit form only");
        return make_dynamic_graph(bus_from_json(j.at("bus_system")), name);
    }

    const auto raw = get<std::vector<RawMatrix>>(j, "configs", "model");
    std::vector<std::string> labels;
    if (j.contains("nodes"))
        labels = get<std::vector<std::string>>(j, "nodes", "model");
    ConfigSet cs = validate_config_set(raw, std::move(labels));

    const auto m = static_cast<Eigen::Index>(cs.num_configs());
    Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(m, m);
    if (j.contains("env_rates")) {
        const auto r = get<std::vector<std::vector<double>>>(j, "env_rates", "model");
        if (r.size() != static_cast<std::size_t>(m))
            throw ValidationError("model: env_rates must be " + std::to_string(m) + " x " + std::to_string(m));
        for (Eigen::Index a = 0; a < m; ++a) {
            if (r[static_cast<std::size_t>(a)].size() != static_cast<std::size_t>(m))
                throw ValidationError("model: env_rates must be " + std::to_string(m) + " x " + std::to_string(m));
            for (Eigen::Index b = 0; b < m; ++b)
                rates(a, b) = r[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            if (rates(a, a) != 0.0)
                throw ValidationError("model: env_rates diagonal must be zero (row " + std::to_string(a) + ")");
        }
    } else if (m > 1) {
        throw ValidationError("model: env_rates is required when there is more than one configuration");
    }
    return make_dynamic_graph(std::move(cs), EnvironmentSpec::from_dense(rates), name);
}

DynamicGraph load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open model file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("model file " + path + " is not valid JSON: " + e.what());
    }
    return model_from_json(j);
}

json model_to_json(const DynamicGraph& g, bool explicit_form)
{
    json j;
    if (!g.name.empty())
        j["name"] = g.name;

    if (!explicit_form && g.edge_source) {
        const auto& spec = *g.edge_source;
        json edges = json::array();
        for (const auto& e : spec.edges)
            edges.push_back({{"u", e.u}, {"v", e.v}, {"rate_on", e.rate_on}, {"rate_off", e.rate_off}});
        std::vector<std::string> labels = spec.labels.empty() ? index_labels(spec.num_nodes) : spec.labels;
        j["edge_markov"] = {{"nodes", labels}, {"edges", edges}, {"max_edges", spec.max_edges}};
        return j;
    }
    if (!explicit_form && g.bus_source) {
        const auto& spec = *g.bus_source;
        json lines = json::array();
        for (const auto& l : spec.lines) {
            json line = {{"stops", l.stops}, {"buses", l.buses}, {"dwell_rates", l.dwell_rates},
                         {"travel_rates", l.travel_rates}};
            if (!l.name.empty())
                line["name"] = l.name;
            lines.push_back(line);
        }
        j["bus_system"] = {{"stops", spec.stops}, {"lines", lines}, {"state_cap", spec.state_cap}};
        return j;
    }

    if (!g.env.identity_labels())
        throw ValidationError("model: environments with shared configuration labels have no explicit file form");
    j["nodes"] = g.configs.labels();
    json configs = json::array();
    for (std::size_t k = 0; k < g.configs.num_configs(); ++k)
        configs.push_back(g.configs.raw(k));
    j["configs"] = configs;
    const std::size_t m = g.env.num_states();
    std::vector<std::vector<double>> rates(m, std::vector<double>(m, 0.0));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            rates[a][b] = g.env.rate(a, b);
    j["env_rates"] = rates;
    return j;
}

std::vector<std::string> preset_names()
{
    return {"star-circle", "k3", "kite", "bus"};
}

json preset_json(const std::string& name)
{
    if (name == "star-circle") {
        // Node 1 is the hub of the star; the circle runs 1-2-...-10-1, so
        // edges (1,2) and (1,10) are present in both configurations.
        constexpr int n = 10;
        RawMatrix star(n, std::vector<int>(n, 0)), circle(n, std::vector<int>(n, 0));
        for (int v = 1; v < n; ++v)
            star[0][v] = star[v][0] = 1;
        for (int v = 0; v < n; ++v) {
            const int w = (v + 1) % n;
            circle[v][w] = circle[w][v] = 1;
        }
        return {{"name", "star-circle"},
                {"nodes", index_labels(n)},
                {"configs", {star, circle}},
                {"env_rates", {{0.0, 1.0}, {1.0, 0.0}}}};
    }
    if (name == "k3") {
        // Edge (1,2) flips fast; all edges are On half of the time.
        return {{"name", "k3"},
                {"edge_markov",
                 {{"nodes", index_labels(3)},
                  {"edges",
                   {{{"u", 0}, {"v", 1}, {"rate_on", 1e4}, {"rate_off", 1e4}},
                    {{"u", 0}, {"v", 2}, {"rate_on", 1.0}, {"rate_off", 1.0}},
                    {{"u", 1}, {"v", 2}, {"rate_on", 1.0}, {"rate_off", 1.0}}}}}}};
    }
    if (name == "kite") {
        // 3-regular 6-node graph: thin edges form the cycle 1-2-3-4-6-5-1,
        // thick edges the matching {1-4, 2-5, 3-6}. Every node has two thin
        // edges (rates 1/1) and one thick edge (On rate 100, Off rate 10).
        json edges = json::array();
        const int thin[6][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 5}, {4, 5}, {0, 4}};
        const int thick[3][2] = {{0, 3}, {1, 4}, {2, 5}};
        for (const auto& e : thin)
            edges.push_back({{"u", e[0]}, {"v", e[1]}, {"rate_on", 1.0}, {"rate_off", 1.0}});
        for (const auto& e : thick)
            edges.push_back({{"u", e[0]}, {"v", e[1]}, {"rate_on", 100.0}, {"rate_off", 10.0}});
        return {{"name", "kite"}, {"edge_markov", {{"nodes", index_labels(6)}, {"edges", edges}}}};
    }
    if (name == "bus") {
        // Eleven stops, lines (s1..s5), (s3,s4,s6,s7,s8), (s7,s9,s10,s11) with
        // 1, 1 and 2 buses. Dwell and travel rates are all 1.
        auto line = [](const std::string& nm, std::vector<std::size_t> stops, std::size_t buses) {
            const std::vector<double> ones(stops.size(), 1.0);
            return json{{"name", nm}, {"stops", stops}, {"buses", buses}, {"dwell_rates", ones}, {"travel_rates", ones}};
        };
        return {{"name", "bus"},
                {"bus_system",
                 {{"stops", index_labels(11, "s")},
                  {"lines",
                   {line("L1", {0, 1, 2, 3, 4}, 1), line("L2", {2, 3, 5, 6, 7}, 1), line("L3", {6, 8, 9, 10}, 2)}}}}};
    }
    throw ValidationError("unknown preset \"" + name + "\"");
}

DynamicGraph preset(const std::string& name)
{
    return model_from_json(preset_json(name));
}

}  // namespace dynwalk
