// Command-line front end for the dynwalk library.
//
//   dynwalk <subcommand> (--preset NAME | --model FILE) [options]
//
// Exit codes: 0 success, 1 validation or usage error, 2 solver error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynwalk/dynwalk.hpp"

namespace {

using namespace dynwalk;

struct ModelSource {
    std::string preset;
    std::string path;
};

struct Common {
    ModelSource source;
    std::string beta = "constant";
    std::string out;
    std::string solver = "auto";
};

void add_model_options(CLI::App* cmd, Common& c)
{
    auto* p = cmd->add_option("--preset", c.source.preset, "Bundled model: star-circle, k3, kite, bus");
    auto* m = cmd->add_option("--model", c.source.path, "Model file (JSON)");
    p->excludes(m);
    m->excludes(p);
}

void add_walker_options(CLI::App* cmd, Common& c)
{
    cmd->add_option("--beta", c.beta, "Rate multipliers: constant (beta=1) or degree (beta=d)")
        ->check(CLI::IsMember({"constant", "degree"}));
}

void add_output_option(CLI::App* cmd, Common& c)
{
    cmd->add_option("--out", c.out, "Write data here instead of standard output");
}

void add_solver_option(CLI::App* cmd, Common& c)
{
    cmd->add_option("--solver", c.solver, "Stationary solver: auto, dense, sparse, iterative, power")
        ->check(CLI::IsMember({"auto", "dense", "sparse", "iterative", "power"}));
}

DynamicGraph load(const ModelSource& src)
{
    if (src.preset.empty() == src.path.empty())
        throw ValidationError("exactly one of --preset or --model is required");
    return src.preset.empty() ? load_model(src.path) : preset(src.preset);
}

WalkerSpec walker_for(const DynamicGraph& g, const std::string& beta, double gamma)
{
    return beta == "degree" ? WalkerSpec::degree(g.configs, gamma) : WalkerSpec::constant(g.configs, gamma);
}

SolverOptions solver_for(const std::string& name)
{
    SolverOptions o;
    if (name == "dense")
        o.method = SolverMethod::Dense;
    else if (name == "sparse")
        o.method = SolverMethod::SparseLU;
    else if (name == "iterative")
        o.method = SolverMethod::Iterative;
    else if (name == "power")
        o.method = SolverMethod::Power;
    return o;
}

// Data sink: --out file or standard output.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw ValidationError("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_distribution(std::ostream& os, const Distribution& d, const std::string& header)
{
    os.precision(17);
    os << header << '\n';
    for (std::size_t i = 0; i < d.size(); ++i)
        os << i + 1 << ',' << d.labels()[i] << ',' << d[i] << '\n';
}

std::string list_nodes(const std::vector<std::size_t>& nodes, const ConfigSet& cs)
{
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < nodes.size(); ++i)
        os << (i ? "," : "") << cs.labels()[nodes[i]];
    os << '}';
    return os.str();
}

int run_check(const Common& c)
{
    const DynamicGraph g = load(c.source);
    const auto tc = t_connectivity(g.configs);
    std::cerr << "model ok: " << g.num_nodes() << " nodes, " << g.configs.num_configs() << " configurations, "
              << g.env.num_states() << " environment states\n";
    const auto parts = connected_components(g.configs);
    std::size_t disconnected = 0;
    for (std::size_t k = 0; k < g.configs.num_configs(); ++k)
        disconnected += parts.num_components(k) > 1;
    std::cerr << disconnected << " configuration(s) are disconnected\n";
    try {
        stationary_states(g.env);
        std::cerr << "environment irreducible\n";
    } catch (const ReducibleChainError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    if (!tc.connected) {
        std::vector<std::size_t> isolated, cut_off;
        for (std::size_t v = 0; v < g.num_nodes(); ++v)
            if (tc.union_adjacency.row(static_cast<Eigen::Index>(v)).sum() == 0)
                isolated.push_back(v);
        for (std::size_t c = 1; c < tc.union_components.size(); ++c)
            cut_off.insert(cut_off.end(), tc.union_components[c].begin(), tc.union_components[c].end());
        std::sort(cut_off.begin(), cut_off.end());
        std::cerr << "not T-connected: union graph has " << tc.union_components.size() << " components:";
        for (const auto& comp : tc.union_components)
            std::cerr << ' ' << list_nodes(comp, g.configs);
        std::cerr << "\nnodes cut off from node " << g.configs.labels()[0] << ": " << list_nodes(cut_off, g.configs)
                  << '\n';
        if (!isolated.empty())
            std::cerr << "isolated in every configuration: " << list_nodes(isolated, g.configs) << '\n';
        return 1;
    }
    std::cerr << "T-connected\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Continuous-time random walks on dynamic graphs"};
    app.require_subcommand(1);

    Common c;
    double gamma = 1.0;
    std::vector<double> gammas;
    std::vector<double> gamma_log;
    std::size_t threads = 0;
    double beta_max = 0.0;
    double horizon = 1e5;
    std::uint64_t seed = 1;
    std::size_t reps = 1;
    std::string holding = "exponential";
    std::string engine = "auto";
    double speed = 1.0;
    std::size_t u1 = 1, u2 = 2;
    std::string preset_name;

    auto* solve = app.add_subcommand("solve", "Exact stationary law at one walker rate (CSV)");
    add_model_options(solve, c);
    add_walker_options(solve, c);
    add_output_option(solve, c);
    add_solver_option(solve, c);
    solve->add_option("--gamma", gamma, "Walker rate")->required();

    auto* sweep = app.add_subcommand("sweep", "Exact stationary law over a range of walker rates (CSV)");
    add_model_options(sweep, c);
    add_walker_options(sweep, c);
    add_output_option(sweep, c);
    add_solver_option(sweep, c);
    auto* glist = sweep->add_option("--gamma", gammas, "Walker rates");
    auto* glog = sweep->add_option("--gamma-log", gamma_log, "a b n: n log-spaced rates from 10^a to 10^b")
                     ->expected(3);
    glist->excludes(glog);
    sweep->add_option("--threads", threads, "Worker threads (default: DYNWALK_THREADS or hardware)");

    auto* fast = app.add_subcommand("fast", "Fast-walker limit");
    add_model_options(fast, c);
    add_walker_options(fast, c);
    add_output_option(fast, c);

    auto* slow = app.add_subcommand("slow", "Slow-walker limit");
    add_model_options(slow, c);
    add_walker_options(slow, c);
    add_output_option(slow, c);
    slow->add_option("--beta-max", beta_max, "Lazification bound (default 2 x max beta)");

    auto* fixed = app.add_subcommand("fixed-point", "Rate-independent stationary law, if one exists");
    add_model_options(fixed, c);
    add_walker_options(fixed, c);
    add_output_option(fixed, c);

    auto* sim = app.add_subcommand("simulate", "Monte-Carlo occupancy (CSV)");
    add_model_options(sim, c);
    add_walker_options(sim, c);
    add_output_option(sim, c);
    sim->add_option("--gamma", gamma, "Walker rate")->required();
    sim->add_option("--horizon", horizon, "Simulated time");
    sim->add_option("--seed", seed, "Random seed");
    sim->add_option("--reps", reps, "Replications (horizon is split across them)");
    sim->add_option("--holding", holding, "exponential | pareto:<index> | deterministic");
    sim->add_option("--engine", engine, "auto | event | edge-lazy")
        ->check(CLI::IsMember({"auto", "event", "edge-lazy"}));
    sim->add_option("--speedup", speed, "Scale environment holding times by this factor");
    sim->add_option("--threads", threads, "Worker threads");

    auto* couple = app.add_subcommand("couple", "Meeting time of two walkers (CSV)");
    add_model_options(couple, c);
    add_walker_options(couple, c);
    add_output_option(couple, c);
    couple->add_option("--gamma", gamma, "Walker rate");
    couple->add_option("--u1", u1, "Start node of walker 1 (1-based)");
    couple->add_option("--u2", u2, "Start node of walker 2 (1-based)");
    couple->add_option("--reps", reps, "Replications")->default_val(200);
    couple->add_option("--horizon", horizon, "Censoring horizon")->default_val(1e4);
    couple->add_option("--seed", seed, "Random seed");
    couple->add_option("--threads", threads, "Worker threads");

    auto* expand = app.add_subcommand("expand-edge-markov", "Expand an edge-Markovian model into explicit form (JSON)");
    add_model_options(expand, c);
    add_output_option(expand, c);

    auto* check = app.add_subcommand("check", "Validate a model and report T-connectivity");
    add_model_options(check, c);

    auto* emit = app.add_subcommand("preset", "Emit a bundled model file (JSON)");
    emit->add_option("name", preset_name, "star-circle, k3, kite or bus")->required();
    add_output_option(emit, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*check)
            return run_check(c);

        if (*emit) {
            Sink sink(c.out);
            sink.stream() << preset_json(preset_name).dump(2) << '\n';
            return 0;
        }

        const DynamicGraph g = load(c.source);
        Sink sink(c.out);
        std::ostream& os = sink.stream();

        if (*expand) {
            if (!g.edge_source)
                throw ValidationError("expand-edge-markov needs an edge_markov model");
            os << model_to_json(g, true).dump() << '\n';
            std::cerr << "expanded into " << g.configs.num_configs() << " configurations\n";
            return 0;
        }

        if (*solve || *sweep) {
            std::vector<double> list;
            if (*solve) {
                list = {gamma};
            } else if (!gamma_log.empty()) {
                if (gamma_log[2] < 1 || gamma_log[2] != static_cast<double>(static_cast<std::size_t>(gamma_log[2])))
                    throw ValidationError("--gamma-log point count must be a positive integer");
                list = log_spaced(gamma_log[0], gamma_log[1], static_cast<std::size_t>(gamma_log[2]));
            } else {
                list = gammas;
            }
            if (list.empty())
                throw ValidationError("sweep needs --gamma or --gamma-log");
            SweepOptions opts;
            opts.solver = solver_for(c.solver);
            opts.threads = threads;
            const auto result = gamma_sweep(g.configs, g.env, walker_for(g, c.beta, list.front()), list, opts);
            write_sweep_csv(os, result);
            return 0;
        }

        const WalkerSpec w = walker_for(g, c.beta, gamma);

        if (*fast) {
            const auto r = fast_walker_general(g.configs, g.env, w.beta);
            write_distribution(os, r.walker, "node,label,probability");
            std::cerr << "component chain: " << r.chain.states.size() << " states\n";
            return 0;
        }
        if (*slow) {
            const auto r = slow_walker(g.configs, g.env, w.beta, beta_max);
            write_distribution(os, r.walker, "node,label,probability");
            std::cerr << "beta_max = " << r.chain.beta_max << '\n';
            return 0;
        }
        if (*fixed) {
            const auto r = check_fixed_point(g.configs, w.beta);
            if (!r) {
                os << "none\n";
                std::cerr << "no common fixed point: the stationary law depends on the walker rate\n";
                return 0;
            }
            write_distribution(os, *r, "node,label,probability");
            return 0;
        }
        if (*sim) {
            std::optional<std::vector<HoldingDistribution>> holdings;
            if (holding.rfind("pareto:", 0) == 0) {
                holdings = pareto_holdings(g.env, std::stod(holding.substr(7)));
            } else if (holding == "deterministic") {
                holdings.emplace();
                for (std::size_t s = 0; s < g.env.num_states(); ++s)
                    holdings->push_back(HoldingDistribution::deterministic(1.0 / g.env.exit_rate(s)));
            } else if (holding != "exponential") {
                throw ValidationError("unknown --holding " + holding);
            }
            DynamicGraph model = g;
            if (speed != 1.0) {
                if (holdings)
                    holdings = speedup(*holdings, speed);
                else
                    model.env = speedup(model.env, speed);
                if (model.edge_source)
                    for (auto& e : model.edge_source->edges) {
                        e.rate_on /= speed;
                        e.rate_off /= speed;
                    }
            }
            SimOptions opts;
            opts.horizon = horizon;
            opts.seed = seed;
            opts.replications = reps;
            opts.threads = threads;
            opts.engine = engine == "event" ? SimEngine::EventDriven
                          : engine == "edge-lazy" ? SimEngine::EdgeLazy
                                                  : SimEngine::Auto;
            const auto r = simulate(model, w, opts, holdings ? &*holdings : nullptr);
            write_occupancy_csv(os, r, gamma);
            return 0;
        }
        if (*couple) {
            if (u1 == 0 || u2 == 0)
                throw ValidationError("--u1/--u2 are 1-based");
            CouplingOptions opts;
            opts.seed = seed;
            opts.replications = reps;
            opts.horizon = horizon;
            opts.threads = threads;
            const auto r = coupling_time(g, w, u1 - 1, u2 - 1, opts);
            if (r.warning)
                std::cerr << "warning: " << *r.warning << '\n';
            write_coupling_csv(os, r);
            std::cerr << "censored runs: " << r.censored << " of " << r.times.size() << '\n';
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
