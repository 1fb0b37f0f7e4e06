#include "dynwalk/exact.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "dynwalk/asymptotic.hpp"
#include "dynwalk/parallel.hpp"

namespace dynwalk {

JointGenerator joint_generator(const ConfigSet& cs, const EnvironmentSpec& env, const WalkerSpec& w)
{
    w.validate(cs);
    if (env.num_configs() != cs.num_configs())
        throw ValidationError("joint generator: environment labels " + std::to_string(env.num_configs())
                              + " configurations, config set has " + std::to_string(cs.num_configs()));

    JointGenerator g;
    g.num_states = env.num_states();
    g.num_nodes = cs.num_nodes();
    g.num_configs = cs.num_configs();
    g.config_of_state = env.config_of_state();
    g.node_labels = cs.labels();

    const std::size_t n = g.num_nodes;
    const std::size_t total = g.num_states * n;
    const auto& r = env.generator();

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(r.nonZeros()) * n + total * 4);
    for (std::size_t s = 0; s < g.num_states; ++s) {
        const std::size_t k = env.config_of(s);
        for (std::size_t u = 0; u < n; ++u) {
            const std::size_t row = g.index(s, u);
            double out = 0.0;
            for (SparseRows::InnerIterator it(r, static_cast<Eigen::Index>(s)); it; ++it) {
                if (static_cast<std::size_t>(it.col()) == s)
                    continue;
                trips.emplace_back(row, g.index(static_cast<std::size_t>(it.col()), u), it.value());
                out += it.value();
            }
            const std::size_t d = cs.degree(k, u);
            const double b = w.beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(u));
            if (d > 0 && b > 0.0) {
                const double step = w.gamma * b / static_cast<double>(d);
                for (auto v : cs.neighbors(k, u)) {
                    trips.emplace_back(row, g.index(s, v), step);
                    out += step;
                }
            }
            trips.emplace_back(row, row, -out);
        }
    }
    g.q.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
    g.q.setFromTriplets(trips.begin(), trips.end());
    g.q.makeCompressed();
    return g;
}

JointStationary stationary_joint(const JointGenerator& g, const SolverOptions& opts)
{
    Eigen::VectorXd pi = stationary_ctmc(g.q, opts);
    Eigen::VectorXd walker = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_nodes));
    Eigen::VectorXd configs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_configs));
    for (std::size_t s = 0; s < g.num_states; ++s)
        for (std::size_t v = 0; v < g.num_nodes; ++v) {
            const double p = pi[static_cast<Eigen::Index>(g.index(s, v))];
            walker[static_cast<Eigen::Index>(v)] += p;
            configs[static_cast<Eigen::Index>(g.config_of_state[s])] += p;
        }
    return {std::move(pi), Distribution(g.node_labels, walker),
            Distribution(index_labels(g.num_configs, "config_"), configs)};
}

JointStationary solve_exact(const ConfigSet& cs, const EnvironmentSpec& env, const WalkerSpec& w,
                            const SolverOptions& opts)
{
    return stationary_joint(joint_generator(cs, env, w), opts);
}

std::vector<double> log_spaced(double lo_exp, double hi_exp, std::size_t n)
{
    if (n == 0)
        throw ValidationError("log_spaced: need at least one point");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = std::pow(10.0, lo_exp + t * (hi_exp - lo_exp));
    }
    return out;
}

SweepResult gamma_sweep(const ConfigSet& cs, const EnvironmentSpec& env, const WalkerSpec& base,
                        const std::vector<double>& gammas, const SweepOptions& opts)
{
    if (gammas.empty())
        throw ValidationError("gamma sweep: empty gamma list");
    for (double g : gammas)
        if (!(g > 0.0) || !std::isfinite(g))
            throw ValidationError("gamma sweep: every gamma must be positive and finite");
    base.validate(cs);

    SweepResult result;
    result.node_labels = cs.labels();
    result.num_configs = cs.num_configs();
    result.fast_prediction = fast_walker_general(cs, env, base.beta, opts.solver).walker.values();
    result.slow_prediction = slow_walker(cs, env, base.beta, 0.0, opts.solver).walker.values();
    result.rows.resize(gammas.size());

    const std::size_t workers = opts.threads ? opts.threads : worker_count();
    parallel_for(gammas.size(), workers, [&](std::size_t i) {
        const auto sol = solve_exact(cs, env, base.with_gamma(gammas[i]), opts.solver);
        SweepRow& row = result.rows[i];
        row.gamma = gammas[i];
        row.walker = sol.walker.values();
        row.configs = sol.configs.values();
        row.tv_fast = total_variation(row.walker, result.fast_prediction);
        row.tv_slow = total_variation(row.walker, result.slow_prediction);
    });
    return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result)
{
    os << "gamma";
    for (std::size_t v = 0; v < result.node_labels.size(); ++v)
        os << ",node_" << v + 1;
    for (std::size_t k = 0; k < result.num_configs; ++k)
        os << ",config_" << k + 1;
    os << ",tv_fast,tv_slow\n";

    const auto old_precision = os.precision(17);
    for (const auto& row : result.rows) {
        os << row.gamma;
        for (Eigen::Index v = 0; v < row.walker.size(); ++v)
            os << ',' << row.walker[v];
        for (Eigen::Index k = 0; k < row.configs.size(); ++k)
            os << ',' << row.configs[k];
        os << ',' << row.tv_fast << ',' << row.tv_slow << '\n';
    }
    os.precision(old_precision);
}

}  // namespace dynwalk
