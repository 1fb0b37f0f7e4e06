#include "dynwalk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dynwalk/parallel.hpp"

namespace dynwalk {

HoldingDistribution HoldingDistribution::exponential(double rate)
{
    HoldingDistribution h;
    h.kind = Kind::Exponential;
    h.rate = rate;
    h.validate();
    return h;
}

HoldingDistribution HoldingDistribution::deterministic(double value)
{
    HoldingDistribution h;
    h.kind = Kind::Deterministic;
    h.value = value;
    h.validate();
    return h;
}

HoldingDistribution HoldingDistribution::pareto(double scale, double index)
{
    HoldingDistribution h;
    h.kind = Kind::Pareto;
    h.scale = scale;
    h.index = index;
    h.validate();
    return h;
}

void HoldingDistribution::validate() const
{
    switch (kind) {
    case Kind::Exponential:
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw ValidationError("holding: exponential rate must be positive");
        break;
    case Kind::Deterministic:
        if (!(value > 0.0) || !std::isfinite(value))
            throw ValidationError("holding: deterministic value must be positive");
        break;
    case Kind::Pareto:
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw ValidationError("holding: Pareto scale must be positive");
        if (!(index > 1.0) || !std::isfinite(index))
            throw ValidationError("holding: Pareto index must exceed 1 for a finite mean");
        break;
    }
}

double HoldingDistribution::mean() const
{
    switch (kind) {
    case Kind::Exponential:
        return 1.0 / rate;
    case Kind::Deterministic:
        return value;
    case Kind::Pareto:
        return scale * index / (index - 1.0);
    }
    return 0.0;
}

double HoldingDistribution::sample(RandomStream& rng) const
{
    switch (kind) {
    case Kind::Exponential:
        return rng.exponential(rate);
    case Kind::Deterministic:
        return value;
    case Kind::Pareto:
        return scale * std::pow(rng.uniform(), -1.0 / index);
    }
    return 0.0;
}

HoldingDistribution HoldingDistribution::scaled(double a) const
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw ValidationError("speedup: factor must be positive");
    HoldingDistribution h = *this;
    h.rate /= a;
    h.value *= a;
    h.scale *= a;
    return h;
}

std::vector<HoldingDistribution> exponential_holdings(const EnvironmentSpec& env)
{
    std::vector<HoldingDistribution> out;
    for (std::size_t s = 0; s < env.num_states(); ++s)
        out.push_back(HoldingDistribution::exponential(env.exit_rate(s)));
    return out;
}

std::vector<HoldingDistribution> pareto_holdings(const EnvironmentSpec& env, double index)
{
    std::vector<HoldingDistribution> out;
    for (std::size_t s = 0; s < env.num_states(); ++s) {
        const double mean = 1.0 / env.exit_rate(s);
        out.push_back(HoldingDistribution::pareto(mean * (index - 1.0) / index, index));
    }
    return out;
}

EnvironmentSpec speedup(const EnvironmentSpec& env, double a)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw ValidationError("speedup: factor must be positive");
    return env.scaled(1.0 / a);
}

std::vector<HoldingDistribution> speedup(const std::vector<HoldingDistribution>& holdings, double a)
{
    std::vector<HoldingDistribution> out;
    out.reserve(holdings.size());
    for (const auto& h : holdings)
        out.push_back(h.scaled(a));
    return out;
}

const char* engine_name(SimEngine e)
{
    switch (e) {
    case SimEngine::Auto:
        return "auto";
    case SimEngine::EventDriven:
        return "event";
    case SimEngine::EdgeLazy:
        return "edge-lazy";
    }
    return "?";
}

namespace {

constexpr double never = std::numeric_limits<double>::infinity();

// Jump chain in CSR form with cumulative probabilities per row.
struct JumpTable {
    std::vector<std::size_t> row;
    std::vector<std::size_t> target;
    std::vector<double> cumulative;

    explicit JumpTable(const EnvironmentSpec& env)
    {
        row.assign(env.num_states() + 1, 0);
        const auto& q = env.generator();
        for (std::size_t s = 0; s < env.num_states(); ++s) {
            double acc = 0.0;
            for (SparseRows::InnerIterator it(q, static_cast<Eigen::Index>(s)); it; ++it) {
                if (static_cast<std::size_t>(it.col()) == s)
                    continue;
                acc += it.value() / env.exit_rate(s);
                target.push_back(static_cast<std::size_t>(it.col()));
                cumulative.push_back(acc);
            }
            row[s + 1] = target.size();
        }
    }

    std::size_t next(std::size_t s, RandomStream& rng) const
    {
        const auto first = cumulative.begin() + static_cast<std::ptrdiff_t>(row[s]);
        const auto last = cumulative.begin() + static_cast<std::ptrdiff_t>(row[s + 1]);
        const double u = rng.uniform() * *(last - 1);
        auto it = std::upper_bound(first, last, u);
        if (it == last)
            --it;
        return target[static_cast<std::size_t>(it - cumulative.begin())];
    }
};

std::size_t sample_index(const Eigen::VectorXd& probs, RandomStream& rng)
{
    double u = rng.uniform() * probs.sum();
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        u -= probs[i];
        if (u <= 0.0)
            return static_cast<std::size_t>(i);
    }
    return static_cast<std::size_t>(probs.size() - 1);
}

// Time-weighted occupancy split into equal-length batches.
struct Accumulator {
    std::size_t n, m, batches;
    double batch_len;
    std::vector<double> node;    // batches x n
    std::vector<double> config;  // batches x m
    std::uint64_t steps = 0, env_events = 0;

    Accumulator(std::size_t n_, std::size_t m_, std::size_t batches_, double horizon)
        : n(n_), m(m_), batches(batches_), batch_len(horizon / static_cast<double>(batches_)),
          node(batches_ * n_, 0.0), config(batches_ * m_, 0.0)
    {
    }

    std::size_t batch_of(double t) const
    {
        return std::min(batches - 1, static_cast<std::size_t>(t / batch_len));
    }

    void add_node(std::size_t v, double t0, double t1)
    {
        while (t1 > t0) {
            const std::size_t b = batch_of(t0);
            const double end = b + 1 == batches ? t1 : std::min(t1, static_cast<double>(b + 1) * batch_len);
            node[b * n + v] += end - t0;
            t0 = end;
        }
    }

    void add_config(std::size_t k, double t0, double t1)
    {
        while (t1 > t0) {
            const std::size_t b = batch_of(t0);
            const double end = b + 1 == batches ? t1 : std::min(t1, static_cast<double>(b + 1) * batch_len);
            config[b * m + k] += end - t0;
            t0 = end;
        }
    }

    void add_config_sample(std::size_t k, double t) { config[batch_of(t) * m + k] += 1.0; }
};

Accumulator run_event_driven(const DynamicGraph& model, const WalkerSpec& w, const JumpTable& jumps,
                             const std::vector<HoldingDistribution>& holdings, const Eigen::VectorXd& start,
                             double horizon, std::size_t batches, std::uint64_t seed, std::size_t rep)
{
    const ConfigSet& cs = model.configs;
    const EnvironmentSpec& env = model.env;
    Accumulator acc(cs.num_nodes(), cs.num_configs(), batches, horizon);
    RandomStream env_rng(seed, rep, Stream::Environment);
    RandomStream walk_rng(seed, rep, Stream::Walker);

    std::size_t s = sample_index(start, env_rng);
    std::size_t k = env.config_of(s);
    std::size_t v = walk_rng.index(cs.num_nodes());
    const bool jumps_possible = env.num_states() > 1;

    auto walker_rate = [&] {
        return cs.degree(k, v) == 0 ? 0.0
                                    : w.gamma * w.beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v));
    };
    auto next_step = [&](double now) {
        const double r = walker_rate();
        return r > 0.0 ? now + walk_rng.exponential(r) : never;
    };

    double t = 0.0;
    double t_env = jumps_possible ? holdings[s].sample(env_rng) : never;
    double t_walk = next_step(0.0);
    while (true) {
        const double t_next = std::min({t_env, t_walk, horizon});
        acc.add_node(v, t, t_next);
        acc.add_config(k, t, t_next);
        t = t_next;
        if (t >= horizon)
            break;
        if (t_walk <= t_env) {
            const auto nbrs = cs.neighbors(k, v);
            v = nbrs[walk_rng.index(nbrs.size())];
            ++acc.steps;
        } else {
            s = jumps.next(s, env_rng);
            k = env.config_of(s);
            t_env = t + holdings[s].sample(env_rng);
            ++acc.env_events;
        }
        // Exponential clocks are memoryless, so redrawing after any event is exact.
        t_walk = next_step(t);
    }
    return acc;
}

Accumulator run_edge_lazy(const DynamicGraph& model, const WalkerSpec& w, double horizon, std::size_t batches,
                          std::uint64_t seed, std::size_t rep)
{
    const ConfigSet& cs = model.configs;
    const EdgeMarkovSpec& spec = *model.edge_source;
    Accumulator acc(cs.num_nodes(), cs.num_configs(), batches, horizon);
    RandomStream env_rng(seed, rep, Stream::Environment);
    RandomStream walk_rng(seed, rep, Stream::Walker);

    const std::size_t ne = spec.edges.size();
    std::vector<double> q(ne), total_rate(ne), seen_at(ne, 0.0);
    std::vector<char> on(ne);
    std::size_t k = 0;
    for (std::size_t i = 0; i < ne; ++i) {
        q[i] = spec.edges[i].on_fraction();
        total_rate[i] = spec.edges[i].rate_on + spec.edges[i].rate_off;
        on[i] = env_rng.uniform() < q[i];
        if (on[i])
            k |= std::size_t{1} << i;
    }
    std::size_t v = walk_rng.index(cs.num_nodes());

    // Proposals at the largest possible walker rate; the configuration is
    // observed at each proposal and the step kept with probability
    // beta_{k,v} / beta_max.
    const double top = w.max_beta();
    const double proposal_rate = top > 0.0 ? w.gamma * top : 1.0;
    double t = 0.0;
    while (true) {
        const double t_next = t + walk_rng.exponential(proposal_rate);
        acc.add_node(v, t, std::min(t_next, horizon));
        if (t_next >= horizon)
            break;
        t = t_next;

        k = 0;
        for (std::size_t i = 0; i < ne; ++i) {
            const double decay = std::exp(-total_rate[i] * (t - seen_at[i]));
            const double p_on = q[i] + ((on[i] ? 1.0 : 0.0) - q[i]) * decay;
            on[i] = env_rng.uniform() < p_on;
            seen_at[i] = t;
            if (on[i])
                k |= std::size_t{1} << i;
        }
        acc.add_config_sample(k, t);
        ++acc.env_events;

        if (top > 0.0 && cs.degree(k, v) > 0
            && walk_rng.uniform() * top < w.beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v))) {
            const auto nbrs = cs.neighbors(k, v);
            v = nbrs[walk_rng.index(nbrs.size())];
            ++acc.steps;
        }
    }
    return acc;
}

}  // namespace

SimResult simulate(const DynamicGraph& model, const WalkerSpec& w, const SimOptions& opts,
                   const std::vector<HoldingDistribution>* holdings)
{
    model.check_consistent();
    w.validate(model.configs);
    if (!(opts.horizon > 0.0) || !std::isfinite(opts.horizon))
        throw ValidationError("simulate: horizon must be positive and finite");
    if (opts.replications == 0 || opts.batches == 0)
        throw ValidationError("simulate: need at least one replication and one batch");
    if (holdings) {
        if (holdings->size() != model.env.num_states())
            throw ValidationError("simulate: need one holding distribution per environment state");
        for (const auto& h : *holdings)
            h.validate();
    }

    SimEngine engine = opts.engine;
    if (engine == SimEngine::Auto)
        engine = (model.edge_source && !holdings) ? SimEngine::EdgeLazy : SimEngine::EventDriven;
    if (engine == SimEngine::EdgeLazy && (!model.edge_source || holdings))
        throw ValidationError("simulate: the edge-lazy engine needs an edge-Markovian model with exponential holdings");

    const std::size_t reps = opts.replications;
    const double rep_horizon = opts.horizon / static_cast<double>(reps);
    const std::size_t n = model.configs.num_nodes();
    const std::size_t m = model.configs.num_configs();

    std::optional<JumpTable> jumps;
    std::vector<HoldingDistribution> own_holdings;
    Eigen::VectorXd start;
    if (engine == SimEngine::EventDriven) {
        jumps.emplace(model.env);
        if (!holdings) {
            // A single state never jumps and needs no holding law.
            if (model.env.num_states() > 1)
                own_holdings = exponential_holdings(model.env);
            holdings = &own_holdings;
        }
        start = stationary_states(model.env);
    }

    std::vector<std::optional<Accumulator>> runs(reps);
    parallel_for(reps, opts.threads ? opts.threads : worker_count(), [&](std::size_t r) {
        if (engine == SimEngine::EventDriven)
            runs[r].emplace(run_event_driven(model, w, *jumps, *holdings, start, rep_horizon, opts.batches,
                                             opts.seed, r));
        else
            runs[r].emplace(run_edge_lazy(model, w, rep_horizon, opts.batches, opts.seed, r));
    });

    Eigen::VectorXd node = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd config = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    Eigen::VectorXd batch_sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd batch_sq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    SimResult result;
    for (const auto& run : runs) {
        for (std::size_t b = 0; b < run->batches; ++b) {
            for (std::size_t v = 0; v < n; ++v) {
                const double x = run->node[b * n + v];
                node[static_cast<Eigen::Index>(v)] += x;
                const double frac = x / run->batch_len;
                batch_sum[static_cast<Eigen::Index>(v)] += frac;
                batch_sq[static_cast<Eigen::Index>(v)] += frac * frac;
            }
            for (std::size_t k = 0; k < m; ++k)
                config[static_cast<Eigen::Index>(k)] += run->config[b * m + k];
        }
        result.walker_steps += run->steps;
        result.environment_events += run->env_events;
    }

    const double nb = static_cast<double>(reps * opts.batches);
    result.node_stderr.resize(static_cast<Eigen::Index>(n));
    for (Eigen::Index v = 0; v < static_cast<Eigen::Index>(n); ++v) {
        const double mean = batch_sum[v] / nb;
        const double var = nb > 1 ? std::max(0.0, (batch_sq[v] - nb * mean * mean) / (nb - 1.0)) : 0.0;
        result.node_stderr[v] = std::sqrt(var / nb);
    }
    result.node_occupancy = Distribution(model.configs.labels(), node / node.sum(), 1e-12);
    if (config.sum() > 0.0)
        result.config_occupancy = Distribution(index_labels(m, "config_"), config / config.sum(), 1e-12);
    result.total_time = opts.horizon;
    result.seed = opts.seed;
    result.engine = engine;
    return result;
}

CouplingResult coupling_time(const DynamicGraph& model, const WalkerSpec& w, std::size_t u1, std::size_t u2,
                             const CouplingOptions& opts, const std::vector<HoldingDistribution>* holdings)
{
    model.check_consistent();
    w.validate(model.configs);
    const ConfigSet& cs = model.configs;
    const EnvironmentSpec& env = model.env;
    if (u1 >= cs.num_nodes() || u2 >= cs.num_nodes())
        throw ValidationError("coupling_time: start node out of range");
    if (!(opts.horizon > 0.0) || !std::isfinite(opts.horizon) || opts.replications == 0)
        throw ValidationError("coupling_time: need a positive finite horizon and at least one replication");
    if (holdings && holdings->size() != env.num_states())
        throw ValidationError("coupling_time: need one holding distribution per environment state");

    CouplingResult result;
    result.seed = opts.seed;
    const auto tc = t_connectivity(cs);
    if (!tc.connected)
        result.warning = "model is not T-connected; meeting times may be infinite and runs are censored at the horizon";

    std::vector<HoldingDistribution> own;
    if (!holdings) {
        if (env.num_states() > 1)
            own = exponential_holdings(env);
        holdings = &own;
    }
    const JumpTable jumps(env);
    const Eigen::VectorXd start = stationary_states(env);
    const bool jumps_possible = env.num_states() > 1;

    result.times.assign(opts.replications, 0.0);
    parallel_for(opts.replications, opts.threads ? opts.threads : worker_count(), [&](std::size_t r) {
        if (u1 == u2) {
            result.times[r] = 0.0;
            return;
        }
        RandomStream env_rng(opts.seed, r, Stream::Environment);
        RandomStream rng_a(opts.seed, r, Stream::Walker);
        RandomStream rng_b(opts.seed, r, Stream::SecondWalker);

        std::size_t s = sample_index(start, env_rng);
        std::size_t k = env.config_of(s);
        std::size_t a = u1, b = u2;
        auto clock = [&](std::size_t v, RandomStream& rng, double now) {
            if (cs.degree(k, v) == 0)
                return never;
            const double rate = w.gamma * w.beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v));
            return rate > 0.0 ? now + rng.exponential(rate) : never;
        };

        double t = 0.0;
        double t_env = jumps_possible ? (*holdings)[s].sample(env_rng) : never;
        double t_a = clock(a, rng_a, 0.0), t_b = clock(b, rng_b, 0.0);
        double met = never;
        while (true) {
            t = std::min({t_env, t_a, t_b});
            if (t >= opts.horizon)
                break;
            if (t == t_a) {
                const auto nbrs = cs.neighbors(k, a);
                a = nbrs[rng_a.index(nbrs.size())];
                t_a = clock(a, rng_a, t);
            } else if (t == t_b) {
                const auto nbrs = cs.neighbors(k, b);
                b = nbrs[rng_b.index(nbrs.size())];
                t_b = clock(b, rng_b, t);
            } else {
                s = jumps.next(s, env_rng);
                k = env.config_of(s);
                t_env = t + (*holdings)[s].sample(env_rng);
                t_a = clock(a, rng_a, t);
                t_b = clock(b, rng_b, t);
            }
            if (a == b) {
                met = t;
                break;
            }
        }
        result.times[r] = met;
    });

    std::vector<double> finite;
    for (double x : result.times) {
        if (std::isfinite(x))
            finite.push_back(x);
        else
            ++result.censored;
    }
    if (!finite.empty()) {
        const double nf = static_cast<double>(finite.size());
        result.mean = std::accumulate(finite.begin(), finite.end(), 0.0) / nf;
        double sq = 0.0;
        for (double x : finite)
            sq += (x - result.mean) * (x - result.mean);
        result.stderr_mean = finite.size() > 1 ? std::sqrt(sq / (nf - 1.0) / nf) : 0.0;
        std::sort(finite.begin(), finite.end());
        const std::size_t h = finite.size() / 2;
        result.median = finite.size() % 2 ? finite[h] : 0.5 * (finite[h - 1] + finite[h]);
        result.max = finite.back();
    }
    return result;
}

void write_occupancy_csv(std::ostream& os, const SimResult& r, double gamma)
{
    const auto old = os.precision(17);
    os << "# seed=" << r.seed << " horizon=" << r.total_time << " gamma=" << gamma << " engine=" << engine_name(r.engine)
       << " walker_steps=" << r.walker_steps << " environment_events=" << r.environment_events << '\n';
    os << "kind,index,label,fraction,stderr\n";
    for (std::size_t v = 0; v < r.node_occupancy.size(); ++v)
        os << "node," << v + 1 << ',' << r.node_occupancy.labels()[v] << ',' << r.node_occupancy[v] << ','
           << r.node_stderr[static_cast<Eigen::Index>(v)] << '\n';
    for (std::size_t k = 0; k < r.config_occupancy.size(); ++k)
        os << "config," << k + 1 << ',' << r.config_occupancy.labels()[k] << ',' << r.config_occupancy[k] << ",\n";
    os.precision(old);
}

void write_coupling_csv(std::ostream& os, const CouplingResult& r)
{
    const auto old = os.precision(17);
    os << "# seed=" << r.seed << " replications=" << r.times.size() << " censored=" << r.censored
       << " mean=" << r.mean << " median=" << r.median << " max=" << r.max << '\n';
    os << "replication,meeting_time,censored\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        const bool c = !std::isfinite(r.times[i]);
        os << i + 1 << ',' << (c ? std::string("inf") : [&] {
            std::ostringstream s;
            s.precision(17);
            s << r.times[i];
            return s.str();
        }()) << ',' << (c ? 1 : 0) << '\n';
    }
    os.precision(old);
}

}  // namespace dynwalk
