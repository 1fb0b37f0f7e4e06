// Acceptance suite: one PASS/FAIL line per criterion.
//
//   dynwalk_acceptance          run all ten
//   dynwalk_acceptance 3 7      run a subset
//
// Exit status is nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynwalk/dynwalk.hpp"
#include "support.hpp"

using namespace dynwalk;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records a failed check without stopping, so the line reports every miss.
    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [miss: " << what << "]";
        }
    }
};

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<void(Outcome&)> run;
};

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Eigen::VectorXd exact_walker(const DynamicGraph& g, const WalkerSpec& w)
{
    return solve_exact(g.configs, g.env, w).walker.values();
}

void k3_endpoints(Outcome& out)
{
    const auto g = preset("k3");
    const auto w = WalkerSpec::constant(g.configs);
    const auto lo = exact_walker(g, w.with_gamma(1e-4));
    const auto hi = exact_walker(g, w.with_gamma(1e4));
    const double rel = 100.0 * std::abs(hi[2] - lo[2]) / lo[2];
    const double tv_uniform = (lo.array() - 1.0 / 3).abs().maxCoeff();
    out.detail << "P[W=3]: " << fmt(lo[2]) << " at 1e-4, " << fmt(hi[2]) << " at 1e4, spread " << fmt(rel)
               << "%; slow endpoint tv to uniform " << fmt(tv_uniform);
    out.require(std::abs(rel - 7.0) <= 2.0, "endpoint spread " + fmt(rel) + "% outside 7% +- 2pp");
    out.require(tv_uniform <= 1e-3, "slow endpoint not uniform");

    // Context for the ledger: the largest spread anywhere on the sweep.
    double p_min = 1.0, p_max = 0.0;
    const auto sweep = gamma_sweep(g.configs, g.env, w, log_spaced(-4, 4, 33));
    for (const auto& row : sweep.rows) {
        p_min = std::min(p_min, row.walker[2]);
        p_max = std::max(p_max, row.walker[2]);
    }
    out.detail << "; max spread over the sweep " << fmt(100.0 * (p_max - p_min) / p_min) << "%";
}

void edge_markov_sigma_check(Outcome& out)
{
    std::mt19937_64 rng(2002);
    std::vector<EdgeMarkovSpec> specs{preset("k3").edge_source.value()};
    for (int i = 0; i < 20; ++i)
        specs.push_back(dwtest::random_edge_markov(rng, 4, 5));
    double worst = 0.0;
    for (const auto& spec : specs) {
        const auto em = expand_edge_markovian(spec);
        worst = std::max(worst, (stationary_sigma(em.env).values() - edge_markov_sigma(spec)).lpNorm<Eigen::Infinity>());
    }
    out.detail << specs.size() << " models, worst |sigma_product - sigma_balance| = " << fmt(worst);
    out.require(worst <= 1e-12, "sigma mismatch");
}

std::vector<DynamicGraph> connected_family(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<DynamicGraph> models{preset("star-circle")};
    for (int i = 0; i < 10; ++i)
        models.push_back(dwtest::random_connected_model(rng, 8, 4));
    return models;
}

std::vector<DynamicGraph> disconnected_family(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<DynamicGraph> models;
    for (int i = 0; i < 10; ++i)
        models.push_back(dwtest::random_disconnected_model(rng, 6, 4));
    return models;
}

void fast_connected(Outcome& out)
{
    // A model whose configurations share one stationary law sits at the
    // limit for every gamma; its tv is pure roundoff and cannot decrease.
    constexpr double converged = 1e-12;
    double worst = 0.0;
    int non_monotone = 0, already_there = 0;
    for (const auto& g : connected_family(3003)) {
        const auto w = WalkerSpec::constant(g.configs);
        const auto fast = fast_walker_connected(g.configs, g.env, w.beta).values();
        std::vector<double> tv;
        for (double gamma : {1e2, 1e4, 1e6})
            tv.push_back(total_variation(exact_walker(g, w.with_gamma(gamma)), fast));
        worst = std::max(worst, tv.back());
        if (tv[0] <= converged) {
            ++already_there;
            continue;
        }
        non_monotone += !(tv[0] > tv[1] && (tv[1] > tv[2] || tv[1] <= converged));
    }
    out.detail << "11 models, worst tv at 1e6 = " << fmt(worst) << ", non-decreasing sequences: " << non_monotone
               << " (" << already_there << " model(s) at the limit for every gamma)";
    out.require(worst <= 1e-3, "tv at 1e6 above 1e-3");
    out.require(non_monotone == 0, "tv not decreasing over 1e2, 1e4, 1e6");
}

void fast_disconnected(Outcome& out)
{
    double worst = 0.0;
    for (const auto& g : disconnected_family(4004)) {
        const auto w = WalkerSpec::constant(g.configs);
        const auto fast = fast_walker_general(g.configs, g.env, w.beta).walker.values();
        worst = std::max(worst, total_variation(exact_walker(g, w.with_gamma(1e6)), fast));
    }
    out.detail << "10 models with disconnected configurations, worst tv at 1e6 = " << fmt(worst);
    out.require(worst <= 1e-3, "tv at 1e6 above 1e-3");
}

void slow_limit(Outcome& out)
{
    auto models = connected_family(3003);
    for (auto& g : disconnected_family(4004))
        models.push_back(std::move(g));
    double worst = 0.0, worst_beta = 0.0;
    for (const auto& g : models) {
        const auto w = WalkerSpec::constant(g.configs);
        const auto s2 = slow_walker(g.configs, g.env, w.beta, 2.0 * w.max_beta()).walker.values();
        const auto s10 = slow_walker(g.configs, g.env, w.beta, 10.0 * w.max_beta()).walker.values();
        worst = std::max(worst, total_variation(exact_walker(g, w.with_gamma(1e-6)), s2));
        worst_beta = std::max(worst_beta, total_variation(s2, s10));
    }
    out.detail << models.size() << " models, worst tv at 1e-6 = " << fmt(worst)
               << ", worst beta_max sensitivity = " << fmt(worst_beta);
    out.require(worst <= 1e-3, "tv at 1e-6 above 1e-3");
    out.require(worst_beta <= 1e-12, "slow law depends on beta_max");
}

void time_scale_invariance(Outcome& out)
{
    std::mt19937_64 rng(6006);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const auto g = dwtest::random_t_connected_model(rng, 8, 4);
        const double n = static_cast<double>(g.num_nodes());
        for (double gamma : {1e-3, 1.0, 1e3}) {
            const auto pi = exact_walker(g, WalkerSpec::degree(g.configs, gamma));
            worst = std::max(worst, (pi.array() - 1.0 / n).abs().maxCoeff());
        }
    }
    out.detail << "degree walker: worst deviation " << fmt(worst);
    out.require(worst <= 1e-10, "degree walker not uniform");

    std::uniform_real_distribution<double> rate(0.2, 5.0);
    auto spec = preset("bus").bus_source.value();
    double worst_bus = 0.0;
    for (int draw = 0; draw < 5; ++draw) {
        for (auto& line : spec.lines) {
            for (auto& r : line.dwell_rates)
                r = rate(rng);
            for (auto& r : line.travel_rates)
                r = rate(rng);
        }
        const auto bus = make_dynamic_graph(spec, "bus");
        for (double gamma : {1e-3, 1.0, 1e3}) {
            const auto pi = exact_walker(bus, WalkerSpec::constant(bus.configs, gamma));
            worst_bus = std::max(worst_bus, (pi.array() - 0.25).abs().maxCoeff());
        }
    }
    out.detail << "; bus, 5 rate draws: worst deviation from 1/4 " << fmt(worst_bus);
    out.require(worst_bus <= 1e-10, "bus walker not uniform");
}

void fixed_point_detector(Outcome& out)
{
    std::mt19937_64 rng(7007);
    int regular_found = 0;
    for (int i = 0; i < 5; ++i) {
        const auto g = dwtest::random_clique_model(rng, 8, 4);
        const auto fp = check_fixed_point(g.configs, WalkerSpec::constant(g.configs).beta);
        const double n = static_cast<double>(g.num_nodes());
        regular_found += fp && (fp->values().array() - 1.0 / n).abs().maxCoeff() <= 1e-9;
    }

    // Each node's degree is either 0 or its own fixed d(v).
    using dwtest::add_edge;
    auto a = dwtest::empty_graph(4), b = a, c = a;
    add_edge(a, 0, 1);
    add_edge(a, 0, 2);
    add_edge(a, 2, 3);
    add_edge(b, 0, 3);
    add_edge(b, 0, 2);
    add_edge(b, 2, 1);
    add_edge(c, 0, 1);
    add_edge(c, 0, 3);
    auto d = dwtest::empty_graph(5), e = d;
    add_edge(d, 0, 1);
    add_edge(d, 2, 3);
    add_edge(e, 1, 2);
    add_edge(e, 3, 4);
    const std::vector<std::pair<ConfigSet, Eigen::VectorXd>> family{
        {validate_config_set({a, b, c}), Eigen::Vector4d(2, 1, 2, 1) / 6.0},
        {validate_config_set({d, e}), (Eigen::VectorXd(5) << 1, 1, 1, 1, 1).finished() / 5.0},
    };
    int family_found = 0;
    for (const auto& [cs, expected] : family) {
        const auto fp = check_fixed_point(cs, Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(cs.num_configs()),
                                                                     static_cast<Eigen::Index>(cs.num_nodes())));
        family_found += fp && total_variation(fp->values(), expected) <= 1e-9;
    }

    const auto sc = preset("star-circle");
    const bool star_none = !check_fixed_point(sc.configs, WalkerSpec::constant(sc.configs).beta);
    out.detail << "regular-component models " << regular_found << "/5, constant-degree models " << family_found
               << "/2, star-circle " << (star_none ? "none" : "found");
    out.require(regular_found == 5, "missed a uniform fixed point");
    out.require(family_found == 2, "missed a degree fixed point");
    out.require(star_none, "false fixed point on star-circle");
}

void monte_carlo(Outcome& out)
{
    double worst = 0.0;
    std::string worst_at;
    for (const auto& name : preset_names()) {
        const auto g = preset(name);
        for (double gamma : {0.1, 1.0, 10.0}) {
            const auto w = WalkerSpec::constant(g.configs, gamma);
            SimOptions o;
            o.horizon = 1e6;
            o.seed = 8008;
            const auto sim = simulate(g, w, o);
            const double tv = total_variation(sim.node_occupancy.values(), exact_walker(g, w));
            if (tv > worst) {
                worst = tv;
                worst_at = name + " at gamma " + fmt(gamma);
            }
        }
    }
    out.detail << "4 presets x 3 rates, worst tv " << fmt(worst) << " (" << worst_at << ")";
    out.require(worst <= 0.02, "simulation disagrees with exact solve");
}

void coupling(Outcome& out)
{
    const auto sc = preset("star-circle");
    CouplingOptions o;
    o.seed = 9009;
    const auto r = coupling_time(sc, WalkerSpec::constant(sc.configs), 1, 8, o);
    out.detail << "star-circle: " << r.times.size() << " runs, " << r.censored << " censored, mean T " << fmt(r.mean);
    out.require(r.times.size() == 200 && r.censored == 0, "censored runs on star-circle");

    const auto k2 = make_dynamic_graph(validate_config_set({{{0, 1}, {1, 0}}}), EnvironmentSpec(SparseRows(1, 1)), "K2");
    CouplingOptions ok2;
    ok2.seed = 9010;
    ok2.replications = 2000;
    const auto t = coupling_time(k2, WalkerSpec::constant(k2.configs), 0, 1, ok2);
    const double z = (t.mean - 0.5) / t.stderr_mean;
    out.detail << "; static K2 mean T " << fmt(t.mean) << " +- " << fmt(t.stderr_mean) << " (z = " << fmt(z) << ")";
    out.require(std::abs(z) <= 3.0, "K2 mean not within 3 standard errors of 1/2");
}

void figure_shape(Outcome& out)
{
    const auto g = preset("k3");
    const auto sweep = gamma_sweep(g.configs, g.env, WalkerSpec::constant(g.configs), log_spaced(-4, 4, 17));
    // Below 1 the slow prediction applies, above 1 the fast one; each must
    // shrink monotonically moving away from gamma = 1.
    int slow_breaks = 0, fast_breaks = 0;
    double fast_peak = 0.0, fast_peak_gamma = 0.0;
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
        const auto& prev = sweep.rows[i - 1];
        const auto& cur = sweep.rows[i];
        if (cur.gamma <= 1.0)
            slow_breaks += !(prev.tv_slow < cur.tv_slow);
        if (prev.gamma >= 1.0)
            fast_breaks += !(cur.tv_fast < prev.tv_fast);
        if (cur.gamma >= 1.0 && cur.tv_fast > fast_peak) {
            fast_peak = cur.tv_fast;
            fast_peak_gamma = cur.gamma;
        }
    }
    out.detail << "17 points over [1e-4, 1e4]: slow side breaks " << slow_breaks << ", fast side breaks "
               << fast_breaks << " (tv_fast peaks at " << fmt(fast_peak) << " near gamma " << fmt(fast_peak_gamma)
               << ")";
    out.require(slow_breaks == 0, "tv_slow not monotone below gamma 1");
    out.require(fast_breaks == 0, "tv_fast not monotone above gamma 1");
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {1, "K3 endpoint spread", 1.0, k3_endpoints},
        {2, "edge-Markovian sigma", 5.0, edge_markov_sigma_check},
        {3, "fast-limit convergence", 10.0, fast_connected},
        {4, "disconnected fast limit", 10.0, fast_disconnected},
        {5, "slow-limit convergence", 10.0, slow_limit},
        {6, "time-scale invariance", 10.0, time_scale_invariance},
        {7, "fixed-point detector", 1.0, fixed_point_detector},
        {8, "Monte-Carlo agreement", 60.0, monte_carlo},
        {9, "coupling finiteness", 30.0, coupling},
        {10, "figure shape", 10.0, figure_shape},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.push_back(std::stoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_s)
            out.require(false, "runtime over " + fmt(c.budget_s) + " s");
        failures += !out.pass;
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << ", " << fmt(secs)
                  << " s): " << out.detail.str() << std::endl;
    }
    return failures ? 1 : 0;
}
