#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dynwalk/distribution.hpp"
#include "dynwalk/environment.hpp"
#include "dynwalk/model.hpp"
#include "dynwalk/rng.hpp"
#include "dynwalk/walker.hpp"

namespace dynwalk {

/// Law of one environment holding time.
struct HoldingDistribution {
    enum class Kind { Exponential, Deterministic, Pareto };

    Kind kind = Kind::Exponential;
    double rate = 1.0;   // Exponential
    double value = 1.0;  // Deterministic
    double scale = 1.0;  // Pareto: P[S > x] = (scale/x)^index for x >= scale
    double index = 2.0;

    static HoldingDistribution exponential(double rate);
    static HoldingDistribution deterministic(double value);
    static HoldingDistribution pareto(double scale, double index);

    double mean() const;
    double sample(RandomStream& rng) const;
    // Every holding time multiplied by `a`.
    HoldingDistribution scaled(double a) const;
    void validate() const;
};

// Exponential holdings at each state's exit rate.
std::vector<HoldingDistribution> exponential_holdings(const EnvironmentSpec& env);
// Pareto holdings with the same means as the exponential ones.
std::vector<HoldingDistribution> pareto_holdings(const EnvironmentSpec& env, double index);

// Environment speed-up by `a`: holding times times a, rates divided by a.
EnvironmentSpec speedup(const EnvironmentSpec& env, double a);
std::vector<HoldingDistribution> speedup(const std::vector<HoldingDistribution>& holdings, double a);

enum class SimEngine {
    Auto,         // EdgeLazy for edge-Markovian models with exponential holdings, else EventDriven
    EventDriven,  // every environment jump and walker step is an event
    EdgeLazy,     // edge states sampled in closed form at thinned walker proposal times
};

struct SimOptions {
    double horizon = 1e5;
    std::uint64_t seed = 1;
    std::size_t replications = 1;  // horizon is split evenly across replications
    std::size_t batches = 20;      // per replication, for batch-means standard errors
    SimEngine engine = SimEngine::Auto;
    std::size_t threads = 0;       // 0: worker_count()
};

struct SimResult {
    Distribution node_occupancy;
    Distribution config_occupancy;
    Eigen::VectorXd node_stderr;
    double total_time = 0.0;
    std::uint64_t walker_steps = 0;
    std::uint64_t environment_events = 0;
    std::uint64_t seed = 0;
    SimEngine engine = SimEngine::EventDriven;
};

/// Time-averaged walker and configuration occupancy along simulated paths.
/// `holdings`, when given, replaces the exponential holding laws (one per
/// environment state) while keeping the environment's jump chain.
SimResult simulate(const DynamicGraph& model, const WalkerSpec& w, const SimOptions& opts,
                   const std::vector<HoldingDistribution>* holdings = nullptr);

struct CouplingOptions {
    std::uint64_t seed = 1;
    std::size_t replications = 200;
    double horizon = 1e4;
    std::size_t threads = 0;
};

struct CouplingResult {
    std::vector<double> times;  // per replication; +inf when censored
    std::size_t censored = 0;
    double mean = 0.0;          // over uncensored runs
    double median = 0.0;
    double max = 0.0;
    double stderr_mean = 0.0;
    std::uint64_t seed = 0;
    std::optional<std::string> warning;
};

/// First meeting time of two walkers started at u1 and u2 that share the
/// environment but step on independent clocks.
CouplingResult coupling_time(const DynamicGraph& model, const WalkerSpec& w, std::size_t u1, std::size_t u2,
                             const CouplingOptions& opts, const std::vector<HoldingDistribution>* holdings = nullptr);

void write_occupancy_csv(std::ostream& os, const SimResult& r, double gamma);
void write_coupling_csv(std::ostream& os, const CouplingResult& r);

const char* engine_name(SimEngine e);

}  // namespace dynwalk
