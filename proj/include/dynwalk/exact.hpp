#pragma once

#include <iosfwd>
#include <vector>

#include "dynwalk/distribution.hpp"
#include "dynwalk/environment.hpp"
#include "dynwalk/model.hpp"
#include "dynwalk/stationary.hpp"
#include "dynwalk/walker.hpp"

namespace dynwalk {

/// Generator of the joint (environment state, walker node) chain. State
/// (s, v) has index s * n + v.
struct JointGenerator {
    std::size_t num_states = 0;  // environment states
    std::size_t num_nodes = 0;
    std::size_t num_configs = 0;
    std::vector<std::size_t> config_of_state;
    std::vector<std::string> node_labels;
    SparseRows q;

    std::size_t index(std::size_t state, std::size_t node) const { return state * num_nodes + node; }
};

JointGenerator joint_generator(const ConfigSet& cs, const EnvironmentSpec& env, const WalkerSpec& w);

struct JointStationary {
    Eigen::VectorXd joint;
    Distribution walker;   // over nodes
    Distribution configs;  // over configuration labels
};

JointStationary stationary_joint(const JointGenerator& g, const SolverOptions& opts = {});

// joint_generator followed by stationary_joint.
JointStationary solve_exact(const ConfigSet& cs, const EnvironmentSpec& env, const WalkerSpec& w,
                            const SolverOptions& opts = {});

struct SweepRow {
    double gamma = 0.0;
    Eigen::VectorXd walker;
    Eigen::VectorXd configs;
    double tv_fast = 0.0;
    double tv_slow = 0.0;
};

struct SweepResult {
    std::vector<std::string> node_labels;
    std::size_t num_configs = 0;
    Eigen::VectorXd fast_prediction;
    Eigen::VectorXd slow_prediction;
    std::vector<SweepRow> rows;  // in input gamma order
};

struct SweepOptions {
    SolverOptions solver;
    std::size_t threads = 0;  // 0: worker_count()
};

/// Exact stationary law at each gamma (the beta table of `base` is kept),
/// with max-norm distances to the fast and slow asymptotic predictions.
SweepResult gamma_sweep(const ConfigSet& cs, const EnvironmentSpec& env, const WalkerSpec& base,
                        const std::vector<double>& gammas, const SweepOptions& opts = {});

// n points from 10^lo to 10^hi inclusive, evenly spaced in the exponent.
std::vector<double> log_spaced(double lo_exp, double hi_exp, std::size_t n);

/// CSV with header gamma,node_1..node_n,config_1..config_m,tv_fast,tv_slow and
/// 17 significant digits per value.
void write_sweep_csv(std::ostream& os, const SweepResult& result);

}  // namespace dynwalk
