#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dynwalk/distribution.hpp"
#include "dynwalk/environment.hpp"
#include "dynwalk/model.hpp"
#include "dynwalk/stationary.hpp"

namespace dynwalk {

/// Stationary law of the walker confined to each component of configuration
/// k: within a block, mass proportional to d_{k,v} / beta_{k,v}. An isolated
/// node is its own block with mass 1.
std::vector<Distribution> per_config_stationary(const ConfigSet& cs, std::size_t k, const Eigen::VectorXd& beta_k);

// Same numbers laid out as one length-n vector (each block sums to 1).
Eigen::VectorXd per_config_stationary_flat(const ConfigSet& cs, std::size_t k, const Eigen::VectorXd& beta_k,
                                           const ComponentPartition& parts);

/// Fast-walker limit when every configuration is connected: the
/// sigma-weighted mixture of per-configuration stationaries.
Distribution fast_walker_connected(const ConfigSet& cs, const EnvironmentSpec& env, const Eigen::MatrixXd& beta,
                                   const SolverOptions& opts = {});

/// Jump chain over (environment state, component) pairs seen by a fast
/// walker, its stationary vector and the time-weighted occupancy.
struct ComponentChain {
    std::vector<std::pair<std::size_t, std::size_t>> states;  // (environment state, component)
    SparseRows transition;
    Eigen::VectorXd psi_star;
    Eigen::VectorXd psi;
};

struct FastWalkerResult {
    Distribution walker;
    ComponentChain chain;
};

/// Fast-walker limit allowing disconnected configurations. Components are
/// taken per environment state, so environments whose states share a
/// configuration label (bus models) are handled on the Markov state space.
FastWalkerResult fast_walker_general(const ConfigSet& cs, const EnvironmentSpec& env, const Eigen::MatrixXd& beta,
                                     const SolverOptions& opts = {});

struct SlowChain {
    Eigen::MatrixXd transition;  // n x n, row-stochastic, positive diagonal
    double beta_max = 0.0;
};

struct SlowWalkerResult {
    Distribution walker;
    SlowChain chain;
};

/// Slow-walker limit: stationary law of the sigma-averaged lazy chain
/// P(u,v) = sum_k sigma_k (beta_{k,u}/beta_max) A_k(u,v)/d_{k,u}. Requires
/// beta_max > max beta strictly; 0 picks 2 * max beta.
SlowWalkerResult slow_walker(const ConfigSet& cs, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& beta,
                             double beta_max = 0.0);
SlowWalkerResult slow_walker(const ConfigSet& cs, const EnvironmentSpec& env, const Eigen::MatrixXd& beta,
                             double beta_max = 0.0, const SolverOptions& opts = {});

/// Looks for a single distribution annihilated by every configuration's
/// walker generator (rates beta_{k,u} A_k(u,v)/d_{k,u}). Returns it when the
/// stacked least-squares residual is below `tol` and it is nonnegative.
std::optional<Distribution> check_fixed_point(const ConfigSet& cs, const Eigen::MatrixXd& beta, double tol = 1e-9);

// Walker generator confined to configuration k with gamma = 1.
Eigen::MatrixXd config_walker_generator(const ConfigSet& cs, std::size_t k, const Eigen::VectorXd& beta_k);

}  // namespace dynwalk
