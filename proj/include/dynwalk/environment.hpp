#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dynwalk/distribution.hpp"
#include "dynwalk/stationary.hpp"

namespace dynwalk {

/// Markovian environment: a CTMC over environment states, each state
/// carrying the index of the graph configuration in force while it is
/// occupied. For most models states and configurations coincide; the bus
/// builder maps many bus-position states onto one connectivity graph.
class EnvironmentSpec {
public:
    EnvironmentSpec() = default;

    /// Off-diagonal rates only; the diagonal of `rates` is ignored and
    /// rebuilt as the negative row sum. `config_of_state` empty means identity.
    EnvironmentSpec(const SparseRows& rates, std::vector<std::size_t> config_of_state = {},
                    std::size_t num_configs = 0);

    static EnvironmentSpec from_dense(const Eigen::MatrixXd& rates);

    std::size_t num_states() const noexcept { return static_cast<std::size_t>(generator_.rows()); }
    std::size_t num_configs() const noexcept { return num_configs_; }
    std::size_t config_of(std::size_t state) const { return config_of_state_[state]; }
    const std::vector<std::size_t>& config_of_state() const noexcept { return config_of_state_; }

    // Full generator, diagonal = -exit rate.
    const SparseRows& generator() const noexcept { return generator_; }
    double exit_rate(std::size_t state) const { return exit_[state]; }
    double max_exit_rate() const;
    double rate(std::size_t from, std::size_t to) const;

    bool identity_labels() const;

    // Every rate multiplied by `factor`.
    EnvironmentSpec scaled(double factor) const;

private:
    SparseRows generator_;
    std::vector<double> exit_;
    std::vector<std::size_t> config_of_state_;
    std::size_t num_configs_ = 0;
};

/// Jump chain of the environment and its mean holding times.
struct EmbeddedChain {
    SparseRows transition;       // P_env, zero diagonal
    Eigen::VectorXd mean_holding;  // E[S_k] = 1 / exit rate
};

/// Stationary time fractions over environment states. Requires an
/// irreducible environment; otherwise throws ReducibleChainError naming the
/// recurrent classes.
Eigen::VectorXd stationary_states(const EnvironmentSpec& env, const SolverOptions& opts = {});

/// Time fractions aggregated onto configuration labels (sigma).
Distribution stationary_sigma(const EnvironmentSpec& env, const SolverOptions& opts = {});

Eigen::VectorXd aggregate_to_configs(const EnvironmentSpec& env, const Eigen::VectorXd& per_state);

EmbeddedChain embedded_jump_chain(const EnvironmentSpec& env);

/// sigma_k proportional to psi_k E[S_k], psi the stationary vector of P_env.
Eigen::VectorXd stationary_from_jump_chain(const EmbeddedChain& chain, const SolverOptions& opts = {});

}  // namespace dynwalk
