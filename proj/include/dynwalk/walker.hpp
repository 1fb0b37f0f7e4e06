#pragma once

#include <Eigen/Dense>

#include "dynwalk/model.hpp"

namespace dynwalk {

/// Walker rates gamma_{k,v} = beta_{k,v} * gamma: a global rate and an m x n
/// table of nonnegative per-(configuration, node) multipliers.
struct WalkerSpec {
    double gamma = 1.0;
    Eigen::MatrixXd beta;

    static WalkerSpec constant(const ConfigSet& cs, double gamma = 1.0);
    // beta_{k,v} = d_{k,v}
    static WalkerSpec degree(const ConfigSet& cs, double gamma = 1.0);

    WalkerSpec with_gamma(double g) const { return {g, beta}; }
    double max_beta() const { return beta.size() ? beta.maxCoeff() : 0.0; }

    // Shape, sign and gamma checks against a config set.
    void validate(const ConfigSet& cs) const;
};

// Nodes that can never leave: no configuration where both beta and degree
// are positive.
std::vector<std::size_t> frozen_nodes(const ConfigSet& cs, const WalkerSpec& w);

}  // namespace dynwalk
