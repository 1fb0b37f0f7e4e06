#include "dynwalk/walker.hpp"

#include <cmath>

namespace dynwalk {

WalkerSpec WalkerSpec::constant(const ConfigSet& cs, double gamma)
{
    return {gamma, Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(cs.num_configs()),
                                         static_cast<Eigen::Index>(cs.num_nodes()))};
}

WalkerSpec WalkerSpec::degree(const ConfigSet& cs, double gamma)
{
    return {gamma, cs.degree_matrix()};
}

void WalkerSpec::validate(const ConfigSet& cs) const
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw ValidationError("walker: gamma must be positive and finite");
    if (beta.rows() != static_cast<Eigen::Index>(cs.num_configs())
        || beta.cols() != static_cast<Eigen::Index>(cs.num_nodes()))
        throw ValidationError("walker: beta must be " + std::to_string(cs.num_configs()) + " x "
                              + std::to_string(cs.num_nodes()));
    if (!beta.allFinite() || beta.minCoeff() < 0.0)
        throw ValidationError("walker: beta entries must be finite and nonnegative");
}

std::vector<std::size_t> frozen_nodes(const ConfigSet& cs, const WalkerSpec& w)
{
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < cs.num_nodes(); ++v) {
        bool moves = false;
        for (std::size_t k = 0; k < cs.num_configs() && !moves; ++k)
            moves = cs.degree(k, v) > 0 && w.beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(v)) > 0.0;
        if (!moves)
            out.push_back(v);
    }
    return out;
}

}  // namespace dynwalk
