#include "dynwalk/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynwalk/error.hpp"

namespace dynwalk {

EnvironmentSpec::EnvironmentSpec(const SparseRows& rates, std::vector<std::size_t> config_of_state,
                                 std::size_t num_configs)
{
    const auto m = rates.rows();
    if (m == 0 || rates.cols() != m)
        throw ValidationError("environment: rate matrix must be square and nonempty");

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(rates.nonZeros()) + static_cast<std::size_t>(m));
    exit_.assign(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (SparseRows::InnerIterator it(rates, r); it; ++it) {
            if (it.col() == r)
                continue;
            const double v = it.value();
            if (!std::isfinite(v) || v < 0.0) {
                std::ostringstream os;
                os << "environment: rate (" << r << "," << it.col() << ") = " << v << " must be finite and >= 0";
                throw ValidationError(os.str());
            }
            if (v == 0.0)
                continue;
            trips.emplace_back(r, it.col(), v);
            exit_[static_cast<std::size_t>(r)] += v;
        }
    }
    if (m > 1) {
        for (Eigen::Index r = 0; r < m; ++r)
            if (exit_[static_cast<std::size_t>(r)] <= 0.0)
                throw ValidationError("environment: state " + std::to_string(r)
                                      + " has zero exit rate (holding time would be infinite)");
    }
    for (Eigen::Index r = 0; r < m; ++r)
        trips.emplace_back(r, r, -exit_[static_cast<std::size_t>(r)]);
    generator_.resize(m, m);
    generator_.setFromTriplets(trips.begin(), trips.end());
    generator_.makeCompressed();

    if (config_of_state.empty()) {
        config_of_state_.resize(static_cast<std::size_t>(m));
        for (std::size_t i = 0; i < config_of_state_.size(); ++i)
            config_of_state_[i] = i;
    } else {
        if (config_of_state.size() != static_cast<std::size_t>(m))
            throw ValidationError("environment: state-to-configuration map has wrong length");
        config_of_state_ = std::move(config_of_state);
    }
    const std::size_t max_label = *std::max_element(config_of_state_.begin(), config_of_state_.end());
    num_configs_ = num_configs ? num_configs : max_label + 1;
    if (max_label >= num_configs_)
        throw ValidationError("environment: configuration label out of range");
}

EnvironmentSpec EnvironmentSpec::from_dense(const Eigen::MatrixXd& rates)
{
    if (rates.rows() != rates.cols())
        throw ValidationError("environment: rate matrix must be square");
    SparseRows s(rates.rows(), rates.cols());
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index r = 0; r < rates.rows(); ++r)
        for (Eigen::Index c = 0; c < rates.cols(); ++c)
            if (r != c && rates(r, c) != 0.0)
                trips.emplace_back(r, c, rates(r, c));
    s.setFromTriplets(trips.begin(), trips.end());
    return EnvironmentSpec(s);
}

double EnvironmentSpec::max_exit_rate() const
{
    return exit_.empty() ? 0.0 : *std::max_element(exit_.begin(), exit_.end());
}

double EnvironmentSpec::rate(std::size_t from, std::size_t to) const
{
    if (from == to)
        return 0.0;
    return generator_.coeff(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
}

bool EnvironmentSpec::identity_labels() const
{
    if (num_configs_ != config_of_state_.size())
        return false;
    for (std::size_t i = 0; i < config_of_state_.size(); ++i)
        if (config_of_state_[i] != i)
            return false;
    return true;
}

EnvironmentSpec EnvironmentSpec::scaled(double factor) const
{
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw ValidationError("environment: scale factor must be positive");
    SparseRows r = generator_ * factor;
    return EnvironmentSpec(r, config_of_state_, num_configs_);
}

Eigen::VectorXd stationary_states(const EnvironmentSpec& env, const SolverOptions& opts)
{
    if (env.num_states() == 1)
        return Eigen::VectorXd::Ones(1);
    const ClassStructure cls = communicating_classes(env.generator());
    if (!cls.irreducible())
        throw ReducibleChainError("environment is reducible; " + describe_classes(cls.closed), cls.closed);
    return stationary_ctmc(env.generator(), opts);
}

Eigen::VectorXd aggregate_to_configs(const EnvironmentSpec& env, const Eigen::VectorXd& per_state)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(env.num_configs()));
    for (std::size_t s = 0; s < env.num_states(); ++s)
        out[static_cast<Eigen::Index>(env.config_of(s))] += per_state[static_cast<Eigen::Index>(s)];
    return out;
}

Distribution stationary_sigma(const EnvironmentSpec& env, const SolverOptions& opts)
{
    return {index_labels(env.num_configs(), "config_"), aggregate_to_configs(env, stationary_states(env, opts))};
}

EmbeddedChain embedded_jump_chain(const EnvironmentSpec& env)
{
    const std::size_t m = env.num_states();
    if (m < 2)
        throw ValidationError("embedded_jump_chain: a single-state environment never jumps");
    EmbeddedChain out;
    out.mean_holding.resize(static_cast<Eigen::Index>(m));
    std::vector<Eigen::Triplet<double>> trips;
    const auto& q = env.generator();
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
        const double exit = env.exit_rate(static_cast<std::size_t>(r));
        out.mean_holding[r] = 1.0 / exit;
        for (SparseRows::InnerIterator it(q, r); it; ++it)
            if (it.col() != r)
                trips.emplace_back(r, it.col(), it.value() / exit);
    }
    out.transition.resize(q.rows(), q.cols());
    out.transition.setFromTriplets(trips.begin(), trips.end());
    out.transition.makeCompressed();
    return out;
}

Eigen::VectorXd stationary_from_jump_chain(const EmbeddedChain& chain, const SolverOptions& opts)
{
    Eigen::VectorXd psi = stationary_dtmc(chain.transition, opts);
    Eigen::VectorXd w = psi.cwiseProduct(chain.mean_holding);
    return w / w.sum();
}

}  // namespace dynwalk
