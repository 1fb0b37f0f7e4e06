#include "dynwalk/asymptotic.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace dynwalk {

namespace {

Eigen::VectorXd beta_row(const Eigen::MatrixXd& beta, std::size_t k)
{
    return beta.row(static_cast<Eigen::Index>(k)).transpose();
}

void check_beta_shape(const ConfigSet& cs, const Eigen::MatrixXd& beta)
{
    if (beta.rows() != static_cast<Eigen::Index>(cs.num_configs())
        || beta.cols() != static_cast<Eigen::Index>(cs.num_nodes()))
        throw ValidationError("beta must be " + std::to_string(cs.num_configs()) + " x "
                              + std::to_string(cs.num_nodes()));
    if (!beta.allFinite() || beta.minCoeff() < 0.0)
        throw ValidationError("beta entries must be finite and nonnegative");
}

// Weight d/beta of node v inside its block; an isolated node weighs 1
// (the 0/0 := 1 convention).
double block_weight(const ConfigSet& cs, std::size_t k, std::size_t v, const Eigen::VectorXd& beta_k)
{
    const std::size_t d = cs.degree(k, v);
    if (d == 0)
        return 1.0;
    const double b = beta_k[static_cast<Eigen::Index>(v)];
    if (!(b > 0.0)) {
        std::ostringstream os;
        os << "walker rate multiplier is zero at configuration " << k << ", node " << v
           << " which has degree " << d << "; its component has no stationary law";
        throw ValidationError(os.str());
    }
    return static_cast<double>(d) / b;
}

}  // namespace

Eigen::VectorXd per_config_stationary_flat(const ConfigSet& cs, std::size_t k, const Eigen::VectorXd& beta_k,
                                           const ComponentPartition& parts)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cs.num_nodes()));
    for (const auto& block : parts.blocks[k]) {
        double total = 0.0;
        for (auto v : block)
            total += out[static_cast<Eigen::Index>(v)] = block_weight(cs, k, v, beta_k);
        for (auto v : block)
            out[static_cast<Eigen::Index>(v)] /= total;
    }
    return out;
}

std::vector<Distribution> per_config_stationary(const ConfigSet& cs, std::size_t k, const Eigen::VectorXd& beta_k)
{
    if (k >= cs.num_configs())
        throw ValidationError("per_config_stationary: configuration index out of range");
    if (beta_k.size() != static_cast<Eigen::Index>(cs.num_nodes()))
        throw ValidationError("per_config_stationary: beta row has wrong length");
    const ComponentPartition parts = connected_components(cs);
    const Eigen::VectorXd flat = per_config_stationary_flat(cs, k, beta_k, parts);

    std::vector<Distribution> out;
    for (const auto& block : parts.blocks[k]) {
        std::vector<std::string> labels;
        Eigen::VectorXd values(static_cast<Eigen::Index>(block.size()));
        for (std::size_t i = 0; i < block.size(); ++i) {
            labels.push_back(cs.labels()[block[i]]);
            values[static_cast<Eigen::Index>(i)] = flat[static_cast<Eigen::Index>(block[i])];
        }
        out.emplace_back(std::move(labels), std::move(values));
    }
    return out;
}

Distribution fast_walker_connected(const ConfigSet& cs, const EnvironmentSpec& env, const Eigen::MatrixXd& beta,
                                   const SolverOptions& opts)
{
    check_beta_shape(cs, beta);
    const ComponentPartition parts = connected_components(cs);
    for (std::size_t k = 0; k < cs.num_configs(); ++k)
        if (parts.num_components(k) != 1)
            throw ValidationError("fast_walker_connected: configuration " + std::to_string(k) + " has "
                                  + std::to_string(parts.num_components(k))
                                  + " components; use fast_walker_general for disconnected configurations");

    const Distribution sigma = stationary_sigma(env, opts);
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cs.num_nodes()));
    for (std::size_t k = 0; k < cs.num_configs(); ++k)
        pi += sigma[k] * per_config_stationary_flat(cs, k, beta_row(beta, k), parts);
    return {cs.labels(), pi};
}

FastWalkerResult fast_walker_general(const ConfigSet& cs, const EnvironmentSpec& env, const Eigen::MatrixXd& beta,
                                     const SolverOptions& opts)
{
    check_beta_shape(cs, beta);
    if (env.num_configs() != cs.num_configs())
        throw ValidationError("fast_walker_general: environment and config set disagree on configuration count");

    const ComponentPartition parts = connected_components(cs);
    const std::size_t m = cs.num_configs();
    std::vector<Eigen::VectorXd> within(m);
    for (std::size_t k = 0; k < m; ++k)
        within[k] = per_config_stationary_flat(cs, k, beta_row(beta, k), parts);

    FastWalkerResult result;
    ComponentChain& chain = result.chain;
    const std::size_t ns = env.num_states();
    std::vector<std::size_t> offset(ns + 1, 0);
    for (std::size_t s = 0; s < ns; ++s) {
        offset[s + 1] = offset[s] + parts.num_components(env.config_of(s));
        for (std::size_t l = 0; l < parts.num_components(env.config_of(s)); ++l)
            chain.states.emplace_back(s, l);
    }
    const auto total = static_cast<Eigen::Index>(offset[ns]);

    if (ns == 1) {
        if (total != 1)
            throw ReducibleChainError("fast_walker_general: single configuration with "
                                          + std::to_string(total) + " components is not T-connected",
                                      {});
        chain.transition = SparseRows(1, 1);
        chain.transition.insert(0, 0) = 1.0;
        chain.psi_star = chain.psi = Eigen::VectorXd::Ones(1);
        result.walker = Distribution(cs.labels(), within[env.config_of(0)]);
        return result;
    }

    const EmbeddedChain jump = embedded_jump_chain(env);
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t s1 = 0; s1 < ns; ++s1) {
        const std::size_t k1 = env.config_of(s1);
        for (std::size_t l1 = 0; l1 < parts.num_components(k1); ++l1) {
            const auto from = static_cast<Eigen::Index>(offset[s1] + l1);
            for (SparseRows::InnerIterator it(jump.transition, static_cast<Eigen::Index>(s1)); it; ++it) {
                const auto s2 = static_cast<std::size_t>(it.col());
                const std::size_t k2 = env.config_of(s2);
                // The walker sits in block l1 with its within-block law; each
                // node carries its share to the block holding it in k2.
                for (auto v : parts.blocks[k1][l1]) {
                    const std::size_t l2 = parts.component_of[k2][v];
                    trips.emplace_back(from, static_cast<Eigen::Index>(offset[s2] + l2),
                                       it.value() * within[k1][static_cast<Eigen::Index>(v)]);
                }
            }
        }
    }
    chain.transition.resize(total, total);
    chain.transition.setFromTriplets(trips.begin(), trips.end());
    chain.transition.makeCompressed();

    chain.psi_star = stationary_dtmc(chain.transition, opts);
    chain.psi.resize(total);
    for (Eigen::Index i = 0; i < total; ++i)
        chain.psi[i] = chain.psi_star[i] * jump.mean_holding[static_cast<Eigen::Index>(chain.states[static_cast<std::size_t>(i)].first)];
    chain.psi /= chain.psi.sum();

    Eigen::VectorXd pi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cs.num_nodes()));
    for (Eigen::Index i = 0; i < total; ++i) {
        const auto [s, l] = chain.states[static_cast<std::size_t>(i)];
        const std::size_t k = env.config_of(s);
        for (auto v : parts.blocks[k][l])
            pi[static_cast<Eigen::Index>(v)] += chain.psi[i] * within[k][static_cast<Eigen::Index>(v)];
    }
    pi /= pi.sum();
    result.walker = Distribution(cs.labels(), pi);
    return result;
}

SlowWalkerResult slow_walker(const ConfigSet& cs, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& beta,
                             double beta_max)
{
    check_beta_shape(cs, beta);
    if (sigma.size() != static_cast<Eigen::Index>(cs.num_configs()))
        throw ValidationError("slow_walker: sigma has wrong length");
    const double top = beta.maxCoeff();
    if (!(top > 0.0))
        throw ValidationError("slow_walker: every rate multiplier is zero; the walker never moves");
    if (beta_max == 0.0)
        beta_max = 2.0 * top;
    if (!(beta_max > top) || !std::isfinite(beta_max)) {
        std::ostringstream os;
        os.precision(17);
        os << "slow_walker: beta_max = " << beta_max << " must exceed max beta = " << top;
        throw ValidationError(os.str());
    }

    const std::size_t n = cs.num_nodes();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < cs.num_configs(); ++k) {
        const double s = sigma[static_cast<Eigen::Index>(k)];
        if (s == 0.0)
            continue;
        for (std::size_t u = 0; u < n; ++u) {
            const std::size_t d = cs.degree(k, u);
            if (d == 0)
                continue;
            const double step =
                s * beta(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(u)) / beta_max / static_cast<double>(d);
            for (auto v : cs.neighbors(k, u))
                p(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) += step;
        }
    }
    for (Eigen::Index u = 0; u < p.rows(); ++u)
        p(u, u) = 1.0 - (p.row(u).sum() - p(u, u));

    SparseRows sparse = p.sparseView();
    Eigen::VectorXd pi = stationary_dtmc(sparse);
    return {Distribution(cs.labels(), pi), SlowChain{std::move(p), beta_max}};
}

SlowWalkerResult slow_walker(const ConfigSet& cs, const EnvironmentSpec& env, const Eigen::MatrixXd& beta,
                             double beta_max, const SolverOptions& opts)
{
    return slow_walker(cs, stationary_sigma(env, opts).values(), beta, beta_max);
}

Eigen::MatrixXd config_walker_generator(const ConfigSet& cs, std::size_t k, const Eigen::VectorXd& beta_k)
{
    const auto n = static_cast<Eigen::Index>(cs.num_nodes());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t u = 0; u < cs.num_nodes(); ++u) {
        const std::size_t d = cs.degree(k, u);
        const double b = beta_k[static_cast<Eigen::Index>(u)];
        if (d == 0 || b == 0.0)
            continue;
        for (auto v : cs.neighbors(k, u))
            q(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) = b / static_cast<double>(d);
        q(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(u)) = -b;
    }
    return q;
}

std::optional<Distribution> check_fixed_point(const ConfigSet& cs, const Eigen::MatrixXd& beta, double tol)
{
    check_beta_shape(cs, beta);
    const auto n = static_cast<Eigen::Index>(cs.num_nodes());
    const std::size_t m = cs.num_configs();

    std::vector<Eigen::MatrixXd> gens(m);
    for (std::size_t k = 0; k < m; ++k)
        gens[k] = config_walker_generator(cs, k, beta_row(beta, k));

    Eigen::VectorXd x;
    const std::size_t rows = m * static_cast<std::size_t>(n) + 1;
    if (rows <= 200'000) {
        // pi Q_k = 0 for every k, stacked as Q_k^T pi^T = 0, plus sum(pi) = 1.
        Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), n);
        for (std::size_t k = 0; k < m; ++k)
            a.middleRows(static_cast<Eigen::Index>(k) * n, n) = gens[k].transpose();
        a.row(a.rows() - 1).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
        b[b.size() - 1] = 1.0;
        x = a.colPivHouseholderQr().solve(b);
    } else {
        // Too many rows to stack: the null space of sum_k Q_k Q_k^T is the
        // common left null space of the Q_k.
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
        for (const auto& q : gens)
            gram.noalias() += q * q.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        x = eig.eigenvectors().col(0);
        if (std::abs(x.sum()) < 1e-300)
            return std::nullopt;
        x /= x.sum();
    }
    if (!x.allFinite())
        return std::nullopt;

    double residual = std::abs(x.sum() - 1.0);
    for (const auto& q : gens)
        residual = std::max(residual, (x.transpose() * q).cwiseAbs().maxCoeff());
    if (residual >= tol || x.minCoeff() < -tol)
        return std::nullopt;

    x = x.cwiseMax(0.0);
    x /= x.sum();
    return Distribution(cs.labels(), x);
}

}  // namespace dynwalk
