#include "dynwalk/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include "dynwalk/error.hpp"

namespace dynwalk {

namespace {

// Iterative Tarjan over the pattern of positive off-diagonal entries.
std::vector<std::vector<std::size_t>> tarjan(const SparseRows& rates)
{
    const auto n = static_cast<std::size_t>(rates.rows());
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    std::size_t counter = 0;

    struct Frame {
        std::size_t v;
        SparseRows::InnerIterator it;
    };
    std::vector<Frame> call;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited)
            continue;
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        call.push_back({root, SparseRows::InnerIterator(rates, static_cast<Eigen::Index>(root))});

        while (!call.empty()) {
            auto& frame = call.back();
            const std::size_t v = frame.v;
            bool descended = false;
            for (; frame.it; ++frame.it) {
                const auto w = static_cast<std::size_t>(frame.it.col());
                if (w == v || frame.it.value() <= 0.0)
                    continue;
                if (index[w] == unvisited) {
                    ++frame.it;
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, SparseRows::InnerIterator(rates, static_cast<Eigen::Index>(w))});
                    descended = true;
                    break;
                }
                if (on_stack[w])
                    low[v] = std::min(low[v], index[w]);
            }
            if (descended)
                continue;

            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w = 0;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                const std::size_t parent = call.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

// Grassmann-Taksar-Heyman state reduction. Subtraction-free, so the result
// keeps full relative accuracy even when rates span many orders of
// magnitude, where LU on the balance equations loses digits.
Eigen::VectorXd solve_dense(const SparseRows& q, const std::vector<std::size_t>& states)
{
    const auto c = static_cast<Eigen::Index>(states.size());
    std::vector<Eigen::Index> local(static_cast<std::size_t>(q.rows()), -1);
    for (Eigen::Index i = 0; i < c; ++i)
        local[states[static_cast<std::size_t>(i)]] = i;

    // b = transposed off-diagonal rates, so row operations on the rate
    // matrix become contiguous column operations here. Diagonal entries are
    // never read.
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(c, c);
    for (Eigen::Index i = 0; i < c; ++i) {
        const auto row = static_cast<Eigen::Index>(states[static_cast<std::size_t>(i)]);
        for (SparseRows::InnerIterator it(q, row); it; ++it) {
            const Eigen::Index j = local[static_cast<std::size_t>(it.col())];
            if (j >= 0 && j != i)
                b(j, i) = it.value();
        }
    }

    Eigen::VectorXd f;
    for (Eigen::Index k = c - 1; k > 0; --k) {
        const double out = b.col(k).head(k).sum();
        if (!(out > 0.0))
            throw SolverError("stationary solve: state reduction met a state with no exit");
        f = b.row(k).head(k).transpose() / out;
        b.topLeftCorner(k, k).noalias() += b.col(k).head(k) * f.transpose();
    }

    Eigen::VectorXd x(c);
    x[0] = 1.0;
    for (Eigen::Index k = 1; k < c; ++k)
        x[k] = x.head(k).dot(b.row(k).head(k).transpose()) / b.col(k).head(k).sum();
    return x / x.sum();
}

// Balance system Q^T x = 0 restricted to `states`, with the last equation
// replaced by x_last = 1.
Eigen::SparseMatrix<double> augmented_system(const SparseRows& q, const std::vector<std::size_t>& states)
{
    const auto c = static_cast<Eigen::Index>(states.size());
    std::vector<Eigen::Index> local(static_cast<std::size_t>(q.rows()), -1);
    for (Eigen::Index i = 0; i < c; ++i)
        local[states[static_cast<std::size_t>(i)]] = i;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(q.nonZeros()) + states.size());
    for (Eigen::Index i = 0; i < c; ++i) {
        const auto row = static_cast<Eigen::Index>(states[static_cast<std::size_t>(i)]);
        for (SparseRows::InnerIterator it(q, row); it; ++it) {
            const Eigen::Index j = local[static_cast<std::size_t>(it.col())];
            if (j >= 0 && j != c - 1)
                trips.emplace_back(j, i, it.value());
        }
    }
    // Pinning one component keeps the system as sparse as Q itself; a row
    // of ones would make the factorizations fill in. Callers renormalize.
    trips.emplace_back(c - 1, c - 1, 1.0);

    Eigen::SparseMatrix<double> a(c, c);
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();
    return a;
}

Eigen::VectorXd unit_rhs(Eigen::Index c)
{
    Eigen::VectorXd b = Eigen::VectorXd::Zero(c);
    b[c - 1] = 1.0;
    return b;
}

Eigen::VectorXd solve_sparse(const SparseRows& q, const std::vector<std::size_t>& states)
{
    const Eigen::SparseMatrix<double> a = augmented_system(q, states);
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw SolverError("stationary solve: sparse LU factorization failed: " + lu.lastErrorMessage());
    Eigen::VectorXd x = lu.solve(unit_rhs(a.rows()));
    if (lu.info() != Eigen::Success)
        throw SolverError("stationary solve: sparse LU back-substitution failed");
    return x;
}

// ILU(0): incomplete LU on the matrix's own sparsity pattern. Factorizing
// costs about one pass over the nonzeros, where Eigen's IncompleteLUT spent
// most of the solve time on the bus chain. Shaped as an Eigen preconditioner.
class Ilu0 {
public:
    using Csr = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    template <typename M>
    Ilu0& analyzePattern(const M&)
    {
        return *this;
    }
    template <typename M>
    Ilu0& factorize(const M& m)
    {
        return compute(m);
    }
    template <typename M>
    Ilu0& compute(const M& m)
    {
        lu_ = Csr(m);
        lu_.makeCompressed();
        const Eigen::Index n = lu_.rows();
        const auto* outer = lu_.outerIndexPtr();
        const auto* inner = lu_.innerIndexPtr();
        double* val = lu_.valuePtr();
        diag_.assign(static_cast<std::size_t>(n), -1);
        for (Eigen::Index i = 0; i < n; ++i)
            for (auto p = outer[i]; p < outer[i + 1]; ++p)
                if (inner[p] == i)
                    diag_[static_cast<std::size_t>(i)] = p;

        std::vector<Eigen::Index> where(static_cast<std::size_t>(n), -1);
        info_ = Eigen::Success;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index di = diag_[static_cast<std::size_t>(i)];
            if (di < 0) {
                info_ = Eigen::NumericalIssue;
                return *this;
            }
            for (auto p = outer[i]; p < outer[i + 1]; ++p)
                where[static_cast<std::size_t>(inner[p])] = p;
            for (auto p = outer[i]; p < di; ++p) {
                const Eigen::Index k = inner[p];
                const Eigen::Index dk = diag_[static_cast<std::size_t>(k)];
                val[p] /= val[dk];
                for (auto q = dk + 1; q < outer[k + 1]; ++q) {
                    const Eigen::Index w = where[static_cast<std::size_t>(inner[q])];
                    if (w >= 0)
                        val[w] -= val[p] * val[q];
                }
            }
            for (auto p = outer[i]; p < outer[i + 1]; ++p)
                where[static_cast<std::size_t>(inner[p])] = -1;
            if (val[di] == 0.0 || !std::isfinite(val[di])) {
                info_ = Eigen::NumericalIssue;
                return *this;
            }
        }
        return *this;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const
    {
        const Eigen::Index n = lu_.rows();
        const auto* outer = lu_.outerIndexPtr();
        const auto* inner = lu_.innerIndexPtr();
        const double* val = lu_.valuePtr();
        Eigen::VectorXd x = b;
        for (Eigen::Index i = 0; i < n; ++i)
            for (auto p = outer[i]; p < diag_[static_cast<std::size_t>(i)]; ++p)
                x[i] -= val[p] * x[inner[p]];
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            const Eigen::Index di = diag_[static_cast<std::size_t>(i)];
            for (auto p = di + 1; p < outer[i + 1]; ++p)
                x[i] -= val[p] * x[inner[p]];
            x[i] /= val[di];
        }
        return x;
    }

    Eigen::ComputationInfo info() const { return info_; }

private:
    Csr lu_;
    std::vector<Eigen::Index> diag_;
    Eigen::ComputationInfo info_ = Eigen::Success;
};

// b - a x with long double accumulation.
Eigen::VectorXd extended_residual(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& b)
{
    std::vector<long double> acc(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        acc[static_cast<std::size_t>(i)] = b[i];
    for (Eigen::Index j = 0; j < a.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it)
            acc[static_cast<std::size_t>(it.row())] -= static_cast<long double>(it.value()) * x[j];
    Eigen::VectorXd r(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        r[i] = static_cast<double>(acc[static_cast<std::size_t>(i)]);
    return r;
}

Eigen::VectorXd solve_iterative(const SparseRows& q, const std::vector<std::size_t>& states,
                                const SolverOptions& opts)
{
    const Eigen::SparseMatrix<double> a = augmented_system(q, states);
    const Eigen::VectorXd b = unit_rhs(a.rows());

    Eigen::GMRES<Eigen::SparseMatrix<double>, Ilu0> gmres;
    gmres.setTolerance(opts.krylov_tol);
    gmres.setMaxIterations(static_cast<Eigen::Index>(opts.krylov_max_iter));
    gmres.set_restart(100);
    gmres.compute(a);
    if (gmres.info() == Eigen::Success) {
        Eigen::VectorXd x = gmres.solve(b);
        // Slow walkers leave the chain nearly decoupled and GMRES alone
        // stops around 1e-10 there; refinement with an extended-precision
        // residual recovers the lost digits.
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t step = 0; step < opts.refinement_steps && gmres.info() == Eigen::Success; ++step) {
            const Eigen::VectorXd r = extended_residual(a, x, b);
            const Eigen::VectorXd d = gmres.solve(r);
            if (gmres.info() != Eigen::Success)
                break;
            x += d;
            const double size = d.lpNorm<Eigen::Infinity>();
            // Converged, or stuck at the conditioning floor.
            if (size <= 1e-15 * x.lpNorm<Eigen::Infinity>() || size > 0.5 * previous)
                break;
            previous = size;
        }
        if (gmres.info() == Eigen::Success && x.allFinite())
            return x;
    }
    // Preconditioner breakdown or stagnation: fall back to a direct solve.
    return solve_sparse(q, states);
}

Eigen::VectorXd solve_power(const SparseRows& q, const std::vector<std::size_t>& states,
                            const SolverOptions& opts)
{
    const auto c = static_cast<Eigen::Index>(states.size());
    std::vector<Eigen::Index> local(static_cast<std::size_t>(q.rows()), -1);
    for (Eigen::Index i = 0; i < c; ++i)
        local[states[static_cast<std::size_t>(i)]] = i;

    double max_exit = 0.0;
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index i = 0; i < c; ++i) {
        const auto row = static_cast<Eigen::Index>(states[static_cast<std::size_t>(i)]);
        double exit = 0.0;
        for (SparseRows::InnerIterator it(q, row); it; ++it) {
            const Eigen::Index j = local[static_cast<std::size_t>(it.col())];
            if (j >= 0 && j != i) {
                trips.emplace_back(i, j, it.value());
                exit += it.value();
            }
        }
        trips.emplace_back(i, i, -exit);
        max_exit = std::max(max_exit, exit);
    }
    if (max_exit <= 0.0)
        return Eigen::VectorXd::Constant(c, 1.0 / static_cast<double>(c));

    const double lambda = opts.uniformization_factor * max_exit;
    // Column-major transpose of the uniformized matrix, so x <- P^T x.
    Eigen::SparseMatrix<double> pt(c, c);
    for (auto& t : trips)
        t = Eigen::Triplet<double>(t.col(), t.row(), t.value() / lambda + (t.row() == t.col() ? 1.0 : 0.0));
    pt.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd x = Eigen::VectorXd::Constant(c, 1.0 / static_cast<double>(c));
    for (std::size_t iter = 0; iter < opts.power_max_iter; ++iter) {
        Eigen::VectorXd next = pt * x;
        next /= next.sum();
        const double delta = (next - x).lpNorm<Eigen::Infinity>();
        x = std::move(next);
        if (delta < opts.power_tol)
            return x;
    }
    throw SolverError("stationary solve: power iteration did not converge within the iteration cap");
}

}  // namespace

ClassStructure communicating_classes(const SparseRows& rates)
{
    ClassStructure cs;
    cs.components = tarjan(rates);
    std::vector<std::size_t> comp_of(static_cast<std::size_t>(rates.rows()));
    for (std::size_t c = 0; c < cs.components.size(); ++c)
        for (auto v : cs.components[c])
            comp_of[v] = c;

    std::vector<char> leaks(cs.components.size(), 0);
    for (Eigen::Index r = 0; r < rates.rows(); ++r)
        for (SparseRows::InnerIterator it(rates, r); it; ++it)
            if (it.col() != r && it.value() > 0.0
                && comp_of[static_cast<std::size_t>(r)] != comp_of[static_cast<std::size_t>(it.col())])
                leaks[comp_of[static_cast<std::size_t>(r)]] = 1;

    for (std::size_t c = 0; c < cs.components.size(); ++c) {
        if (leaks[c])
            cs.transient.insert(cs.transient.end(), cs.components[c].begin(), cs.components[c].end());
        else
            cs.closed.push_back(cs.components[c]);
    }
    std::sort(cs.transient.begin(), cs.transient.end());
    return cs;
}

std::string describe_classes(const std::vector<std::vector<std::size_t>>& classes, std::size_t max_listed)
{
    std::ostringstream os;
    os << classes.size() << " class(es):";
    for (std::size_t c = 0; c < classes.size() && c < max_listed; ++c) {
        os << " {";
        for (std::size_t i = 0; i < classes[c].size() && i < 12; ++i)
            os << (i ? "," : "") << classes[c][i];
        if (classes[c].size() > 12)
            os << ",... (" << classes[c].size() << " states)";
        os << "}";
    }
    if (classes.size() > max_listed)
        os << " ...";
    return os.str();
}

Eigen::VectorXd stationary_ctmc(const SparseRows& generator, const SolverOptions& opts)
{
    const auto n = generator.rows();
    if (n == 0 || generator.cols() != n)
        throw SolverError("stationary solve: generator must be square and nonempty");
    if (n == 1)
        return Eigen::VectorXd::Ones(1);

    const ClassStructure cls = communicating_classes(generator);
    if (cls.closed.size() != 1)
        throw ReducibleChainError("stationary solve: chain has " + std::to_string(cls.closed.size())
                                      + " recurrent classes; " + describe_classes(cls.closed),
                                  cls.closed);
    const auto& states = cls.closed.front();

    SolverMethod method = opts.method;
    if (method == SolverMethod::Auto)
        method = states.size() <= opts.dense_limit ? SolverMethod::Dense : SolverMethod::Iterative;

    Eigen::VectorXd local;
    if (states.size() == 1)
        local = Eigen::VectorXd::Ones(1);
    else if (method == SolverMethod::Dense)
        local = solve_dense(generator, states);
    else if (method == SolverMethod::SparseLU)
        local = solve_sparse(generator, states);
    else if (method == SolverMethod::Iterative)
        local = solve_iterative(generator, states, opts);
    else
        local = solve_power(generator, states, opts);

    if (!local.allFinite())
        throw SolverError("stationary solve: non-finite solution");
    // Roundoff can leave tiny negatives on states with vanishing mass.
    local = local.cwiseMax(0.0);
    local /= local.sum();

    Eigen::VectorXd pi = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < states.size(); ++i)
        pi[static_cast<Eigen::Index>(states[i])] = local[static_cast<Eigen::Index>(i)];
    return pi;
}

Eigen::VectorXd stationary_dtmc(const SparseRows& transition, const SolverOptions& opts)
{
    SparseRows q = transition;
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        q.coeffRef(i, i) -= 1.0;
    q.prune(0.0);
    return stationary_ctmc(q, opts);
}

}  // namespace dynwalk
