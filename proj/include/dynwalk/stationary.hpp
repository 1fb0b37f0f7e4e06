#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dynwalk {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class SolverMethod {
    Auto,       // dense up to dense_limit states, iterative above
    Dense,      // GTH state reduction (subtraction-free Gaussian elimination)
    SparseLU,   // same system, sparse factorization
    Iterative,  // same system, GMRES with an ILU(0) preconditioner
    Power,      // power iteration on the uniformized chain
};

struct SolverOptions {
    SolverMethod method = SolverMethod::Auto;
    std::size_t dense_limit = 5000;
    double uniformization_factor = 1.05;
    double power_tol = 1e-13;
    std::size_t power_max_iter = 20'000'000;
    double krylov_tol = 1e-14;
    std::size_t krylov_max_iter = 5000;
    std::size_t refinement_steps = 4;  // iterative method only
};

/// Communicating-class structure of a chain, read off the nonzero pattern of
/// its off-diagonal rates.
struct ClassStructure {
    std::vector<std::vector<std::size_t>> components;  // all SCCs, ordered by smallest member
    std::vector<std::vector<std::size_t>> closed;      // SCCs with no exit
    std::vector<std::size_t> transient;                // states outside every closed class

    bool irreducible() const { return components.size() == 1; }
};

ClassStructure communicating_classes(const SparseRows& rates);

/// Stationary law of a CTMC given its generator (rows summing to zero).
/// States outside the unique closed class get probability zero. Throws
/// ReducibleChainError when more than one closed class exists.
Eigen::VectorXd stationary_ctmc(const SparseRows& generator, const SolverOptions& opts = {});

/// Stationary law of a row-stochastic matrix, solved through P - I.
Eigen::VectorXd stationary_dtmc(const SparseRows& transition, const SolverOptions& opts = {});

std::string describe_classes(const std::vector<std::vector<std::size_t>>& classes,
                             std::size_t max_listed = 8);

}  // namespace dynwalk
