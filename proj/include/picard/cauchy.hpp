#pragma once

#include "picard/solver.hpp"

namespace picard {

/// Right-hand side F(t, x) -> R^m of the mixed-derivative Cauchy problem
/// d_1...d_n x = F(t, x).
using RightHandSide =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// Boundary data on the coordinate cross D0 = { t : t_1...t_n = 0 }.
using BoundaryFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct CauchyProblem {
    Grid grid;  // box [0, b_1] x ... x [0, b_n]
    Index codomain_dim = 1;
    RightHandSide rhs;
    GridFunction lipschitz;  // scalar L(t) sampled at nodes
    BoundaryFn boundary;     // phi, evaluable anywhere on D0
};

/// Singular diagonal 0/1 matrix: mask holds the diagonal, never all ones.
struct DiagonalProjector {
    std::vector<uint8_t> mask;

    int rank() const;
    Eigen::VectorXd apply(const Eigen::VectorXd& t) const;
};

/// All 2^n - 1 singular diagonal 0/1 projectors, ascending binary value of
/// the mask. Requires 1 <= n <= 16.
std::vector<DiagonalProjector> enumerate_pi_n(int n);

/// Forcing f(t) = sum over projectors P of (-1)^(n-1-rank(P)) phi(P t).
GridFunction boundary_to_forcing(const CauchyProblem& problem);

/// Reduces the Cauchy problem to the equivalent Volterra equation
/// x = f + integral over [0, t] of F(s, x(s)) ds and solves it with an
/// automatically built weight.
SolveResult solve_cauchy(const CauchyProblem& problem, const SolverConfig& config);

struct BoundaryReport {
    double max_error = 0.0;
    bool pass = false;
    Index argmax_node = -1;
};

/// Max over nodes with some zero coordinate of ||x(t) - phi(t)||.
BoundaryReport check_boundary(const GridFunction& x, const CauchyProblem& problem, double tol);

/// Max over interior cells of the fully mixed forward divided difference of x
/// minus F at the cell's low corner. First-order diagnostic.
double mixed_partial_residual(const GridFunction& x, const CauchyProblem& problem);

}  // namespace picard
