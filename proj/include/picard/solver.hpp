#pragma once

#include "picard/renorm.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace picard {

/// Nonlinear kernel K(t, s, x) -> R^m.
using Kernel = std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                             const Eigen::VectorXd&)>;

/// Retarded kernel K(t, s, x(phi_1(s)), ..., x(phi_r(s))) -> R^m.
using RetardedKernel = std::function<Eigen::VectorXd(
    const Eigen::VectorXd&, const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&)>;

/// Coordinate substitution X -> X.
using CoordMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Matrix-valued linear kernel A(t, s).
using MatrixKernel =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

struct Retardation {
    CoordMap map;          // phi_k
    LipschitzFn modulus;   // L_k(t, s)
};

/// x(t) = f(t) + integral over H(t) of K(t, s, x(s)) dmu(s), possibly with
/// inner retardations x(phi_k(s)).
struct IntegralProblem {
    Grid grid;
    Measure measure;
    Relation relation;
    GridFunction forcing;
    Index codomain_dim = 1;

    Kernel kernel;                   // plain problems (retardations empty)
    RetardedKernel retarded_kernel;  // retarded problems

    LipschitzFn lipschitz;                    // modulus L(t, s) for plain problems
    std::optional<GridFunction> lipschitz_s;  // set when L(t, s) = L(s); enables fast paths
    std::vector<Retardation> retardations;

    /// K(t, s, x) does not depend on t; the Picard step then integrates a
    /// single sampled integrand instead of one per output node.
    bool kernel_t_independent = false;
};

/// f(t) = F(t, f(phi_1(t)), ..., f(phi_n(t))).
using PresicMap =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>&)>;

struct PresicProblem {
    Grid grid;
    std::optional<Relation> relation;  // when present, phi_k(H(t)) <= H(t) is checked
    Index codomain_dim = 1;
    PresicMap map;
    std::vector<CoordMap> substitutions;
    std::vector<GridFunction> moduli;  // scalar L_k sampled at nodes
};

struct SolverConfig {
    double tol = 1e-10;
    int max_iter = 10000;
    double margin = 1e-6;
    InterpMode interpolation = InterpMode::multilinear;

    enum class InitialGuess { forcing, zero, provided };
    InitialGuess initial_guess = InitialGuess::forcing;
    GridFunction provided_guess;
};

struct ConvergenceReport {
    int iterations = 0;
    Certificate certificate;
    double final_increment = 0.0;   // d_p(x_n, x_{n-1})
    double posterior_bound = 0.0;   // q/(1-q) * final_increment
    double residual_sup = 0.0;      // sup ||x - Tx||
};

struct SolveResult {
    GridFunction solution;
    ConvergenceReport report;
};

/// The engine refuses to iterate on a failing certificate.
class CertificateError : public std::runtime_error {
public:
    CertificateError(std::string what, Certificate cert, Eigen::VectorXd argmax_coords)
        : std::runtime_error(std::move(what)),
          certificate(cert),
          argmax_coords(std::move(argmax_coords)) {}

    Certificate certificate;
    Eigen::VectorXd argmax_coords;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(std::string what, int iterations, double last_increment)
        : std::runtime_error(std::move(what)),
          iterations(iterations),
          last_increment(last_increment) {}

    int iterations;
    double last_increment;
};

/// A substitution phi_k fails phi_k(H(i)) <= H(i) at the coordinate level.
class AdmissibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One application of the Picard operator T.
GridFunction picard_step(const IntegralProblem& problem, const GridFunction& x,
                         InterpMode interpolation = InterpMode::multilinear);

/// Certificate for the problem's effective modulus under the given weight:
/// L(t,s) for plain problems, sum_k L_k(t,s) ell(phi_k(s)) for retarded ones.
Certificate certify_integral(const IntegralProblem& problem, const Weight& weight,
                             double margin = 1e-6,
                             InterpMode interpolation = InterpMode::multilinear);

/// Certified Picard solve. weight = nullopt builds the weight automatically
/// (the constructed-ell route). Throws CertificateError on a failing
/// certificate and NonConvergenceError past max_iter.
SolveResult solve_integral(const IntegralProblem& problem, std::optional<Weight> weight,
                           const SolverConfig& config);

/// Linear Fredholm equation x = f + integral A(t,s) x(s) dmu; the smallness
/// hypothesis is checked as a certificate with L = ||A|| (spectral norm) and
/// ell = 1.
SolveResult solve_linear_fredholm(const Grid& grid, const Measure& measure,
                                  const MatrixKernel& kernel, const GridFunction& forcing,
                                  const SolverConfig& config);

/// Linear Volterra equation; no smallness hypothesis, the weight is built
/// automatically with L0 = max ||A||.
SolveResult solve_linear_volterra(const Grid& grid, const Measure& measure,
                                  const MatrixKernel& kernel, const GridFunction& forcing,
                                  const SolverConfig& config);

/// Certificate q = max_i (1/ell(i)) sum_k L_k(i) ell(phi_k(t_i)).
Certificate certify_presic(const PresicProblem& problem, const Weight& weight,
                           double margin = 1e-6,
                           InterpMode interpolation = InterpMode::multilinear);

/// Presic-type fixed point solve; weight = nullopt uses ell = 1 (the
/// sum_k L_k(t) < 1 route).
SolveResult solve_presic(const PresicProblem& problem, std::optional<Weight> weight,
                         const SolverConfig& config);

/// sup_i ||x(i) - (Tx)(i)|| with a freshly assembled operator.
double residual(const IntegralProblem& problem, const GridFunction& x,
                InterpMode interpolation = InterpMode::multilinear);
double residual(const PresicProblem& problem, const GridFunction& x,
                InterpMode interpolation = InterpMode::multilinear);

/// Largest singular value; exact SVD for min(rows, cols) <= 4, power
/// iteration (50 steps, tol 1e-12) above.
double spectral_norm(const Eigen::MatrixXd& a);

}  // namespace picard
