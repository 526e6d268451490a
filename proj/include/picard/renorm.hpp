#pragma once

#include "picard/grid.hpp"

#include <functional>
#include <optional>

namespace picard {

/// Bielecki weight: a positive scalar grid function ell. The metric weight
/// p = 1/ell is never materialized.
struct Weight {
    GridFunction ell;
};

/// Validates positivity and finiteness of ell.
Weight make_weight(GridFunction ell);

/// Contraction certificate: q is the exact per-node maximum of the weighted
/// Lipschitz integral; pass <=> q <= 1 - margin.
struct Certificate {
    double q = 0.0;
    double margin = 1e-6;
    bool pass = false;
    Index argmax_node = -1;
};

/// Finite spectral-radius sequence r_k(i) = ((Lambda^k 1)(i))^(1/k), k = 1..depth.
struct RadiusEstimate {
    Eigen::MatrixXd r;  // N x depth, column k-1 holds r_k
    int depth = 0;
};

/// Kernel Lipschitz modulus L(t, s), evaluable at node coordinate pairs.
using LipschitzFn = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// Signalled when the weight-building iteration fails to converge, i.e. the
/// series sum L0^k (Lambda^k 1) is in divergent territory.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::string what, int iterations, double last_increment)
        : std::runtime_error(std::move(what)),
          iterations(iterations),
          last_increment(last_increment) {}

    int iterations;
    double last_increment;
};

/// (Lambda x)(i) = integral of x over H(i). For Volterra relations the
/// integral uses trapezoid weights of the sub-grid [0, t_i] (computed as
/// per-axis cumulative trapezoid sums); otherwise global weights masked
/// to H(i), summed in ascending node order.
GridFunction core_map_apply(const Grid& grid, const GridFunction& x, const Relation& relation,
                            const Measure& measure);

/// Like core_map_apply for Volterra relations, evaluated by brute-force
/// per-pair summation with explicitly restricted sub-grid weights. Slow;
/// reference path for tests.
GridFunction core_map_apply_pairwise(const Grid& grid, const GridFunction& x,
                                     const Relation& relation, const Measure& measure);

RadiusEstimate spectral_radius_sequence(const Grid& grid, const Relation& relation,
                                        const Measure& measure, int depth);

/// (t_1...t_n)^k / (k!)^n, the exact value of (Lambda^k 1)(t) for the
/// Volterra relation under Lebesgue measure on [0, t].
double volterra_core_closed_form(const Eigen::VectorXd& t, int k);

/// d_p(x, y) = max_i (1/ell(i)) * ||x(i) - y(i)||_2.
double bielecki_distance(const GridFunction& x, const GridFunction& y, const Weight& weight);

/// Sup distance, i.e. bielecki_distance with ell = 1.
double sup_distance(const GridFunction& x, const GridFunction& y);

/// Solves ell = 1 + L0 * Lambda(ell) by Picard iteration from ell = 1.
/// Throws DivergenceError when increments grow for 5 consecutive steps or
/// max_iter is exceeded.
Weight build_weight_constant_lipschitz(const Grid& grid, const Relation& relation,
                                       const Measure& measure, double L0, double tol = 1e-12,
                                       int max_iter = 10000);

/// Solves ell(t) = 1 + integral over H(t) of L(t,s) ell(s) dmu(s).
Weight build_weight_general(const Grid& grid, const Relation& relation, const Measure& measure,
                            const LipschitzFn& modulus, double tol = 1e-12, int max_iter = 10000);

/// Same equation with L(t, s) = modulus_s(s); uses the fast core-map path.
Weight build_weight_general(const Grid& grid, const Relation& relation, const Measure& measure,
                            const GridFunction& modulus_s, double tol = 1e-12,
                            int max_iter = 10000);

/// q = max_i (1/ell(i)) * sum_{j in H(i)} w_j L(i,j) ell(j). A q >= 1 is a
/// failing certificate, not an error.
Certificate contraction_factor(const Grid& grid, const Relation& relation, const Measure& measure,
                               const LipschitzFn& modulus, const Weight& weight,
                               double margin = 1e-6);

/// s-only modulus variant, L(t, s) = modulus_s(s).
Certificate contraction_factor(const Grid& grid, const Relation& relation, const Measure& measure,
                               const GridFunction& modulus_s, const Weight& weight,
                               double margin = 1e-6);

/// ell(t) = exp(cumulative trapezoid integral of L from tau to t) on a 1-D
/// grid; tau must be the leftmost node.
Weight exponential_weight(const Grid& grid, const GridFunction& modulus, double tau);

/// Weight for product moduli L(t,s) = (L1(t)+c) L2(s): picks c from the
/// closed-form bound and returns ell = L1 + c, or nullopt when the
/// hypothesis integral L1*L2 dmu < 1 - margin fails.
std::optional<Weight> product_weight_f2(const GridFunction& L1, const GridFunction& L2,
                                        const Measure& measure, double margin = 1e-6);

/// Iterate-remetrization distance d_k(x,y) = sum_j q^(-j/k) d(T^j x, T^j y)
/// for j = 0..k-1, where q is the contraction factor of T^k.
double iterate_metric_distance(std::span<const double> base_distances, double q);

}  // namespace picard
