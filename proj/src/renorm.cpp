#include "picard/renorm.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace picard {

namespace {

// In-place cumulative trapezoid along one grid axis: out(0) = 0,
// out(p) = out(p-1) + h/2 * (in(p-1) + in(p)) on every grid line.
void cumtrapz_axis(const Grid& grid, int k, Eigen::MatrixXd& v) {
    const Index M = grid.axis_size(k);
    const auto& c = grid.axis(k);
    Index stride = 1;
    for (int kk = grid.dimension() - 1; kk > k; --kk) stride *= grid.axis_size(kk);
    const Index block = M * stride;
    const Index N = v.rows();

    Eigen::RowVectorXd prev(v.cols()), cur(v.cols());
    for (Index outer = 0; outer < N; outer += block) {
        for (Index inner = 0; inner < stride; ++inner) {
            const Index start = outer + inner;
            prev = v.row(start);
            v.row(start).setZero();
            for (Index p = 1; p < M; ++p) {
                const Index idx = start + p * stride;
                cur = v.row(idx);
                v.row(idx) = v.row(idx - stride) + 0.5 * (c[p] - c[p - 1]) * (prev + cur);
                prev = cur;
            }
        }
    }
}

void check_core_map_inputs(const Grid& grid, const GridFunction& x, const Relation& relation,
                           const Measure& measure) {
    if (x.num_nodes() != grid.num_nodes() || relation.num_nodes() != grid.num_nodes() ||
        measure.weights.size() != grid.num_nodes())
        throw std::invalid_argument("core map: grid/function/relation/measure size mismatch");
}

// Shared Picard loop for weight construction. apply(ell) must evaluate the
// relevant weighted core map.
template <class ApplyFn>
Weight iterate_weight(Index num_nodes, ApplyFn&& apply, double tol, int max_iter) {
    Eigen::VectorXd ell = Eigen::VectorXd::Ones(num_nodes);
    double prev_inc = std::numeric_limits<double>::infinity();
    int growing = 0;
    for (int n = 1; n <= max_iter; ++n) {
        Eigen::VectorXd next = Eigen::VectorXd::Ones(num_nodes) + apply(ell);
        const double inc = (next - ell).cwiseAbs().maxCoeff();
        ell = std::move(next);
        if (!std::isfinite(inc))
            throw DivergenceError("weight iteration diverged (non-finite increment)", n, inc);
        if (inc <= tol) {
            GridFunction g;
            g.values = ell;
            return make_weight(std::move(g));
        }
        if (inc > prev_inc) {
            if (++growing >= 5)
                throw DivergenceError(
                    "weight iteration diverged: increments grew for 5 consecutive steps "
                    "(L0 * spectral radius >= 1 territory)",
                    n, inc);
        } else {
            growing = 0;
        }
        prev_inc = inc;
    }
    throw DivergenceError("weight iteration exceeded max_iter", max_iter, prev_inc);
}

}  // namespace

Weight make_weight(GridFunction ell) {
    if (ell.codomain_dim() != 1) throw std::invalid_argument("weight: ell must be scalar");
    if (!ell.finite() || !ell.positive())
        throw std::invalid_argument("weight: ell must be positive and finite everywhere");
    return Weight{std::move(ell)};
}

GridFunction core_map_apply(const Grid& grid, const GridFunction& x, const Relation& relation,
                            const Measure& measure) {
    check_core_map_inputs(grid, x, relation, measure);
    GridFunction out;

    if (relation.kind() == Relation::Kind::volterra) {
        out.values = x.values;
        for (int k = 0; k < grid.dimension(); ++k) cumtrapz_axis(grid, k, out.values);
        return out;
    }

    const Index N = grid.num_nodes();
    const Index m = x.codomain_dim();
    out.values.setZero(N, m);
    if (relation.kind() == Relation::Kind::full) {
        Eigen::RowVectorXd total = Eigen::RowVectorXd::Zero(m);
        for (Index j = 0; j < N; ++j) total += measure.weights[j] * x.values.row(j);
        out.values.rowwise() = total;
        return out;
    }
    for (Index i = 0; i < N; ++i) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(m);
        relation.for_each(i, [&](Index j) { acc += measure.weights[j] * x.values.row(j); });
        out.values.row(i) = acc;
    }
    return out;
}

GridFunction core_map_apply_pairwise(const Grid& grid, const GridFunction& x,
                                     const Relation& relation, const Measure& measure) {
    check_core_map_inputs(grid, x, relation, measure);
    const QuadratureRows rows(grid, measure, relation);
    GridFunction out;
    out.values.setZero(grid.num_nodes(), x.codomain_dim());
    for (Index i = 0; i < grid.num_nodes(); ++i) {
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(x.codomain_dim());
        rows.for_each(i, [&](Index j, double w) { acc += w * x.values.row(j); });
        out.values.row(i) = acc;
    }
    return out;
}

RadiusEstimate spectral_radius_sequence(const Grid& grid, const Relation& relation,
                                        const Measure& measure, int depth) {
    if (depth < 1) throw std::invalid_argument("spectral_radius_sequence: depth must be >= 1");
    RadiusEstimate est;
    est.depth = depth;
    est.r.resize(grid.num_nodes(), depth);
    GridFunction y = GridFunction::constant(grid.num_nodes(), 1, 1.0);
    for (int k = 1; k <= depth; ++k) {
        y = core_map_apply(grid, y, relation, measure);
        const double exponent = 1.0 / k;
        for (Index i = 0; i < grid.num_nodes(); ++i) {
            const double v = y.values(i, 0);
            est.r(i, k - 1) = v > 0.0 ? std::pow(v, exponent) : 0.0;
        }
    }
    return est;
}

double volterra_core_closed_form(const Eigen::VectorXd& t, int k) {
    if (k < 1) throw std::invalid_argument("volterra_core_closed_form: k must be >= 1");
    double vol = 1.0;
    for (Index i = 0; i < t.size(); ++i) {
        if (t[i] < 0.0)
            throw std::invalid_argument("volterra_core_closed_form: negative coordinate");
        vol *= t[i];
    }
    double kfact = 1.0;
    for (int p = 2; p <= k; ++p) kfact *= p;
    return std::pow(vol, k) / std::pow(kfact, static_cast<double>(t.size()));
}

double bielecki_distance(const GridFunction& x, const GridFunction& y, const Weight& weight) {
    if (x.num_nodes() != y.num_nodes() || x.codomain_dim() != y.codomain_dim())
        throw std::invalid_argument("bielecki_distance: shape mismatch between x and y");
    if (weight.ell.num_nodes() != x.num_nodes())
        throw std::invalid_argument("bielecki_distance: weight on a different grid");
    double d = 0.0;
    for (Index i = 0; i < x.num_nodes(); ++i) {
        const double v = (x.values.row(i) - y.values.row(i)).norm() / weight.ell.values(i, 0);
        if (v > d) d = v;
    }
    return d;
}

double sup_distance(const GridFunction& x, const GridFunction& y) {
    return bielecki_distance(x, y, Weight{GridFunction::constant(x.num_nodes(), 1, 1.0)});
}

Weight build_weight_constant_lipschitz(const Grid& grid, const Relation& relation,
                                       const Measure& measure, double L0, double tol,
                                       int max_iter) {
    if (L0 < 0.0) throw std::invalid_argument("build_weight_constant_lipschitz: L0 must be >= 0");
    return iterate_weight(
        grid.num_nodes(),
        [&](const Eigen::VectorXd& ell) -> Eigen::VectorXd {
            GridFunction g;
            g.values = ell;
            return L0 * core_map_apply(grid, g, relation, measure).values.col(0);
        },
        tol, max_iter);
}

Weight build_weight_general(const Grid& grid, const Relation& relation, const Measure& measure,
                            const GridFunction& modulus_s, double tol, int max_iter) {
    if (modulus_s.num_nodes() != grid.num_nodes() || modulus_s.codomain_dim() != 1)
        throw std::invalid_argument("build_weight_general: modulus_s must be scalar on the grid");
    return iterate_weight(
        grid.num_nodes(),
        [&](const Eigen::VectorXd& ell) -> Eigen::VectorXd {
            GridFunction g;
            g.values = modulus_s.values.col(0).cwiseProduct(ell);
            return core_map_apply(grid, g, relation, measure).values.col(0);
        },
        tol, max_iter);
}

Weight build_weight_general(const Grid& grid, const Relation& relation, const Measure& measure,
                            const LipschitzFn& modulus, double tol, int max_iter) {
    const auto coords = all_node_coords(grid);
    const QuadratureRows rows(grid, measure, relation);
    return iterate_weight(
        grid.num_nodes(),
        [&](const Eigen::VectorXd& ell) -> Eigen::VectorXd {
            Eigen::VectorXd out(grid.num_nodes());
            for (Index i = 0; i < grid.num_nodes(); ++i) {
                double acc = 0.0;
                rows.for_each(i, [&](Index j, double w) {
                    const double L = modulus(coords[static_cast<size_t>(i)],
                                             coords[static_cast<size_t>(j)]);
                    if (L < 0.0)
                        throw std::invalid_argument("build_weight_general: modulus is negative");
                    acc += w * L * ell[j];
                });
                out[i] = acc;
            }
            return out;
        },
        tol, max_iter);
}

Certificate contraction_factor(const Grid& grid, const Relation& relation, const Measure& measure,
                               const LipschitzFn& modulus, const Weight& weight, double margin) {
    if (weight.ell.num_nodes() != grid.num_nodes())
        throw std::invalid_argument("contraction_factor: weight on a different grid");
    if (margin <= 0.0 || margin >= 1.0)
        throw std::invalid_argument("contraction_factor: margin must lie in (0, 1)");

    const auto coords = all_node_coords(grid);
    const QuadratureRows rows(grid, measure, relation);
    Certificate cert;
    cert.margin = margin;
    for (Index i = 0; i < grid.num_nodes(); ++i) {
        double acc = 0.0;
        rows.for_each(i, [&](Index j, double w) {
            acc += w * modulus(coords[static_cast<size_t>(i)], coords[static_cast<size_t>(j)]) *
                   weight.ell.values(j, 0);
        });
        const double qi = acc / weight.ell.values(i, 0);
        if (qi > cert.q || cert.argmax_node < 0) {
            cert.q = qi;
            cert.argmax_node = i;
        }
    }
    cert.pass = cert.q <= 1.0 - margin;
    return cert;
}

Certificate contraction_factor(const Grid& grid, const Relation& relation, const Measure& measure,
                               const GridFunction& modulus_s, const Weight& weight,
                               double margin) {
    if (modulus_s.num_nodes() != grid.num_nodes() || modulus_s.codomain_dim() != 1)
        throw std::invalid_argument("contraction_factor: modulus_s must be scalar on the grid");
    if (weight.ell.num_nodes() != grid.num_nodes())
        throw std::invalid_argument("contraction_factor: weight on a different grid");
    if (margin <= 0.0 || margin >= 1.0)
        throw std::invalid_argument("contraction_factor: margin must lie in (0, 1)");

    GridFunction g;
    g.values = modulus_s.values.col(0).cwiseProduct(weight.ell.values.col(0));
    const GridFunction integrated = core_map_apply(grid, g, relation, measure);

    Certificate cert;
    cert.margin = margin;
    for (Index i = 0; i < grid.num_nodes(); ++i) {
        const double qi = integrated.values(i, 0) / weight.ell.values(i, 0);
        if (qi > cert.q || cert.argmax_node < 0) {
            cert.q = qi;
            cert.argmax_node = i;
        }
    }
    cert.pass = cert.q <= 1.0 - margin;
    return cert;
}

Weight exponential_weight(const Grid& grid, const GridFunction& modulus, double tau) {
    if (grid.dimension() != 1)
        throw std::invalid_argument("exponential_weight: grid must be 1-D");
    if (modulus.num_nodes() != grid.num_nodes() || modulus.codomain_dim() != 1)
        throw std::invalid_argument("exponential_weight: modulus must be scalar on the grid");
    const double left = grid.axis(0)[0];
    const double span = std::max(1.0, grid.axis(0)[grid.axis_size(0) - 1] - left);
    if (std::abs(tau - left) > 1e-12 * span)
        throw std::invalid_argument("exponential_weight: tau must be the leftmost node");

    Eigen::MatrixXd integral = modulus.values;
    cumtrapz_axis(grid, 0, integral);
    GridFunction ell;
    ell.values = integral.array().exp();
    return make_weight(std::move(ell));
}

std::optional<Weight> product_weight_f2(const GridFunction& L1, const GridFunction& L2,
                                        const Measure& measure, double margin) {
    if (L1.num_nodes() != measure.weights.size() || L2.num_nodes() != measure.weights.size() ||
        L1.codomain_dim() != 1 || L2.codomain_dim() != 1)
        throw std::invalid_argument("product_weight_f2: L1, L2 must be scalar on the grid");
    if ((L1.values.array() < 0.0).any() || (L2.values.array() < 0.0).any())
        throw std::invalid_argument("product_weight_f2: moduli must be nonnegative");

    const double int_l1l2 =
        (measure.weights.array() * L1.values.col(0).array() * L2.values.col(0).array()).sum();
    const double int_l2 = (measure.weights.array() * L2.values.col(0).array()).sum();
    if (int_l1l2 >= 1.0 - margin) return std::nullopt;

    const double c = int_l2 > 0.0 ? 0.5 * (1.0 - margin - int_l1l2) / int_l2 : 1.0;
    GridFunction ell;
    ell.values = L1.values.array() + c;
    return make_weight(std::move(ell));
}

double iterate_metric_distance(std::span<const double> base_distances, double q) {
    if (base_distances.empty())
        throw std::invalid_argument("iterate_metric_distance: needs at least one distance");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("iterate_metric_distance: q must lie in (0, 1)");
    const double k = static_cast<double>(base_distances.size());
    double d = 0.0;
    for (size_t j = 0; j < base_distances.size(); ++j)
        d += std::pow(q, -static_cast<double>(j) / k) * base_distances[j];
    return d;
}

}  // namespace picard
