#include "picard/cauchy.hpp"

#include <cmath>
#include <string>

namespace picard {

namespace {

void check_cauchy(const CauchyProblem& p) {
    if (!p.rhs) throw std::invalid_argument("cauchy problem: right-hand side missing");
    if (!p.boundary) throw std::invalid_argument("cauchy problem: boundary data missing");
    if (p.lipschitz.num_nodes() != p.grid.num_nodes() || p.lipschitz.codomain_dim() != 1)
        throw std::invalid_argument("cauchy problem: Lipschitz modulus must be scalar on the grid");
    for (int k = 0; k < p.grid.dimension(); ++k)
        if (p.grid.axis(k)[0] < 0.0)
            throw std::invalid_argument("cauchy problem: axis " + std::to_string(k) +
                                        " has negative coordinates");
}

}  // namespace

int DiagonalProjector::rank() const {
    int r = 0;
    for (uint8_t b : mask) r += b;
    return r;
}

Eigen::VectorXd DiagonalProjector::apply(const Eigen::VectorXd& t) const {
    if (static_cast<size_t>(t.size()) != mask.size())
        throw std::invalid_argument("projector: dimension mismatch");
    Eigen::VectorXd out(t.size());
    for (Index k = 0; k < t.size(); ++k) out[k] = mask[static_cast<size_t>(k)] ? t[k] : 0.0;
    return out;
}

std::vector<DiagonalProjector> enumerate_pi_n(int n) {
    if (n < 1 || n > 16) throw std::invalid_argument("enumerate_pi_n: n must lie in [1, 16]");
    std::vector<DiagonalProjector> out;
    out.reserve((1u << n) - 1);
    for (unsigned bits = 0; bits + 1 < (1u << n); ++bits) {
        DiagonalProjector p;
        p.mask.resize(static_cast<size_t>(n));
        // bit 0 is the first diagonal entry
        for (int k = 0; k < n; ++k) p.mask[static_cast<size_t>(k)] = (bits >> k) & 1u;
        out.push_back(std::move(p));
    }
    return out;
}

GridFunction boundary_to_forcing(const CauchyProblem& problem) {
    check_cauchy(problem);
    const int n = problem.grid.dimension();
    const auto projectors = enumerate_pi_n(n);

    GridFunction f;
    f.values.setZero(problem.grid.num_nodes(), problem.codomain_dim);
    for (Index i = 0; i < problem.grid.num_nodes(); ++i) {
        const Eigen::VectorXd t = problem.grid.node_coords(i);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(problem.codomain_dim);
        for (const auto& p : projectors) {
            const Eigen::VectorXd v = problem.boundary(p.apply(t));
            if (v.size() != problem.codomain_dim)
                throw std::invalid_argument("boundary_to_forcing: phi has wrong codomain");
            if (!v.allFinite())
                throw std::runtime_error("boundary_to_forcing: phi returned a non-finite value");
            const double sign = ((n - 1 - p.rank()) % 2 == 0) ? 1.0 : -1.0;
            acc += sign * v;
        }
        f.values.row(i) = acc.transpose();
    }
    return f;
}

SolveResult solve_cauchy(const CauchyProblem& problem, const SolverConfig& config) {
    check_cauchy(problem);
    IntegralProblem p{problem.grid, trapezoid_measure(problem.grid),
                      relation_volterra(problem.grid), boundary_to_forcing(problem),
                      problem.codomain_dim};
    // K(t, s, x) = F(s, x): t-independent, Lipschitz modulus depends on s only
    p.kernel = [&problem](const Eigen::VectorXd&, const Eigen::VectorXd& s,
                          const Eigen::VectorXd& x) { return problem.rhs(s, x); };
    p.kernel_t_independent = true;
    p.lipschitz_s = problem.lipschitz;
    return solve_integral(p, std::nullopt, config);
}

BoundaryReport check_boundary(const GridFunction& x, const CauchyProblem& problem, double tol) {
    check_cauchy(problem);
    if (x.num_nodes() != problem.grid.num_nodes() || x.codomain_dim() != problem.codomain_dim)
        throw std::invalid_argument("check_boundary: x shape mismatch");
    BoundaryReport rep;
    for (Index i = 0; i < problem.grid.num_nodes(); ++i) {
        const Eigen::VectorXd t = problem.grid.node_coords(i);
        if ((t.array() != 0.0).all()) continue;
        const double err = (x.values.row(i).transpose() - problem.boundary(t)).norm();
        if (err > rep.max_error || rep.argmax_node < 0) {
            rep.max_error = err;
            rep.argmax_node = i;
        }
    }
    rep.pass = rep.max_error <= tol;
    return rep;
}

double mixed_partial_residual(const GridFunction& x, const CauchyProblem& problem) {
    check_cauchy(problem);
    if (x.num_nodes() != problem.grid.num_nodes() || x.codomain_dim() != problem.codomain_dim)
        throw std::invalid_argument("mixed_partial_residual: x shape mismatch");
    const int n = problem.grid.dimension();
    for (int k = 0; k < n; ++k)
        if (problem.grid.axis_size(k) < 2)
            throw std::invalid_argument("mixed_partial_residual: axis " + std::to_string(k) +
                                        " is degenerate");

    const Grid& grid = problem.grid;
    double worst = 0.0;
    std::vector<Index> low(static_cast<size_t>(n)), corner(static_cast<size_t>(n));
    for (Index i = 0; i < grid.num_nodes(); ++i) {
        grid.multi_index(i, low);
        bool interior = true;
        double cell_vol = 1.0;
        for (int k = 0; k < n; ++k) {
            const Index a = low[static_cast<size_t>(k)];
            if (a + 1 >= grid.axis_size(k)) {
                interior = false;
                break;
            }
            cell_vol *= grid.axis(k)[a + 1] - grid.axis(k)[a];
        }
        if (!interior) continue;

        // fully mixed forward difference over the 2^n cell corners
        Eigen::VectorXd diff = Eigen::VectorXd::Zero(x.codomain_dim());
        for (unsigned bits = 0; bits < (1u << n); ++bits) {
            int ones = 0;
            for (int k = 0; k < n; ++k) {
                const bool hi = (bits >> k) & 1u;
                corner[static_cast<size_t>(k)] = low[static_cast<size_t>(k)] + (hi ? 1 : 0);
                ones += hi;
            }
            const double sign = ((n - ones) % 2 == 0) ? 1.0 : -1.0;
            diff += sign * x.values.row(grid.lex_index(corner)).transpose();
        }
        diff /= cell_vol;

        const Eigen::VectorXd t = grid.node_coords(i);
        const double err = (diff - problem.rhs(t, x.values.row(i).transpose())).norm();
        if (err > worst) worst = err;
    }
    return worst;
}

}  // namespace picard
