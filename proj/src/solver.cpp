#include "picard/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace picard {

namespace {

void check_problem_shapes(const IntegralProblem& p) {
    if (p.forcing.num_nodes() != p.grid.num_nodes() ||
        p.forcing.codomain_dim() != p.codomain_dim)
        throw std::invalid_argument("integral problem: forcing shape mismatch");
    if (!p.forcing.finite())
        throw std::invalid_argument("integral problem: forcing has non-finite values");
    if (p.relation.num_nodes() != p.grid.num_nodes() ||
        p.measure.weights.size() != p.grid.num_nodes())
        throw std::invalid_argument("integral problem: relation/measure size mismatch");
    if (p.retardations.empty() && !p.kernel)
        throw std::invalid_argument("integral problem: kernel missing");
    if (!p.retardations.empty() && !p.retarded_kernel)
        throw std::invalid_argument("integral problem: retarded kernel missing");
}

[[noreturn]] void throw_nonfinite(Index i, Index j) {
    throw std::runtime_error("kernel returned a non-finite value at node pair (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
}

// Interpolated substitution values sub[j][k] = x(phi_k(s_j)).
std::vector<std::vector<Eigen::VectorXd>> substituted_values(
    const IntegralProblem& p, const GridFunction& x,
    const std::vector<Eigen::VectorXd>& coords, InterpMode interp) {
    const size_t r = p.retardations.size();
    std::vector<std::vector<Eigen::VectorXd>> sub(coords.size(),
                                                  std::vector<Eigen::VectorXd>(r));
    for (size_t j = 0; j < coords.size(); ++j)
        for (size_t k = 0; k < r; ++k)
            sub[j][k] = interpolate(p.grid, x, p.retardations[k].map(coords[j]), interp);
    return sub;
}

// Discrete check of phi(H(i)) <= H(i): phi(s) must stay inside the
// coordinate box spanned by H(i) for every i with s in H(i).
void check_substitution_admissible(const Grid& grid, const Relation& relation,
                                   const CoordMap& phi, const std::string& label) {
    const auto coords = all_node_coords(grid);
    const Eigen::VectorXd lower = grid.lower_corner();
    const Eigen::VectorXd upper = grid.upper_corner();
    Eigen::VectorXd slack(grid.dimension());
    for (int k = 0; k < grid.dimension(); ++k)
        slack[k] = 1e-12 * std::max(1.0, upper[k] - lower[k]);

    std::vector<Eigen::VectorXd> image(coords.size());
    for (size_t j = 0; j < coords.size(); ++j) {
        image[j] = phi(coords[j]);
        if (image[j].size() != grid.dimension())
            throw AdmissibilityError(label + ": substitution image has wrong dimension");
    }

    auto in_box = [&](const Eigen::VectorXd& p, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
        return (p.array() >= lo.array() - slack.array()).all() &&
               (p.array() <= hi.array() + slack.array()).all();
    };

    switch (relation.kind()) {
        case Relation::Kind::volterra:
            // phi(s) in [lower, s] for all s is equivalent to phi(H(t)) <= H(t)
            // for all t, by reflexivity.
            for (size_t j = 0; j < coords.size(); ++j)
                if (!in_box(image[j], lower, coords[j]))
                    throw AdmissibilityError(label + ": substitution leaves H(t) at node " +
                                             std::to_string(j));
            return;
        case Relation::Kind::full:
            for (size_t j = 0; j < coords.size(); ++j)
                if (!in_box(image[j], lower, upper))
                    throw AdmissibilityError(label + ": substitution leaves the domain at node " +
                                             std::to_string(j));
            return;
        case Relation::Kind::general: {
            const double inf = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < grid.num_nodes(); ++i) {
                Eigen::VectorXd lo = Eigen::VectorXd::Constant(grid.dimension(), inf);
                Eigen::VectorXd hi = Eigen::VectorXd::Constant(grid.dimension(), -inf);
                relation.for_each(i, [&](Index j) {
                    lo = lo.cwiseMin(coords[static_cast<size_t>(j)]);
                    hi = hi.cwiseMax(coords[static_cast<size_t>(j)]);
                });
                bool ok = true;
                Index bad = -1;
                relation.for_each(i, [&](Index j) {
                    if (ok && !in_box(image[static_cast<size_t>(j)], lo, hi)) {
                        ok = false;
                        bad = j;
                    }
                });
                if (!ok)
                    throw AdmissibilityError(label + ": substitution leaves H(" +
                                             std::to_string(i) + ") at node " +
                                             std::to_string(bad));
            }
            return;
        }
    }
}

Weight auto_weight(const IntegralProblem& p) {
    if (!p.retardations.empty()) {
        // No constructed-ell analogue exists for the retarded inequality; use
        // L0 = max over relation pairs of sum_k L_k and verify the retarded
        // certificate afterwards.
        const auto coords = all_node_coords(p.grid);
        double L0 = 0.0;
        for (Index i = 0; i < p.grid.num_nodes(); ++i)
            p.relation.for_each(i, [&](Index j) {
                double sum = 0.0;
                for (const auto& ret : p.retardations)
                    sum += ret.modulus(coords[static_cast<size_t>(i)],
                                       coords[static_cast<size_t>(j)]);
                if (sum > L0) L0 = sum;
            });
        return build_weight_constant_lipschitz(p.grid, p.relation, p.measure, L0);
    }
    if (p.lipschitz_s)
        return build_weight_general(p.grid, p.relation, p.measure, *p.lipschitz_s);
    if (!p.lipschitz)
        throw std::invalid_argument("solve_integral: auto weight needs a Lipschitz modulus");
    return build_weight_general(p.grid, p.relation, p.measure, p.lipschitz);
}

GridFunction initial_guess(const GridFunction& forcing, const SolverConfig& config) {
    switch (config.initial_guess) {
        case SolverConfig::InitialGuess::forcing:
            return forcing;
        case SolverConfig::InitialGuess::zero:
            return GridFunction::constant(forcing.num_nodes(), forcing.codomain_dim(), 0.0);
        case SolverConfig::InitialGuess::provided:
            if (config.provided_guess.num_nodes() != forcing.num_nodes() ||
                config.provided_guess.codomain_dim() != forcing.codomain_dim())
                throw std::invalid_argument("solve: provided initial guess shape mismatch");
            return config.provided_guess;
    }
    return forcing;
}

}  // namespace

double spectral_norm(const Eigen::MatrixXd& a) {
    if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
    if (std::min(a.rows(), a.cols()) <= 4) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        return svd.singularValues()[0];
    }
    // power iteration on A^T A
    const Eigen::MatrixXd ata = a.transpose() * a;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(ata.cols()).normalized();
    double lambda = 0.0;
    for (int step = 0; step < 50; ++step) {
        Eigen::VectorXd w = ata * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        w /= norm;
        const double next = w.dot(ata * w);
        const bool settled = std::abs(next - lambda) <= 1e-12 * std::max(1.0, std::abs(next));
        lambda = next;
        v = std::move(w);
        if (settled) break;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

GridFunction picard_step(const IntegralProblem& problem, const GridFunction& x,
                         InterpMode interpolation) {
    check_problem_shapes(problem);
    if (x.num_nodes() != problem.grid.num_nodes() || x.codomain_dim() != problem.codomain_dim)
        throw std::invalid_argument("picard_step: x shape mismatch");

    const auto coords = all_node_coords(problem.grid);
    const Index N = problem.grid.num_nodes();
    const Index m = problem.codomain_dim;
    const bool retarded = !problem.retardations.empty();

    std::vector<std::vector<Eigen::VectorXd>> sub;
    if (retarded) sub = substituted_values(problem, x, coords, interpolation);

    GridFunction out;
    if (problem.kernel_t_independent) {
        GridFunction integrand;
        integrand.values.resize(N, m);
        for (Index j = 0; j < N; ++j) {
            const Eigen::VectorXd v =
                retarded ? problem.retarded_kernel(coords[static_cast<size_t>(j)],
                                                   coords[static_cast<size_t>(j)],
                                                   sub[static_cast<size_t>(j)])
                         : problem.kernel(coords[static_cast<size_t>(j)],
                                          coords[static_cast<size_t>(j)],
                                          x.values.row(j).transpose());
            if (!v.allFinite()) throw_nonfinite(j, j);
            integrand.values.row(j) = v.transpose();
        }
        out = core_map_apply(problem.grid, integrand, problem.relation, problem.measure);
        out.values += problem.forcing.values;
        return out;
    }

    const QuadratureRows rows(problem.grid, problem.measure, problem.relation);
    out.values.resize(N, m);
    for (Index i = 0; i < N; ++i) {
        Eigen::RowVectorXd acc = problem.forcing.values.row(i);
        rows.for_each(i, [&](Index j, double w) {
            const Eigen::VectorXd v =
                retarded ? problem.retarded_kernel(coords[static_cast<size_t>(i)],
                                                   coords[static_cast<size_t>(j)],
                                                   sub[static_cast<size_t>(j)])
                         : problem.kernel(coords[static_cast<size_t>(i)],
                                          coords[static_cast<size_t>(j)],
                                          x.values.row(j).transpose());
            if (!v.allFinite()) throw_nonfinite(i, j);
            acc += w * v.transpose();
        });
        out.values.row(i) = acc;
    }
    return out;
}

Certificate certify_integral(const IntegralProblem& problem, const Weight& weight, double margin,
                             InterpMode interpolation) {
    check_problem_shapes(problem);
    if (problem.retardations.empty()) {
        if (problem.lipschitz_s)
            return contraction_factor(problem.grid, problem.relation, problem.measure,
                                      *problem.lipschitz_s, weight, margin);
        if (!problem.lipschitz)
            throw std::invalid_argument("certify_integral: Lipschitz modulus missing");
        return contraction_factor(problem.grid, problem.relation, problem.measure,
                                  problem.lipschitz, weight, margin);
    }

    // retarded: q_i = (1/ell_i) sum_j w sum_k L_k(t_i, s_j) ell(phi_k(s_j))
    const auto coords = all_node_coords(problem.grid);
    const size_t r = problem.retardations.size();
    Eigen::MatrixXd ell_phi(problem.grid.num_nodes(), static_cast<Index>(r));
    for (Index j = 0; j < problem.grid.num_nodes(); ++j)
        for (size_t k = 0; k < r; ++k)
            ell_phi(j, static_cast<Index>(k)) =
                interpolate(problem.grid, weight.ell,
                            problem.retardations[k].map(coords[static_cast<size_t>(j)]),
                            interpolation)(0);

    const QuadratureRows rows(problem.grid, problem.measure, problem.relation);
    Certificate cert;
    cert.margin = margin;
    for (Index i = 0; i < problem.grid.num_nodes(); ++i) {
        double acc = 0.0;
        rows.for_each(i, [&](Index j, double w) {
            for (size_t k = 0; k < r; ++k)
                acc += w *
                       problem.retardations[k].modulus(coords[static_cast<size_t>(i)],
                                                       coords[static_cast<size_t>(j)]) *
                       ell_phi(j, static_cast<Index>(k));
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

SolveResult solve_integral(const IntegralProblem& problem, std::optional<Weight> weight,
                           const SolverConfig& config) {
    check_problem_shapes(problem);
    for (size_t k = 0; k < problem.retardations.size(); ++k)
        check_substitution_admissible(problem.grid, problem.relation,
                                      problem.retardations[k].map,
                                      "retardation phi_" + std::to_string(k + 1));

    const Weight w = weight ? std::move(*weight) : auto_weight(problem);
    const Certificate cert = certify_integral(problem, w, config.margin, config.interpolation);
    if (!cert.pass)
        throw CertificateError("certificate failed: q = " + std::to_string(cert.q), cert,
                               problem.grid.node_coords(cert.argmax_node));

    const double factor = cert.q / (1.0 - cert.q);
    GridFunction x = initial_guess(problem.forcing, config);
    double increment = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= config.max_iter; ++n) {
        GridFunction next = picard_step(problem, x, config.interpolation);
        increment = bielecki_distance(next, x, w);
        x = std::move(next);
        if (factor * increment <= config.tol) {
            SolveResult result;
            result.report.iterations = n;
            result.report.certificate = cert;
            result.report.final_increment = increment;
            result.report.posterior_bound = factor * increment;
            result.report.residual_sup = residual(problem, x, config.interpolation);
            result.solution = std::move(x);
            return result;
        }
    }
    throw NonConvergenceError("Picard iteration did not reach tolerance within max_iter",
                              config.max_iter, increment);
}

SolveResult solve_linear_fredholm(const Grid& grid, const Measure& measure,
                                  const MatrixKernel& kernel, const GridFunction& forcing,
                                  const SolverConfig& config) {
    IntegralProblem p{grid, measure, relation_full(grid), forcing, forcing.codomain_dim()};
    p.kernel = [&kernel](const Eigen::VectorXd& t, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& x) -> Eigen::VectorXd { return kernel(t, s) * x; };
    p.lipschitz = [&kernel](const Eigen::VectorXd& t, const Eigen::VectorXd& s) {
        return spectral_norm(kernel(t, s));
    };
    Weight uniform{GridFunction::constant(grid.num_nodes(), 1, 1.0)};
    return solve_integral(p, std::move(uniform), config);
}

SolveResult solve_linear_volterra(const Grid& grid, const Measure& measure,
                                  const MatrixKernel& kernel, const GridFunction& forcing,
                                  const SolverConfig& config) {
    IntegralProblem p{grid, measure, relation_volterra(grid), forcing, forcing.codomain_dim()};
    p.kernel = [&kernel](const Eigen::VectorXd& t, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& x) -> Eigen::VectorXd { return kernel(t, s) * x; };
    p.lipschitz = [&kernel](const Eigen::VectorXd& t, const Eigen::VectorXd& s) {
        return spectral_norm(kernel(t, s));
    };

    const auto coords = all_node_coords(grid);
    double L0 = 0.0;
    for (Index i = 0; i < grid.num_nodes(); ++i)
        p.relation.for_each(i, [&](Index j) {
            L0 = std::max(L0, p.lipschitz(coords[static_cast<size_t>(i)],
                                          coords[static_cast<size_t>(j)]));
        });
    Weight w =
        build_weight_constant_lipschitz(grid, p.relation, measure, L0);
    return solve_integral(p, std::move(w), config);
}

namespace {

void check_presic_shapes(const PresicProblem& p) {
    if (!p.map) throw std::invalid_argument("presic problem: map missing");
    if (p.substitutions.size() != p.moduli.size())
        throw std::invalid_argument("presic problem: one modulus per substitution required");
    if (p.substitutions.empty())
        throw std::invalid_argument("presic problem: needs at least one substitution");
    for (const auto& L : p.moduli)
        if (L.num_nodes() != p.grid.num_nodes() || L.codomain_dim() != 1)
            throw std::invalid_argument("presic problem: modulus must be scalar on the grid");
    if (p.relation && p.relation->num_nodes() != p.grid.num_nodes())
        throw std::invalid_argument("presic problem: relation size mismatch");
}

GridFunction presic_step(const PresicProblem& p, const GridFunction& x,
                         const std::vector<Eigen::VectorXd>& coords, InterpMode interp) {
    const size_t r = p.substitutions.size();
    GridFunction out;
    out.values.resize(p.grid.num_nodes(), p.codomain_dim);
    std::vector<Eigen::VectorXd> args(r);
    for (Index i = 0; i < p.grid.num_nodes(); ++i) {
        for (size_t k = 0; k < r; ++k)
            args[k] = interpolate(p.grid, x, p.substitutions[k](coords[static_cast<size_t>(i)]),
                                  interp);
        const Eigen::VectorXd v = p.map(coords[static_cast<size_t>(i)], args);
        if (!v.allFinite()) throw_nonfinite(i, i);
        out.values.row(i) = v.transpose();
    }
    return out;
}

}  // namespace

Certificate certify_presic(const PresicProblem& problem, const Weight& weight, double margin,
                           InterpMode interpolation) {
    check_presic_shapes(problem);
    const auto coords = all_node_coords(problem.grid);
    Certificate cert;
    cert.margin = margin;
    for (Index i = 0; i < problem.grid.num_nodes(); ++i) {
        double acc = 0.0;
        for (size_t k = 0; k < problem.substitutions.size(); ++k) {
            const double ell_phi =
                interpolate(problem.grid, weight.ell,
                            problem.substitutions[k](coords[static_cast<size_t>(i)]),
                            interpolation)(0);
            acc += problem.moduli[k].values(i, 0) * ell_phi;
        }
        const double qi = acc / weight.ell.values(i, 0);
        if (qi > cert.q || cert.argmax_node < 0) {
            cert.q = qi;
            cert.argmax_node = i;
        }
    }
    cert.pass = cert.q <= 1.0 - margin;
    return cert;
}

SolveResult solve_presic(const PresicProblem& problem, std::optional<Weight> weight,
                         const SolverConfig& config) {
    check_presic_shapes(problem);
    if (problem.relation)
        for (size_t k = 0; k < problem.substitutions.size(); ++k)
            check_substitution_admissible(problem.grid, *problem.relation,
                                          problem.substitutions[k],
                                          "substitution phi_" + std::to_string(k + 1));

    const Weight w = weight ? std::move(*weight)
                            : Weight{GridFunction::constant(problem.grid.num_nodes(), 1, 1.0)};
    const Certificate cert = certify_presic(problem, w, config.margin, config.interpolation);
    if (!cert.pass)
        throw CertificateError("certificate failed: q = " + std::to_string(cert.q), cert,
                               problem.grid.node_coords(cert.argmax_node));

    const auto coords = all_node_coords(problem.grid);
    const double factor = cert.q / (1.0 - cert.q);

    GridFunction x;
    const GridFunction zero =
        GridFunction::constant(problem.grid.num_nodes(), problem.codomain_dim, 0.0);
    switch (config.initial_guess) {
        case SolverConfig::InitialGuess::forcing:
            // no forcing term exists here; start from one step out of zero
            x = presic_step(problem, zero, coords, config.interpolation);
            break;
        case SolverConfig::InitialGuess::zero:
            x = zero;
            break;
        case SolverConfig::InitialGuess::provided:
            if (config.provided_guess.num_nodes() != problem.grid.num_nodes() ||
                config.provided_guess.codomain_dim() != problem.codomain_dim)
                throw std::invalid_argument("solve_presic: provided initial guess shape mismatch");
            x = config.provided_guess;
            break;
    }

    double increment = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= config.max_iter; ++n) {
        GridFunction next = presic_step(problem, x, coords, config.interpolation);
        increment = bielecki_distance(next, x, w);
        x = std::move(next);
        if (factor * increment <= config.tol) {
            SolveResult result;
            result.report.iterations = n;
            result.report.certificate = cert;
            result.report.final_increment = increment;
            result.report.posterior_bound = factor * increment;
            result.report.residual_sup = residual(problem, x, config.interpolation);
            result.solution = std::move(x);
            return result;
        }
    }
    throw NonConvergenceError("Presic iteration did not reach tolerance within max_iter",
                              config.max_iter, increment);
}

double residual(const IntegralProblem& problem, const GridFunction& x, InterpMode interpolation) {
    return sup_distance(x, picard_step(problem, x, interpolation));
}

double residual(const PresicProblem& problem, const GridFunction& x, InterpMode interpolation) {
    check_presic_shapes(problem);
    const auto coords = all_node_coords(problem.grid);
    return sup_distance(x, presic_step(problem, x, coords, interpolation));
}

}  // namespace picard
