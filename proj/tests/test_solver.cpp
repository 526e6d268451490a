#include "picard/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace picard;

namespace {

Grid uniform_1d(Index n) {
    return build_tensor_grid({Eigen::VectorXd::LinSpaced(n, 0.0, 1.0)});
}

Eigen::VectorXd scalar(double v) {
    Eigen::VectorXd out(1);
    out[0] = v;
    return out;
}

IntegralProblem volterra_exp_problem(Index n, double a) {
    const Grid g = uniform_1d(n);
    IntegralProblem p{g, trapezoid_measure(g), relation_volterra(g),
                      GridFunction::constant(g.num_nodes(), 1, 1.0), 1};
    p.kernel = [a](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd& x) {
        return scalar(a * x[0]);
    };
    p.kernel_t_independent = true;
    p.lipschitz = [a](const Eigen::VectorXd&, const Eigen::VectorXd&) { return a; };
    p.lipschitz_s = GridFunction::constant(g.num_nodes(), 1, a);
    return p;
}

IntegralProblem fredholm_separable_problem(Index n) {
    const Grid g = uniform_1d(n);
    IntegralProblem p{g, trapezoid_measure(g), relation_full(g),
                      GridFunction::sample_scalar(g, [](const Eigen::VectorXd& t) {
                          return t[0];
                      }),
                      1};
    p.kernel = [](const Eigen::VectorXd& t, const Eigen::VectorXd& s, const Eigen::VectorXd& x) {
        return scalar(t[0] * s[0] * x[0] / 2.0);
    };
    p.lipschitz = [](const Eigen::VectorXd& t, const Eigen::VectorXd& s) {
        return t[0] * s[0] / 2.0;
    };
    return p;
}

}  // namespace

TEST_CASE("one Picard step of the linear Volterra operator") {
    const IntegralProblem p = volterra_exp_problem(101, 1.0);
    const GridFunction x1 = picard_step(p, p.forcing);
    for (Index i = 0; i < p.grid.num_nodes(); ++i)
        CHECK(x1.values(i, 0) ==
              doctest::Approx(1.0 + p.grid.node_coords(i)[0]).epsilon(1e-13));
}

TEST_CASE("separable Fredholm equation solves to (6/5)t") {
    const IntegralProblem p = fredholm_separable_problem(201);
    const SolveResult res = solve_integral(p, std::nullopt, SolverConfig{});
    double worst = 0.0;
    for (Index i = 0; i < p.grid.num_nodes(); ++i)
        worst = std::max(worst,
                         std::abs(res.solution.values(i, 0) - 1.2 * p.grid.node_coords(i)[0]));
    CHECK(worst < 1e-4);
    CHECK(res.report.certificate.pass);
    CHECK(res.report.posterior_bound >= 0.0);
    CHECK(res.report.residual_sup < 1e-8);
}

TEST_CASE("the engine refuses to iterate on a failing certificate") {
    const Grid g = uniform_1d(101);
    IntegralProblem p{g, trapezoid_measure(g), relation_full(g),
                      GridFunction::constant(g.num_nodes(), 1, 1.0), 1};
    p.kernel = [](const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd& x) {
        return scalar(3.0 * x[0]);
    };
    p.lipschitz = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 3.0; };

    const Weight one = make_weight(GridFunction::constant(g.num_nodes(), 1, 1.0));
    try {
        solve_integral(p, one, SolverConfig{});
        FAIL("expected CertificateError");
    } catch (const CertificateError& e) {
        CHECK(e.certificate.q == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(!e.certificate.pass);
        CHECK(e.argmax_coords.size() == 1);
    }
}

TEST_CASE("iteration cap raises NonConvergenceError") {
    const IntegralProblem p = volterra_exp_problem(201, 1.0);
    SolverConfig cfg;
    cfg.max_iter = 1;
    cfg.tol = 1e-12;
    CHECK_THROWS_AS(solve_integral(p, std::nullopt, cfg), NonConvergenceError);
}

TEST_CASE("auto weight solves the non-contractive Volterra problem") {
    const IntegralProblem p = volterra_exp_problem(401, 3.0);
    const SolveResult res = solve_integral(p, std::nullopt, SolverConfig{});
    double worst = 0.0;
    for (Index i = 0; i < p.grid.num_nodes(); ++i)
        worst = std::max(worst, std::abs(res.solution.values(i, 0) -
                                         std::exp(3.0 * p.grid.node_coords(i)[0])));
    CHECK(worst < 2e-3);
    CHECK(res.report.certificate.q < 1.0);
}

TEST_CASE("linear Fredholm front end") {
    const Grid g = uniform_1d(201);
    const GridFunction f =
        GridFunction::sample_scalar(g, [](const Eigen::VectorXd& t) { return t[0]; });
    const auto kernel = [](const Eigen::VectorXd& t, const Eigen::VectorXd& s) {
        Eigen::MatrixXd a(1, 1);
        a(0, 0) = t[0] * s[0] / 2.0;
        return a;
    };
    const SolveResult res = solve_linear_fredholm(g, trapezoid_measure(g), kernel, f,
                                                  SolverConfig{});
    for (Index i = 0; i < g.num_nodes(); ++i)
        CHECK(res.solution.values(i, 0) ==
              doctest::Approx(1.2 * g.node_coords(i)[0]).epsilon(1e-4));
}

TEST_CASE("linear Volterra front end") {
    const Grid g = uniform_1d(401);
    const GridFunction f = GridFunction::constant(g.num_nodes(), 1, 1.0);
    const auto kernel = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
        return Eigen::MatrixXd::Identity(1, 1).eval();
    };
    const SolveResult res =
        solve_linear_volterra(g, trapezoid_measure(g), kernel, f, SolverConfig{});
    double worst = 0.0;
    for (Index i = 0; i < g.num_nodes(); ++i)
        worst = std::max(worst, std::abs(res.solution.values(i, 0) -
                                         std::exp(g.node_coords(i)[0])));
    CHECK(worst < 5e-4);
}

TEST_CASE("retarded pantograph equation") {
    const Grid g = uniform_1d(401);
    IntegralProblem p{g, trapezoid_measure(g), relation_volterra(g),
                      GridFunction::constant(g.num_nodes(), 1, 1.0), 1};
    p.retarded_kernel = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                           const std::vector<Eigen::VectorXd>& xs) { return xs[0]; };
    p.kernel_t_independent = true;
    p.retardations.push_back(
        {[](const Eigen::VectorXd& s) { return (s / 2.0).eval(); },
         [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 1.0; }});

    const SolveResult res = solve_integral(p, std::nullopt, SolverConfig{});

    // power series: x(1) = sum over k of 2^{-k(k-1)/2} / k!
    double exact = 0.0, term = 1.0;
    for (int k = 0; k < 30; ++k) {
        exact += term;
        term /= std::pow(2.0, k) * (k + 1.0);
    }
    CHECK(std::abs(res.solution.values(g.num_nodes() - 1, 0) - exact) < 2e-3);
}

TEST_CASE("inadmissible retardation is rejected") {
    const Grid g = uniform_1d(51);
    IntegralProblem p{g, trapezoid_measure(g), relation_volterra(g),
                      GridFunction::constant(g.num_nodes(), 1, 1.0), 1};
    p.retarded_kernel = [](const Eigen::VectorXd&, const Eigen::VectorXd&,
                           const std::vector<Eigen::VectorXd>& xs) { return xs[0]; };
    p.retardations.push_back(
        {[](const Eigen::VectorXd& s) { return (s * 2.0).eval(); },
         [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 0.1; }});
    CHECK_THROWS_AS(solve_integral(p, std::nullopt, SolverConfig{}), AdmissibilityError);
}

TEST_CASE("Presic halving equation solves to 4t/3 with q exactly one half") {
    const Grid g = uniform_1d(401);
    PresicProblem p{g, relation_volterra(g), 1};
    p.map = [](const Eigen::VectorXd& t, const std::vector<Eigen::VectorXd>& xs) {
        return Eigen::VectorXd::Constant(1, t[0] + xs[0][0] / 2.0).eval();
    };
    p.substitutions.push_back([](const Eigen::VectorXd& t) { return (t / 2.0).eval(); });
    p.moduli.push_back(GridFunction::constant(g.num_nodes(), 1, 0.5));

    const Weight one = make_weight(GridFunction::constant(g.num_nodes(), 1, 1.0));
    const Certificate cert = certify_presic(p, one);
    CHECK(cert.q == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cert.pass);

    const SolveResult res = solve_presic(p, std::nullopt, SolverConfig{});
    double worst = 0.0;
    for (Index i = 0; i < g.num_nodes(); ++i)
        worst = std::max(worst,
                         std::abs(res.solution.values(i, 0) - 4.0 * g.node_coords(i)[0] / 3.0));
    CHECK(worst < 1e-4);
    CHECK(residual(p, res.solution) < 1e-8);
}

TEST_CASE("Presic substitutions must map the domain into itself") {
    const Grid g = uniform_1d(21);
    PresicProblem p{g, relation_volterra(g), 1};
    p.map = [](const Eigen::VectorXd&, const std::vector<Eigen::VectorXd>& xs) { return xs[0]; };
    p.substitutions.push_back(
        [](const Eigen::VectorXd& t) { return (t.array() + 0.2).matrix().eval(); });
    p.moduli.push_back(GridFunction::constant(g.num_nodes(), 1, 0.1));
    CHECK_THROWS_AS(solve_presic(p, std::nullopt, SolverConfig{}), AdmissibilityError);
}

TEST_CASE("initial guess modes") {
    const IntegralProblem p = volterra_exp_problem(101, 1.0);
    SolverConfig cfg;
    cfg.initial_guess = SolverConfig::InitialGuess::zero;
    const SolveResult a = solve_integral(p, std::nullopt, cfg);

    cfg.initial_guess = SolverConfig::InitialGuess::provided;
    cfg.provided_guess = a.solution;
    const SolveResult b = solve_integral(p, std::nullopt, cfg);
    CHECK(b.report.iterations <= 2);
    CHECK(sup_distance(a.solution, b.solution) < 1e-9);
}

TEST_CASE("residual vanishes at a fixed point of the discrete operator") {
    const IntegralProblem p = volterra_exp_problem(201, 1.0);
    SolverConfig cfg;
    cfg.tol = 1e-13;
    const SolveResult res = solve_integral(p, std::nullopt, cfg);
    CHECK(residual(p, res.solution) < 1e-11);
}

TEST_CASE("spectral norm") {
    Eigen::MatrixXd a(1, 1);
    a << -5.0;
    CHECK(spectral_norm(a) == doctest::Approx(5.0));

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -4.0;
    CHECK(spectral_norm(d) == doctest::Approx(4.0));

    // rank-one 5 x 6 matrix exercises the power-iteration path
    Eigen::VectorXd u(5), v(6);
    u << 1, 2, 3, 4, 5;
    v.setOnes();
    CHECK(spectral_norm(u * v.transpose()) ==
          doctest::Approx(std::sqrt(55.0 * 6.0)).epsilon(1e-9));
}
