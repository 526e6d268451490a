#include "picard/renorm.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace picard;

namespace {

Grid uniform_1d(Index n) {
    return build_tensor_grid({Eigen::VectorXd::LinSpaced(n, 0.0, 1.0)});
}

}  // namespace

TEST_CASE("core map on the Volterra relation reproduces the closed form") {
    const Grid g = uniform_1d(401);
    const Relation r = relation_volterra(g);
    const Measure m = trapezoid_measure(g);

    GridFunction y = GridFunction::constant(g.num_nodes(), 1, 1.0);
    y = core_map_apply(g, y, r, m);
    // trapezoid integrates constants exactly: (Lambda 1)(t) = t
    for (Index i = 0; i < g.num_nodes(); ++i)
        CHECK(y.values(i, 0) == doctest::Approx(g.node_coords(i)[0]).epsilon(1e-14));

    for (int k = 2; k <= 5; ++k) {
        y = core_map_apply(g, y, r, m);
        const double exact = volterra_core_closed_form(Eigen::VectorXd::Ones(1), k);
        CHECK(y.values(g.num_nodes() - 1, 0) == doctest::Approx(exact).epsilon(1e-4));
    }
}

TEST_CASE("core map closed form values and preconditions") {
    Eigen::VectorXd t(1);
    t << 1.0;
    CHECK(volterra_core_closed_form(t, 3) == doctest::Approx(1.0 / 6.0));
    Eigen::VectorXd t2(2);
    t2 << 1.0, 0.5;
    CHECK(volterra_core_closed_form(t2, 2) == doctest::Approx(0.25 / 4.0));
    t[0] = -1.0;
    CHECK_THROWS_AS(volterra_core_closed_form(t, 1), std::invalid_argument);
    t[0] = 1.0;
    CHECK_THROWS_AS(volterra_core_closed_form(t, 0), std::invalid_argument);
}

TEST_CASE("core map on the full relation integrates over the whole box") {
    const Grid g = uniform_1d(51);
    const GridFunction x =
        GridFunction::sample_scalar(g, [](const Eigen::VectorXd& t) { return t[0]; });
    const GridFunction y = core_map_apply(g, x, relation_full(g), trapezoid_measure(g));
    for (Index i = 0; i < g.num_nodes(); ++i)
        CHECK(y.values(i, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fast and pairwise core map agree on a 2-D Volterra relation") {
    const Grid g = build_tensor_grid({Eigen::VectorXd::LinSpaced(7, 0.0, 1.0),
                                      Eigen::VectorXd::LinSpaced(5, 0.0, 2.0)});
    const Relation r = relation_volterra(g);
    const Measure m = trapezoid_measure(g);
    const GridFunction x = GridFunction::sample_scalar(
        g, [](const Eigen::VectorXd& t) { return std::cos(t[0]) + t[1] * t[1]; });

    const GridFunction a = core_map_apply(g, x, r, m);
    const GridFunction b = core_map_apply_pairwise(g, x, r, m);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spectral radius sequence") {
    const Grid g = uniform_1d(401);
    const Measure m = trapezoid_measure(g);

    const RadiusEstimate full = spectral_radius_sequence(g, relation_full(g), m, 4);
    CHECK(full.depth == 4);
    for (int k = 0; k < 4; ++k)
        CHECK(full.r(0, k) == doctest::Approx(1.0).epsilon(1e-10));

    const RadiusEstimate vol = spectral_radius_sequence(g, relation_volterra(g), m, 8);
    const Index top = g.num_nodes() - 1;
    // r_8(1) = (1/8!)^(1/8)
    CHECK(vol.r(top, 7) == doctest::Approx(std::pow(1.0 / 40320.0, 0.125)).epsilon(2e-3));
    for (int k = 1; k < 8; ++k) CHECK(vol.r(top, k) <= vol.r(top, k - 1) + 1e-12);
}

TEST_CASE("bielecki distance and the sup distance") {
    const Grid g = uniform_1d(5);
    GridFunction x = GridFunction::constant(g.num_nodes(), 1, 1.0);
    GridFunction y = GridFunction::constant(g.num_nodes(), 1, 3.0);
    y.values(2, 0) = 6.0;

    CHECK(sup_distance(x, y) == doctest::Approx(5.0));

    GridFunction ell = GridFunction::constant(g.num_nodes(), 1, 1.0);
    ell.values(2, 0) = 10.0;
    const Weight w = make_weight(ell);
    CHECK(bielecki_distance(x, y, w) == doctest::Approx(2.0));
}

TEST_CASE("make_weight validates positivity") {
    CHECK_THROWS_AS(make_weight(GridFunction::constant(3, 1, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(make_weight(GridFunction::constant(3, 2, 1.0)), std::invalid_argument);
}

TEST_CASE("constructed weight for a constant Volterra modulus approximates exp(L0 t)") {
    const Grid g = uniform_1d(401);
    const Weight w =
        build_weight_constant_lipschitz(g, relation_volterra(g), trapezoid_measure(g), 1.0);
    double worst = 0.0;
    for (Index i = 0; i < g.num_nodes(); ++i)
        worst = std::max(worst,
                         std::abs(w.ell.values(i, 0) - std::exp(g.node_coords(i)[0])));
    CHECK(worst < 1e-4);
}

TEST_CASE("weight construction diverges for a supercritical full-relation modulus") {
    const Grid g = uniform_1d(51);
    CHECK_THROWS_AS(
        build_weight_constant_lipschitz(g, relation_full(g), trapezoid_measure(g), 2.0),
        DivergenceError);
}

TEST_CASE("general weight construction matches the constant-modulus path") {
    const Grid g = uniform_1d(101);
    const Relation r = relation_volterra(g);
    const Measure m = trapezoid_measure(g);
    const Weight a = build_weight_constant_lipschitz(g, r, m, 1.5);
    const Weight b =
        build_weight_general(g, r, m, [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
            return 1.5;
        });
    const Weight c = build_weight_general(g, r, m, GridFunction::constant(g.num_nodes(), 1, 1.5));
    CHECK((a.ell.values - b.ell.values).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((a.ell.values - c.ell.values).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("contraction factor is exact for a constant Fredholm modulus") {
    const Grid g = uniform_1d(101);
    const Weight one = make_weight(GridFunction::constant(g.num_nodes(), 1, 1.0));
    const Certificate cert = contraction_factor(
        g, relation_full(g), trapezoid_measure(g),
        GridFunction::constant(g.num_nodes(), 1, 3.0), one);
    CHECK(cert.q == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(!cert.pass);

    const Certificate small = contraction_factor(
        g, relation_full(g), trapezoid_measure(g),
        GridFunction::constant(g.num_nodes(), 1, 0.5), one);
    CHECK(small.q == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(small.pass);
}

TEST_CASE("constructed weight certifies a non-contractive Volterra modulus") {
    const Grid g = uniform_1d(201);
    const Relation r = relation_volterra(g);
    const Measure m = trapezoid_measure(g);
    const GridFunction mod = GridFunction::constant(g.num_nodes(), 1, 1.0);

    const Weight one = make_weight(GridFunction::constant(g.num_nodes(), 1, 1.0));
    CHECK(contraction_factor(g, r, m, mod, one).q == doctest::Approx(1.0).epsilon(1e-12));

    const Weight w = build_weight_general(g, r, m, mod);
    const Certificate cert = contraction_factor(g, r, m, mod, w);
    // ell solves ell = 1 + Lambda(ell), so q = 1 - 1/ell(1) = 1 - 1/e
    CHECK(cert.q == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-4));
    CHECK(cert.pass);
    CHECK(cert.argmax_node == g.num_nodes() - 1);
}

TEST_CASE("lipschitz-function and sampled-modulus certificates agree") {
    const Grid g = uniform_1d(41);
    const Relation r = relation_volterra(g);
    const Measure m = trapezoid_measure(g);
    const GridFunction mod =
        GridFunction::sample_scalar(g, [](const Eigen::VectorXd& s) { return 1.0 + s[0]; });
    const Weight w = build_weight_general(g, r, m, mod);

    const Certificate a = contraction_factor(g, r, m, mod, w);
    const Certificate b = contraction_factor(
        g, r, m,
        [](const Eigen::VectorXd&, const Eigen::VectorXd& s) { return 1.0 + s[0]; }, w);
    CHECK(a.q == doctest::Approx(b.q).epsilon(1e-13));
}

TEST_CASE("exponential weight matches exp of the cumulative modulus integral") {
    const Grid g = uniform_1d(401);
    const GridFunction mod = GridFunction::constant(g.num_nodes(), 1, 3.0);
    const Weight w = exponential_weight(g, mod, 0.0);
    for (Index i = 0; i < g.num_nodes(); ++i)
        CHECK(w.ell.values(i, 0) ==
              doctest::Approx(std::exp(3.0 * g.node_coords(i)[0])).epsilon(1e-12));

    CHECK_THROWS_AS(exponential_weight(g, mod, 0.5), std::invalid_argument);
    const Grid g2 = build_tensor_grid({Eigen::VectorXd::LinSpaced(3, 0.0, 1.0),
                                       Eigen::VectorXd::LinSpaced(3, 0.0, 1.0)});
    CHECK_THROWS_AS(exponential_weight(g2, GridFunction::constant(9, 1, 1.0), 0.0),
                    std::invalid_argument);
}

TEST_CASE("product weight construction") {
    const Grid g = uniform_1d(201);
    const Measure m = trapezoid_measure(g);
    const GridFunction l1 =
        GridFunction::sample_scalar(g, [](const Eigen::VectorXd& t) { return t[0]; });
    const GridFunction l2 =
        GridFunction::sample_scalar(g, [](const Eigen::VectorXd& s) { return s[0] / 2.0; });

    const auto w = product_weight_f2(l1, l2, m);
    REQUIRE(w.has_value());
    // ell = L1 + c with a constant offset
    const Eigen::VectorXd diff = w->ell.values.col(0) - l1.values.col(0);
    CHECK((diff.array() - diff[0]).abs().maxCoeff() < 1e-14);
    CHECK(diff[0] > 0.0);

    // the certificate for L(t,s) = L1(t) L2(s) passes under ell
    const Certificate cert = contraction_factor(
        g, relation_full(g), m,
        [](const Eigen::VectorXd& t, const Eigen::VectorXd& s) { return t[0] * s[0] / 2.0; },
        *w);
    CHECK(cert.pass);

    // integral of L1 L2 equal to 1: infeasible
    const GridFunction ones = GridFunction::constant(g.num_nodes(), 1, 1.0);
    CHECK(!product_weight_f2(ones, ones, m).has_value());
}

TEST_CASE("iterate metric distance") {
    const std::array<double, 2> d = {1.0, 1.0};
    // q = 1/4, k = 2: 1 + q^{-1/2} = 3
    CHECK(iterate_metric_distance(d, 0.25) == doctest::Approx(3.0));
    CHECK_THROWS_AS(iterate_metric_distance(d, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(iterate_metric_distance(d, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(iterate_metric_distance(std::span<const double>{}, 0.5),
                    std::invalid_argument);
}
