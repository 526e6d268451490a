#include "picard/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace picard::cli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// Splits "phi1" into ("phi", 1); plain keys get index 0.
std::pair<std::string, int> split_indexed(const std::string& key) {
    size_t p = key.size();
    while (p > 0 && std::isdigit(static_cast<unsigned char>(key[p - 1]))) --p;
    if (p == key.size() || p == 0) return {key, 0};
    return {key.substr(0, p), std::stoi(key.substr(p))};
}

void store_indexed(std::vector<std::string>& vec, int index, const std::string& value,
                   const std::string& key, int line) {
    if (index < 1) throw ConfigError("key " + key + ": indices are 1-based", line);
    if (vec.size() < static_cast<size_t>(index)) vec.resize(static_cast<size_t>(index));
    if (!vec[static_cast<size_t>(index - 1)].empty())
        throw ConfigError("duplicate key " + key, line);
    vec[static_cast<size_t>(index - 1)] = value;
}

double parse_num(const std::string& s, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key " + key + ": expected a number, got '" + s + "'", line);
    }
}

std::set<std::string> point_vars(const std::string& prefix, int n) {
    std::set<std::string> out;
    for (int k = 1; k <= n; ++k) out.insert(prefix + std::to_string(k));
    if (n == 1) out.insert(prefix);
    return out;
}

void bind_point(expr::EvalContext& ctx, const std::string& prefix, const Eigen::VectorXd& v) {
    for (Index k = 0; k < v.size(); ++k) ctx[prefix + std::to_string(k + 1)] = v[k];
    if (v.size() == 1) ctx[prefix] = v[0];
}

std::set<std::string> join(std::set<std::string> a, const std::set<std::string>& b) {
    a.insert(b.begin(), b.end());
    return a;
}

bool uses_prefix(const expr::Expr& e, const std::string& prefix) {
    for (const auto& name : expr::variables(e))
        if (name.rfind(prefix, 0) == 0) return true;
    return false;
}

/// Splits on commas at parenthesis depth zero, for vector-valued fields.
std::vector<std::string> split_components(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    size_t start = 0;
    for (size_t p = 0; p < s.size(); ++p) {
        if (s[p] == '(') ++depth;
        if (s[p] == ')') --depth;
        if (s[p] == ',' && depth == 0) {
            out.push_back(trim(s.substr(start, p - start)));
            start = p + 1;
        }
    }
    out.push_back(trim(s.substr(start)));
    return out;
}

expr::Expr parse_field(const std::string& text, const std::set<std::string>& vars,
                       const std::string& key) {
    try {
        return expr::parse(text, vars);
    } catch (const expr::ParseError& e) {
        throw ConfigError("key " + key + ": " + e.what(), 0);
    }
}

std::vector<expr::Expr> parse_fields(const std::vector<std::string>& texts,
                                     const std::set<std::string>& vars, const std::string& key,
                                     size_t expected) {
    if (texts.size() != expected)
        throw ConfigError("key " + key + ": expected " + std::to_string(expected) +
                          " entries, got " + std::to_string(texts.size()));
    std::vector<expr::Expr> out;
    out.reserve(texts.size());
    for (size_t k = 0; k < texts.size(); ++k) {
        if (texts[k].empty())
            throw ConfigError("key " + key + std::to_string(k + 1) + " is missing");
        out.push_back(parse_field(texts[k], vars, key + std::to_string(k + 1)));
    }
    return out;
}

/// phi_k as a coordinate map; comma-separated components, one per axis.
CoordMap make_coord_map(const std::string& text, const std::string& prefix, int n,
                        const std::string& key) {
    const auto parts = split_components(text);
    if (parts.size() != static_cast<size_t>(n))
        throw ConfigError("key " + key + ": expected " + std::to_string(n) +
                          " comma-separated components");
    std::vector<expr::Expr> comps;
    const auto vars = point_vars(prefix, n);
    for (size_t k = 0; k < parts.size(); ++k)
        comps.push_back(parse_field(parts[k], vars, key));
    return [comps, prefix, n](const Eigen::VectorXd& p) {
        expr::EvalContext ctx;
        bind_point(ctx, prefix, p);
        Eigen::VectorXd out(n);
        for (int k = 0; k < n; ++k) out[k] = comps[static_cast<size_t>(k)].eval(ctx);
        return out;
    };
}

GridFunction sample_scalar_field(const Grid& grid, const expr::Expr& e) {
    return GridFunction::sample_scalar(grid, [&](const Eigen::VectorXd& t) {
        expr::EvalContext ctx;
        bind_point(ctx, "t", t);
        return e.eval(ctx);
    });
}

/// Scalar field evaluated with both t and s bound to the same point, so
/// weight-related moduli may be written in either variable.
GridFunction sample_scalar_field_ts(const Grid& grid, const expr::Expr& e) {
    return GridFunction::sample_scalar(grid, [&](const Eigen::VectorXd& t) {
        expr::EvalContext ctx;
        bind_point(ctx, "t", t);
        bind_point(ctx, "s", t);
        return e.eval(ctx);
    });
}

void require_kind(const ProblemConfig& c, std::initializer_list<const char*> kinds) {
    for (const char* k : kinds)
        if (c.kind == k) return;
    throw ConfigError("kind " + c.kind + " is not valid for this operation");
}

}  // namespace

ProblemConfig parse_config_text(const std::string& text) {
    ProblemConfig c;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    bool have_kind = false, have_m = false;
    std::vector<std::string> single_f, single_k;

    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;

        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value", line);
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line);
        if (value.empty()) throw ConfigError("key " + key + ": empty value", line);

        if (key == "kind") {
            if (have_kind) throw ConfigError("duplicate key kind", line);
            c.kind = value;
            have_kind = true;
        } else if (key == "axis") {
            std::istringstream av(value);
            AxisSpec a;
            long long count = 0;
            if (!(av >> a.lo >> a.hi >> count) || !(av >> std::ws).eof())
                throw ConfigError("axis: expected 'lo hi count'", line);
            if (count < 2) throw ConfigError("axis: node count must be at least 2", line);
            if (!(a.lo < a.hi)) throw ConfigError("axis: need lo < hi", line);
            a.count = count;
            c.axes.push_back(a);
        } else if (key == "m") {
            if (have_m) throw ConfigError("duplicate key m", line);
            const double v = parse_num(value, key, line);
            if (v < 1 || v != std::floor(v)) throw ConfigError("m must be a positive integer", line);
            c.m = static_cast<Index>(v);
            have_m = true;
        } else if (key == "f") {
            store_indexed(single_f, 1, value, key, line);
        } else if (key == "K" || key == "F") {
            store_indexed(single_k, 1, value, key, line);
        } else if (key == "L") {
            if (!c.lipschitz.empty()) throw ConfigError("duplicate key L", line);
            c.lipschitz = value;
        } else if (key == "boundary") {
            store_indexed(c.boundary, 1, value, key, line);
        } else if (key == "weight") {
            if (value.rfind("expr:", 0) == 0) {
                c.weight_mode = "expr";
                c.weight_expr = trim(value.substr(5));
                if (c.weight_expr.empty())
                    throw ConfigError("weight = expr: needs an expression", line);
            } else {
                c.weight_mode = value;
            }
        } else if (key == "weightL1") {
            c.weight_l1 = value;
        } else if (key == "weightL2") {
            c.weight_l2 = value;
        } else if (key == "tol") {
            c.solver.tol = parse_num(value, key, line);
        } else if (key == "max_iter") {
            c.solver.max_iter = static_cast<int>(parse_num(value, key, line));
        } else if (key == "margin") {
            c.solver.margin = parse_num(value, key, line);
        } else if (key == "interpolation") {
            if (value == "multilinear")
                c.solver.interpolation = InterpMode::multilinear;
            else if (value == "nearest")
                c.solver.interpolation = InterpMode::nearest;
            else
                throw ConfigError("interpolation must be multilinear or nearest", line);
        } else if (key == "initial_guess") {
            if (value == "forcing")
                c.solver.initial_guess = SolverConfig::InitialGuess::forcing;
            else if (value == "zero")
                c.solver.initial_guess = SolverConfig::InitialGuess::zero;
            else
                throw ConfigError("initial_guess must be forcing or zero", line);
        } else {
            const auto [base, index] = split_indexed(key);
            if (base == "f" && index > 0)
                store_indexed(c.forcing, index, value, key, line);
            else if ((base == "K" || base == "F") && index > 0)
                store_indexed(c.kernel, index, value, key, line);
            else if (base == "L" && index > 0)
                store_indexed(c.moduli, index, value, key, line);
            else if (base == "phi" && index > 0)
                store_indexed(c.substitutions, index, value, key, line);
            else if (base == "boundary" && index > 0)
                store_indexed(c.boundary, index, value, key, line);
            else
                throw ConfigError("unknown key " + key, line);
        }
    }

    // bare f / K are shorthands for f1 / K1
    if (!single_f.empty()) {
        if (!c.forcing.empty()) throw ConfigError("both f and f1 given");
        c.forcing = single_f;
    }
    if (!single_k.empty()) {
        if (!c.kernel.empty()) throw ConfigError("both K and K1 (or F and F1) given");
        c.kernel = single_k;
    }

    if (!have_kind) throw ConfigError("missing key kind");
    if (c.kind != "fredholm" && c.kind != "volterra" && c.kind != "retarded" &&
        c.kind != "presic" && c.kind != "cauchy")
        throw ConfigError("unknown kind " + c.kind);
    if (c.axes.empty()) throw ConfigError("at least one axis line is required");
    if (c.weight_mode != "auto" && c.weight_mode != "uniform" && c.weight_mode != "exponential" &&
        c.weight_mode != "expr" && c.weight_mode != "product")
        throw ConfigError("weight must be auto, uniform, exponential, expr, or product");
    if (c.weight_mode == "expr" && c.weight_expr.empty())
        throw ConfigError("weight = expr: needs an expression, e.g. weight = expr: exp(3*t)");
    return c;
}

ProblemConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

Grid make_grid(const ProblemConfig& config) {
    std::vector<Eigen::VectorXd> axes;
    axes.reserve(config.axes.size());
    for (const auto& a : config.axes)
        axes.push_back(Eigen::VectorXd::LinSpaced(a.count, a.lo, a.hi));
    return build_tensor_grid(std::move(axes));
}

IntegralProblem make_integral_problem(const ProblemConfig& config, const Grid& grid) {
    require_kind(config, {"fredholm", "volterra", "retarded"});
    const int n = grid.dimension();
    const Index m = config.m;
    const auto tv = point_vars("t", n);
    const auto sv = point_vars("s", n);

    IntegralProblem p{grid, trapezoid_measure(grid),
                      config.kind == "fredholm" ? relation_full(grid) : relation_volterra(grid),
                      GridFunction{}, m};

    const auto f_exprs = parse_fields(config.forcing, tv, "f", static_cast<size_t>(m));
    p.forcing = GridFunction::sample(grid, m, [&](const Eigen::VectorXd& t) {
        expr::EvalContext ctx;
        bind_point(ctx, "t", t);
        Eigen::VectorXd out(m);
        for (Index j = 0; j < m; ++j) out[j] = f_exprs[static_cast<size_t>(j)].eval(ctx);
        return out;
    });

    // retarded problems carry per-substitution moduli L1..Lr instead of L
    if (config.kind != "retarded") {
        if (config.lipschitz.empty()) throw ConfigError("missing key L");
        const auto l_expr = parse_field(config.lipschitz, join(tv, sv), "L");
        p.lipschitz = [l_expr](const Eigen::VectorXd& t, const Eigen::VectorXd& s) {
            expr::EvalContext ctx;
            bind_point(ctx, "t", t);
            bind_point(ctx, "s", s);
            return l_expr.eval(ctx);
        };
        if (!uses_prefix(l_expr, "t")) {
            p.lipschitz_s = GridFunction::sample_scalar(grid, [&](const Eigen::VectorXd& s) {
                expr::EvalContext ctx;
                bind_point(ctx, "s", s);
                return l_expr.eval(ctx);
            });
        }
    }

    if (config.kind == "retarded") {
        if (m != 1) throw ConfigError("retarded problems are scalar (m = 1) in config files");
        const size_t r = config.substitutions.size();
        if (r == 0) throw ConfigError("retarded problems need at least one phi key");
        if (config.moduli.size() != r)
            throw ConfigError("need one Lk per phik (got " + std::to_string(config.moduli.size()) +
                              " moduli for " + std::to_string(r) + " substitutions)");
        for (size_t k = 0; k < r; ++k) {
            Retardation ret;
            ret.map = make_coord_map(config.substitutions[k], "s", n,
                                     "phi" + std::to_string(k + 1));
            const auto lk =
                parse_field(config.moduli[k], join(tv, sv), "L" + std::to_string(k + 1));
            ret.modulus = [lk](const Eigen::VectorXd& t, const Eigen::VectorXd& s) {
                expr::EvalContext ctx;
                bind_point(ctx, "t", t);
                bind_point(ctx, "s", s);
                return lk.eval(ctx);
            };
            p.retardations.push_back(std::move(ret));
        }
        const auto xv = point_vars("x", static_cast<int>(r));
        const auto k_exprs = parse_fields(config.kernel, join(join(tv, sv), xv), "K", 1);
        const auto ke = k_exprs[0];
        p.retarded_kernel = [ke, r](const Eigen::VectorXd& t, const Eigen::VectorXd& s,
                                    const std::vector<Eigen::VectorXd>& xs) {
            expr::EvalContext ctx;
            bind_point(ctx, "t", t);
            bind_point(ctx, "s", s);
            for (size_t k = 0; k < r; ++k) ctx["x" + std::to_string(k + 1)] = xs[k][0];
            if (r == 1) ctx["x"] = xs[0][0];
            Eigen::VectorXd out(1);
            out[0] = ke.eval(ctx);
            return out;
        };
        p.kernel_t_independent = !uses_prefix(ke, "t");
        return p;
    }

    const auto xv = point_vars("x", static_cast<int>(m));
    const auto k_exprs =
        parse_fields(config.kernel, join(join(tv, sv), xv), "K", static_cast<size_t>(m));
    bool t_free = true;
    for (const auto& e : k_exprs) t_free = t_free && !uses_prefix(e, "t");
    p.kernel = [k_exprs, m](const Eigen::VectorXd& t, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& x) {
        expr::EvalContext ctx;
        bind_point(ctx, "t", t);
        bind_point(ctx, "s", s);
        bind_point(ctx, "x", x);
        Eigen::VectorXd out(m);
        for (Index j = 0; j < m; ++j) out[j] = k_exprs[static_cast<size_t>(j)].eval(ctx);
        return out;
    };
    p.kernel_t_independent = t_free;
    return p;
}

PresicProblem make_presic_problem(const ProblemConfig& config, const Grid& grid) {
    require_kind(config, {"presic"});
    if (config.m != 1) throw ConfigError("presic problems are scalar (m = 1) in config files");
    const int n = grid.dimension();
    const size_t r = config.substitutions.size();
    if (r == 0) throw ConfigError("presic problems need at least one phi key");
    if (config.moduli.size() != r)
        throw ConfigError("need one Lk per phik (got " + std::to_string(config.moduli.size()) +
                          " moduli for " + std::to_string(r) + " substitutions)");

    PresicProblem p{grid, relation_volterra(grid), 1};

    const auto tv = point_vars("t", n);
    for (size_t k = 0; k < r; ++k) {
        p.substitutions.push_back(
            make_coord_map(config.substitutions[k], "t", n, "phi" + std::to_string(k + 1)));
        const auto lk = parse_field(config.moduli[k], tv, "L" + std::to_string(k + 1));
        p.moduli.push_back(sample_scalar_field(grid, lk));
    }

    const auto xv = point_vars("x", static_cast<int>(r));
    const auto f_exprs = parse_fields(config.kernel, join(tv, xv), "F", 1);
    const auto fe = f_exprs[0];
    p.map = [fe, r](const Eigen::VectorXd& t, const std::vector<Eigen::VectorXd>& xs) {
        expr::EvalContext ctx;
        bind_point(ctx, "t", t);
        for (size_t k = 0; k < r; ++k) ctx["x" + std::to_string(k + 1)] = xs[k][0];
        if (r == 1) ctx["x"] = xs[0][0];
        Eigen::VectorXd out(1);
        out[0] = fe.eval(ctx);
        return out;
    };
    return p;
}

CauchyProblem make_cauchy_problem(const ProblemConfig& config, const Grid& grid) {
    require_kind(config, {"cauchy"});
    const int n = grid.dimension();
    const Index m = config.m;
    const auto tv = point_vars("t", n);
    const auto xv = point_vars("x", static_cast<int>(m));

    CauchyProblem p{grid, m};

    const auto f_exprs = parse_fields(config.kernel, join(tv, xv), "F", static_cast<size_t>(m));
    p.rhs = [f_exprs, m](const Eigen::VectorXd& t, const Eigen::VectorXd& x) {
        expr::EvalContext ctx;
        bind_point(ctx, "t", t);
        bind_point(ctx, "x", x);
        Eigen::VectorXd out(m);
        for (Index j = 0; j < m; ++j) out[j] = f_exprs[static_cast<size_t>(j)].eval(ctx);
        return out;
    };

    if (config.lipschitz.empty()) throw ConfigError("missing key L");
    p.lipschitz = sample_scalar_field_ts(grid, parse_field(config.lipschitz, tv, "L"));

    const auto b_exprs = parse_fields(config.boundary, tv, "boundary", static_cast<size_t>(m));
    p.boundary = [b_exprs, m](const Eigen::VectorXd& t) {
        expr::EvalContext ctx;
        bind_point(ctx, "t", t);
        Eigen::VectorXd out(m);
        for (Index j = 0; j < m; ++j) out[j] = b_exprs[static_cast<size_t>(j)].eval(ctx);
        return out;
    };
    return p;
}

std::optional<Weight> make_configured_weight(const ProblemConfig& config, const Grid& grid) {
    const int n = grid.dimension();
    if (config.weight_mode == "auto") return std::nullopt;
    if (config.weight_mode == "uniform")
        return make_weight(GridFunction::constant(grid.num_nodes(), 1, 1.0));
    if (config.weight_mode == "exponential") {
        if (n != 1) throw ConfigError("weight = exponential needs a 1-D grid");
        if (config.lipschitz.empty()) throw ConfigError("weight = exponential needs key L");
        const auto vars = join(point_vars("t", 1), point_vars("s", 1));
        const auto modulus =
            sample_scalar_field_ts(grid, parse_field(config.lipschitz, vars, "L"));
        return exponential_weight(grid, modulus, grid.axis(0)[0]);
    }
    if (config.weight_mode == "expr") {
        const auto e = parse_field(config.weight_expr, point_vars("t", n), "weight");
        return make_weight(sample_scalar_field(grid, e));
    }
    // product: ell = L1 + c per the product-modulus construction
    if (config.weight_l1.empty() || config.weight_l2.empty())
        throw ConfigError("weight = product needs weightL1 and weightL2");
    const auto vars = [&](const char* pfx) {
        return join(point_vars("t", n), point_vars(pfx, n));
    };
    const auto l1 = sample_scalar_field(grid, parse_field(config.weight_l1, point_vars("t", n),
                                                          "weightL1"));
    const auto l2e = parse_field(config.weight_l2, vars("s"), "weightL2");
    const auto l2 = sample_scalar_field_ts(grid, l2e);
    const Measure measure = trapezoid_measure(grid);
    auto w = product_weight_f2(l1, l2, measure, config.solver.margin);
    if (!w) {
        Certificate cert;
        cert.q = (l1.values.col(0).array() * l2.values.col(0).array() *
                  measure.weights.array()).sum();
        cert.margin = config.solver.margin;
        cert.pass = false;
        throw CertificateError("product weight construction infeasible", cert, Eigen::VectorXd());
    }
    return w;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_coord_header(std::ostream& out, int n) {
    for (int k = 0; k < n; ++k) out << "t" << (k + 1) << ",";
}

void write_coords(std::ostream& out, const Eigen::VectorXd& t) {
    for (Index k = 0; k < t.size(); ++k) out << format_double(t[k]) << ",";
}

}  // namespace

void write_solution_csv(std::ostream& out, const Grid& grid, const GridFunction& x) {
    write_coord_header(out, grid.dimension());
    for (Index j = 0; j < x.codomain_dim(); ++j) out << "x" << (j + 1) << (j + 1 < x.codomain_dim() ? "," : "");
    out << "\n";
    for (Index i = 0; i < grid.num_nodes(); ++i) {
        write_coords(out, grid.node_coords(i));
        for (Index j = 0; j < x.codomain_dim(); ++j)
            out << format_double(x.values(i, j)) << (j + 1 < x.codomain_dim() ? "," : "");
        out << "\n";
    }
}

void write_weight_csv(std::ostream& out, const Grid& grid, const Weight& weight) {
    write_coord_header(out, grid.dimension());
    out << "ell\n";
    for (Index i = 0; i < grid.num_nodes(); ++i) {
        write_coords(out, grid.node_coords(i));
        out << format_double(weight.ell.values(i, 0)) << "\n";
    }
}

void write_radius_csv(std::ostream& out, const Grid& grid, const RadiusEstimate& estimate) {
    write_coord_header(out, grid.dimension());
    for (int k = 1; k <= estimate.depth; ++k) out << "r" << k << (k < estimate.depth ? "," : "");
    out << "\n";
    for (Index i = 0; i < grid.num_nodes(); ++i) {
        write_coords(out, grid.node_coords(i));
        for (int k = 0; k < estimate.depth; ++k)
            out << format_double(estimate.r(i, k)) << (k + 1 < estimate.depth ? "," : "");
        out << "\n";
    }
}

void write_report(std::ostream& out, const ConvergenceReport& report) {
    out << "iterations = " << report.iterations << "\n"
        << "q = " << format_double(report.certificate.q) << "\n"
        << "margin = " << format_double(report.certificate.margin) << "\n"
        << "certificate_pass = " << (report.certificate.pass ? "true" : "false") << "\n"
        << "final_increment = " << format_double(report.final_increment) << "\n"
        << "posterior_bound = " << format_double(report.posterior_bound) << "\n"
        << "residual_sup = " << format_double(report.residual_sup) << "\n";
}

namespace {

double series_bessel(double t1, double t2) {
    double sum = 0.0, term = 1.0;
    for (int k = 0; k < 25; ++k) {
        sum += term;
        term *= t1 * t2 / ((k + 1.0) * (k + 1.0));
    }
    return sum;
}

double series_pantograph(double t) {
    double sum = 0.0, term = 1.0;
    for (int k = 0; k < 30; ++k) {
        sum += term;
        // next term: 2^{-k} / (k+1) factor ratio
        term *= t / (std::pow(2.0, k) * (k + 1.0));
    }
    return sum;
}

std::vector<CatalogEntry> build_catalog() {
    std::vector<CatalogEntry> cat;

    cat.push_back({"fredholm_separable",
                   "linear Fredholm equation with separable kernel t*s/2, solution (6/5)t",
                   "kind = fredholm\naxis = 0 1 201\nf = t\nK = t*s*x/2\nL = t*s/2\n"
                   "weight = uniform\n",
                   CatalogEntry::Expect::solve_pass,
                   [](const Eigen::VectorXd& t) { return 1.2 * t[0]; }, 1e-4});

    cat.push_back({"fredholm_noncontractive",
                   "Fredholm kernel with L = 3: the uniform-weight certificate fails at q = 3",
                   "kind = fredholm\naxis = 0 1 101\nf = t\nK = 3*x\nL = 3\nweight = uniform\n",
                   CatalogEntry::Expect::certificate_fail, nullptr, 0.0, 3.0, 1e-9});

    cat.push_back({"volterra_exp",
                   "x = 1 + integral of x over [0, t], solution exp(t)",
                   "kind = volterra\naxis = 0 1 401\nf = 1\nK = x\nL = 1\nweight = auto\n",
                   CatalogEntry::Expect::solve_pass,
                   [](const Eigen::VectorXd& t) { return std::exp(t[0]); }, 5e-4});

    cat.push_back({"volterra_l3",
                   "x = 1 + integral of 3x with the exponential weight exp(3t), solution exp(3t)",
                   "kind = volterra\naxis = 0 1 401\nf = 1\nK = 3*x\nL = 3\n"
                   "weight = exponential\n",
                   CatalogEntry::Expect::solve_pass,
                   [](const Eigen::VectorXd& t) { return std::exp(3.0 * t[0]); }, 2e-3});

    cat.push_back({"cauchy_ode_3x",
                   "scalar initial value problem x' = 3x, x(0) = 1, solution exp(3t)",
                   "kind = cauchy\naxis = 0 1 401\nF = 3*x\nL = 3\nboundary = 1\n",
                   CatalogEntry::Expect::solve_pass,
                   [](const Eigen::VectorXd& t) { return std::exp(3.0 * t[0]); }, 2e-3});

    cat.push_back({"cauchy_bessel",
                   "d1 d2 x = x with unit boundary data on [0,1]^2, Bessel-type series solution",
                   "kind = cauchy\naxis = 0 1 101\naxis = 0 1 101\nF = x\nL = 1\nboundary = 1\n",
                   CatalogEntry::Expect::solve_pass,
                   [](const Eigen::VectorXd& t) { return series_bessel(t[0], t[1]); }, 5e-3});

    cat.push_back({"pantograph",
                   "pantograph equation x = 1 + integral of x(s/2), power series solution",
                   "kind = retarded\naxis = 0 1 401\nf = 1\nK = x\nphi1 = s/2\nL1 = 1\n"
                   "weight = auto\n",
                   CatalogEntry::Expect::solve_pass,
                   [](const Eigen::VectorXd& t) { return series_pantograph(t[0]); }, 2e-3});

    cat.push_back({"presic_halving",
                   "functional equation f(t) = t + f(t/2)/2, solution 4t/3",
                   "kind = presic\naxis = 0 1 401\nF = t + x/2\nphi1 = t/2\nL1 = 0.5\n"
                   "weight = uniform\n",
                   CatalogEntry::Expect::solve_pass,
                   [](const Eigen::VectorXd& t) { return 4.0 * t[0] / 3.0; }, 1e-4});

    cat.push_back({"presic_two_subs",
                   "f(t) = t + f(t/2)/4 + f(t/3)/4, solution (24/19)t",
                   "kind = presic\naxis = 0 1 401\nF = t + x1/4 + x2/4\n"
                   "phi1 = t/2\nphi2 = t/3\nL1 = 0.25\nL2 = 0.25\nweight = uniform\n",
                   CatalogEntry::Expect::solve_pass,
                   [](const Eigen::VectorXd& t) { return 24.0 * t[0] / 19.0; }, 1e-4});

    cat.push_back({"fredholm_product_f2",
                   "separable Fredholm kernel certified by the product-modulus weight t + c",
                   "kind = fredholm\naxis = 0 1 201\nf = t\nK = t*s*x/2\nL = t*s/2\n"
                   "weight = product\nweightL1 = t\nweightL2 = s/2\n",
                   CatalogEntry::Expect::solve_pass,
                   [](const Eigen::VectorXd& t) { return 1.2 * t[0]; }, 1e-4});

    return cat;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> cat = build_catalog();
    return cat;
}

const CatalogEntry* find_catalog_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return &e;
    return nullptr;
}

CatalogResult run_catalog_entry(const CatalogEntry& entry) {
    const ProblemConfig config = parse_config_text(entry.config_text);
    const Grid grid = make_grid(config);
    CatalogResult res;

    try {
        SolveResult solved = [&] {
            if (config.kind == "cauchy")
                return solve_cauchy(make_cauchy_problem(config, grid), config.solver);
            if (config.kind == "presic")
                return solve_presic(make_presic_problem(config, grid),
                                    make_configured_weight(config, grid), config.solver);
            return solve_integral(make_integral_problem(config, grid),
                                  make_configured_weight(config, grid), config.solver);
        }();
        if (entry.expect == CatalogEntry::Expect::certificate_fail) {
            res.pass = false;
            res.detail = "expected a certificate failure but the solve succeeded";
            return res;
        }
        double worst = 0.0;
        for (Index i = 0; i < grid.num_nodes(); ++i)
            worst = std::max(worst,
                             std::abs(solved.solution.values(i, 0) - entry.oracle(grid.node_coords(i))));
        res.max_error = worst;
        res.pass = worst <= entry.tolerance;
        res.detail = "max error vs oracle " + format_double(worst) + " (tolerance " +
                     format_double(entry.tolerance) + ")";
        return res;
    } catch (const CertificateError& e) {
        if (entry.expect != CatalogEntry::Expect::certificate_fail) {
            res.pass = false;
            res.detail = std::string("unexpected certificate failure: ") + e.what();
            return res;
        }
        res.max_error = std::abs(e.certificate.q - entry.expected_q);
        res.pass = res.max_error <= entry.q_tolerance;
        res.detail = "certificate failed as expected with q = " + format_double(e.certificate.q);
        return res;
    }
}

}  // namespace picard::cli
