#include "picard/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace picard;
using cli::ProblemConfig;

constexpr int kExitOk = 0;
constexpr int kExitCertificate = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNonConvergence = 4;

struct CommonOpts {
    std::string config_path;
    std::string output_path;
    std::string format = "report";
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<double> margin;
    std::optional<std::string> grid_override;  // "count" or "count,count,..."
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_solver_flags = true) {
    cmd->add_option("config", o.config_path, "problem config file")->required();
    cmd->add_option("--output", o.output_path, "write results to this path");
    cmd->add_option("--format", o.format, "stdout format when --output is absent")
        ->check(CLI::IsMember({"csv", "report"}));
    if (with_solver_flags) {
        o.tol.emplace();
        o.max_iter.emplace();
        o.margin.emplace();
        cmd->add_option("--tol", *o.tol, "stopping tolerance")->default_val(-1.0);
        cmd->add_option("--max-iter", *o.max_iter, "iteration cap")->default_val(-1);
        cmd->add_option("--margin", *o.margin, "certificate margin")->default_val(-1.0);
    }
    o.grid_override.emplace();
    cmd->add_option("--grid", *o.grid_override,
                    "override per-axis node counts, comma separated")
        ->default_val("");
}

ProblemConfig load_config(const CommonOpts& o) {
    ProblemConfig c = cli::parse_config_file(o.config_path);
    if (o.tol && *o.tol >= 0.0) c.solver.tol = *o.tol;
    if (o.max_iter && *o.max_iter >= 0) c.solver.max_iter = *o.max_iter;
    if (o.margin && *o.margin >= 0.0) c.solver.margin = *o.margin;
    if (o.grid_override && !o.grid_override->empty()) {
        std::vector<Index> counts;
        std::stringstream ss(*o.grid_override);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const long v = std::stol(item);
            if (v < 2) throw cli::ConfigError("--grid: node counts must be at least 2");
            counts.push_back(v);
        }
        if (counts.size() != c.axes.size())
            throw cli::ConfigError("--grid: expected " + std::to_string(c.axes.size()) +
                                   " counts");
        for (size_t k = 0; k < counts.size(); ++k) c.axes[k].count = counts[k];
    }
    return c;
}

/// Opens the output file or falls back to stdout; out_is_file reports which.
std::ofstream open_output(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw cli::ConfigError("cannot open output path " + path);
    return f;
}

void emit_solution(const CommonOpts& o, const Grid& grid, const SolveResult& result) {
    if (!o.output_path.empty()) {
        auto csv = open_output(o.output_path);
        cli::write_solution_csv(csv, grid, result.solution);
        auto rep = open_output(o.output_path + ".report");
        cli::write_report(rep, result.report);
        std::cout << "converged in " << result.report.iterations << " iterations, q = "
                  << cli::format_double(result.report.certificate.q) << ", posterior bound = "
                  << cli::format_double(result.report.posterior_bound) << "\n";
        return;
    }
    if (o.format == "csv")
        cli::write_solution_csv(std::cout, grid, result.solution);
    else
        cli::write_report(std::cout, result.report);
    std::cerr << "converged in " << result.report.iterations << " iterations, q = "
              << cli::format_double(result.report.certificate.q) << "\n";
}

/// A failing certificate still produces a report, but no solution file.
void emit_certificate_failure(const CommonOpts& o, const CertificateError& e) {
    ConvergenceReport rep;
    rep.certificate = e.certificate;
    if (!o.output_path.empty()) {
        auto f = open_output(o.output_path + ".report");
        cli::write_report(f, rep);
    } else {
        cli::write_report(std::cout, rep);
    }
    std::cerr << "certificate failed: " << e.what()
              << " (q = " << cli::format_double(e.certificate.q) << ")\n";
}

SolveResult dispatch_solve(const ProblemConfig& config, const Grid& grid) {
    if (config.kind == "cauchy")
        return solve_cauchy(cli::make_cauchy_problem(config, grid), config.solver);
    if (config.kind == "presic")
        return solve_presic(cli::make_presic_problem(config, grid),
                            cli::make_configured_weight(config, grid), config.solver);
    return solve_integral(cli::make_integral_problem(config, grid),
                          cli::make_configured_weight(config, grid), config.solver);
}

int run_solve(const CommonOpts& o, const char* required_kind) {
    const ProblemConfig config = load_config(o);
    if (required_kind && config.kind != required_kind)
        throw cli::ConfigError(std::string("this command needs kind = ") + required_kind +
                               ", config has kind = " + config.kind);
    const Grid grid = cli::make_grid(config);
    try {
        const SolveResult result = dispatch_solve(config, grid);
        emit_solution(o, grid, result);
        return kExitOk;
    } catch (const CertificateError& e) {
        emit_certificate_failure(o, e);
        return kExitCertificate;
    }
}

int run_radius(const CommonOpts& o, int depth) {
    const ProblemConfig config = load_config(o);
    const Grid grid = cli::make_grid(config);
    const Relation relation =
        config.kind == "fredholm" ? relation_full(grid) : relation_volterra(grid);
    const RadiusEstimate est =
        spectral_radius_sequence(grid, relation, trapezoid_measure(grid), depth);
    if (!o.output_path.empty()) {
        auto f = open_output(o.output_path);
        cli::write_radius_csv(f, grid, est);
    } else {
        cli::write_radius_csv(std::cout, grid, est);
    }
    return kExitOk;
}

int run_weight(const CommonOpts& o) {
    const ProblemConfig config = load_config(o);
    const Grid grid = cli::make_grid(config);
    std::optional<Weight> weight = cli::make_configured_weight(config, grid);
    if (!weight) {
        // auto mode: build the constructed ell from the problem's modulus
        const IntegralProblem p = cli::make_integral_problem(config, grid);
        weight = p.lipschitz_s
                     ? build_weight_general(grid, p.relation, p.measure, *p.lipschitz_s)
                     : build_weight_general(grid, p.relation, p.measure, p.lipschitz);
    }
    if (!o.output_path.empty()) {
        auto f = open_output(o.output_path);
        cli::write_weight_csv(f, grid, *weight);
    } else {
        cli::write_weight_csv(std::cout, grid, *weight);
    }
    return kExitOk;
}

int run_validate(const CommonOpts& o) {
    const ProblemConfig config = load_config(o);
    const Grid grid = cli::make_grid(config);
    const Relation relation =
        config.kind == "fredholm" ? relation_full(grid) : relation_volterra(grid);
    const RelationReport rep = validate_relation(relation);
    std::cout << "reflexive = " << (rep.reflexive ? "true" : "false") << "\n"
              << "transitive = " << (rep.transitive ? "true" : "false") << "\n"
              << "cover = " << (rep.cover ? "true" : "false") << "\n";
    return rep.all() ? kExitOk : kExitCertificate;
}

int run_catalog(const std::string& action, const std::string& name) {
    if (action == "list") {
        for (const auto& e : cli::catalog()) std::cout << e.name << ": " << e.description << "\n";
        return kExitOk;
    }
    const cli::CatalogEntry* entry = cli::find_catalog_entry(name);
    if (!entry) {
        std::cerr << "unknown catalog entry: " << name << "\n";
        return kExitConfig;
    }
    const cli::CatalogResult res = cli::run_catalog_entry(*entry);
    std::cout << (res.pass ? "PASS" : "FAIL") << " " << entry->name << ": " << res.detail << "\n";
    return res.pass ? kExitOk : kExitCertificate;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified Picard iteration for integral and functional equations"};
    app.require_subcommand(1);

    CommonOpts solve_opts, cauchy_opts, presic_opts, radius_opts, weight_opts, validate_opts;
    int depth = 8;

    add_common(app.add_subcommand("solve", "solve any configured problem"), solve_opts);
    add_common(app.add_subcommand("cauchy", "solve a mixed-derivative Cauchy problem"),
               cauchy_opts);
    add_common(app.add_subcommand("presic", "solve a Presic-type functional equation"),
               presic_opts);
    auto* radius_cmd =
        app.add_subcommand("radius", "finite spectral radius sequence of the core map");
    add_common(radius_cmd, radius_opts, false);
    radius_cmd->add_option("--depth", depth, "number of powers k")->check(CLI::PositiveNumber);
    add_common(app.add_subcommand("weight", "emit the built weight ell as CSV"), weight_opts);
    add_common(app.add_subcommand("validate", "check relation axioms"), validate_opts, false);

    auto* catalog_cmd = app.add_subcommand("catalog", "worked example catalog");
    std::string catalog_action, catalog_name;
    catalog_cmd->add_option("action", catalog_action, "list | run")
        ->required()
        ->check(CLI::IsMember({"list", "run"}));
    catalog_cmd->add_option("name", catalog_name, "entry name (run)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("solve")) return run_solve(solve_opts, nullptr);
        if (app.got_subcommand("cauchy")) return run_solve(cauchy_opts, "cauchy");
        if (app.got_subcommand("presic")) return run_solve(presic_opts, "presic");
        if (app.got_subcommand("radius")) return run_radius(radius_opts, depth);
        if (app.got_subcommand("weight")) return run_weight(weight_opts);
        if (app.got_subcommand("validate")) return run_validate(validate_opts);
        if (app.got_subcommand("catalog")) {
            if (catalog_action == "run" && catalog_name.empty()) {
                std::cerr << "catalog run needs an entry name\n";
                return kExitConfig;
            }
            return run_catalog(catalog_action, catalog_name);
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error";
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        std::cerr << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const picard::expr::ParseError& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NonConvergenceError& e) {
        std::cerr << "did not converge: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const DivergenceError& e) {
        std::cerr << "weight construction diverged: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
