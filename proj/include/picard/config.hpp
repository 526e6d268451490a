#pragma once

#include "picard/cauchy.hpp"
#include "picard/exprlang.hpp"

#include <iosfwd>
#include <string>

namespace picard::cli {

/// Problem description error: bad syntax, missing keys, wrong kinds. Carries
/// the 1-based config line when known (0 otherwise).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string what, int line = 0) : std::runtime_error(std::move(what)), line(line) {}

    int line;
};

struct AxisSpec {
    double lo = 0.0;
    double hi = 1.0;
    Index count = 2;
};

/// Flat key = value problem description.
///
/// Keys: kind, axis (repeatable "lo hi count"), m, f/f1.., K/K1.. or F/F1..,
/// L, L1.. (per-substitution moduli), phi1.., boundary, weight, weightL1,
/// weightL2, tol, max_iter, margin, interpolation, initial_guess.
/// '#' starts a comment; blank lines are skipped.
///
/// Expression variables: t1..tn (alias t when n = 1), s1..sn (alias s),
/// x1..xm (alias x when m = 1). Retarded kernels and Presic maps read
/// x1..xr as the substituted values x(phi_k); both are scalar (m = 1) in
/// config files.
struct ProblemConfig {
    std::string kind;  // fredholm | volterra | retarded | presic | cauchy
    std::vector<AxisSpec> axes;
    Index m = 1;

    std::vector<std::string> forcing;        // f1..fm
    std::vector<std::string> kernel;         // K1..Km or F1..Fm
    std::string lipschitz;                   // L(t, s), or L(t) for cauchy
    std::vector<std::string> moduli;         // L1..Lr
    std::vector<std::string> substitutions;  // phi1..phir
    std::vector<std::string> boundary;       // boundary1..m (cauchy)

    std::string weight_mode = "auto";  // auto | uniform | exponential | expr | product
    std::string weight_expr;           // ell(t), expr mode
    std::string weight_l1;             // product mode factors
    std::string weight_l2;

    SolverConfig solver;
};

ProblemConfig parse_config_text(const std::string& text);
ProblemConfig parse_config_file(const std::string& path);

Grid make_grid(const ProblemConfig& config);

/// Assembles the integral problem for kinds fredholm, volterra, retarded.
IntegralProblem make_integral_problem(const ProblemConfig& config, const Grid& grid);
PresicProblem make_presic_problem(const ProblemConfig& config, const Grid& grid);
CauchyProblem make_cauchy_problem(const ProblemConfig& config, const Grid& grid);

/// Builds the configured weight; nullopt means auto (solver constructs it).
std::optional<Weight> make_configured_weight(const ProblemConfig& config, const Grid& grid);

/// 17-significant-digit decimal rendering, locale independent.
std::string format_double(double v);

/// One row per node: coordinates, then solution components.
void write_solution_csv(std::ostream& out, const Grid& grid, const GridFunction& x);
void write_weight_csv(std::ostream& out, const Grid& grid, const Weight& weight);
void write_radius_csv(std::ostream& out, const Grid& grid, const RadiusEstimate& estimate);

/// Structured text mirroring ConvergenceReport field for field.
void write_report(std::ostream& out, const ConvergenceReport& report);

struct CatalogEntry {
    enum class Expect { solve_pass, certificate_fail };

    std::string name;
    std::string description;
    std::string config_text;
    Expect expect = Expect::solve_pass;

    /// Exact solution, for solve_pass entries.
    std::function<double(const Eigen::VectorXd&)> oracle;
    double tolerance = 0.0;

    /// Pinned q for certificate_fail entries.
    double expected_q = -1.0;
    double q_tolerance = 1e-9;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry* find_catalog_entry(const std::string& name);

struct CatalogResult {
    bool pass = false;
    double max_error = 0.0;  // vs oracle, or |q - expected_q|
    std::string detail;
};

CatalogResult run_catalog_entry(const CatalogEntry& entry);

}  // namespace picard::cli
