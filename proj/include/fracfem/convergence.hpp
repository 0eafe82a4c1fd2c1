#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fracfem/analytic.hpp"
#include "fracfem/assembly.hpp"
#include "fracfem/quadtables.hpp"
#include "fracfem/solver.hpp"

namespace fracfem {

enum class SourceKind { One, Jacobi };

SourceKind parse_source_kind(const std::string& name);

/// Exact pair for a source choice: f = 1 (k must be 0) or the Jacobi pair of index k.
ExactSolution exact_for(SourceKind kind, int k, double s);

struct ConvergenceOptions {
    double domain_radius = 1.0;
    double ball_radius = 1.1;
    std::vector<double> sizes{0.2, 0.1, 0.05, 0.025};
    double s = 0.5;
    /// Each case reuses the stiffness matrix of its mesh.
    std::vector<int> ks{0};
    SourceKind source = SourceKind::One;
    /// Number of coarsest levels left out of the slope fit.
    int drop_coarsest = 0;
    AssemblyOptions assembly;
    SolveOptions solve;
    const QuadTables* tables = nullptr;  // default tables when null
};

struct ConvergenceLevel {
    double target_h = 0.0;
    double h = 0.0;  // largest domain triangle diameter
    std::size_t dofs = 0;
    std::size_t triangles = 0;
    double l2_error = 0.0;
    double energy_error = 0.0;
    double assembly_seconds = 0.0;
    double solve_seconds = 0.0;
};

struct RateFit {
    double l2_vs_h = 0.0;
    double energy_vs_h = 0.0;
    double l2_vs_dofs = 0.0;
    double energy_vs_dofs = 0.0;
};

struct ConvergenceResult {
    double s = 0.0;
    int k = 0;
    std::vector<ConvergenceLevel> levels;
    int dropped = 0;
    RateFit fit;
};

/// Least-squares slope of log y against log x; throws NumericalError on non-positive data
/// and ValidationError for fewer than two points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

RateFit fit_rates(const std::vector<ConvergenceLevel>& levels, int drop_coarsest);

/// One result per entry of options.ks. Requires at least three mesh sizes.
std::vector<ConvergenceResult> convergence_study(const ConvergenceOptions& options);

/// CSV `h,dofs,l2_error,energy_error`, then footer rows `slope_vs_h` and `slope_vs_dofs`
/// holding the fitted slopes in the two error columns.
void write_rate_csv(std::ostream& out, const ConvergenceResult& result);

}  // namespace fracfem
