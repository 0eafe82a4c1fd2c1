#include "fracfem/convergence.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "fracfem/error.hpp"

namespace fracfem {

SourceKind parse_source_kind(const std::string& name) {
    if (name == "one") return SourceKind::One;
    if (name == "jacobi") return SourceKind::Jacobi;
    throw ValidationError("unknown source '" + name + "' (expected one or jacobi)");
}

ExactSolution exact_for(SourceKind kind, int k, double s) {
    if (kind == SourceKind::One) {
        if (k != 0) throw ValidationError("source 'one' has no exact solution for k != 0");
        return exact_unit_source(s);
    }
    return exact_pair(k, s);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("slope fit: logarithm of a non-positive value");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (!(std::abs(den) > 1e-300)) throw NumericalError("slope fit: abscissae coincide");
    return (n * sxy - sx * sy) / den;
}

RateFit fit_rates(const std::vector<ConvergenceLevel>& levels, int drop_coarsest) {
    if (drop_coarsest < 0 || levels.size() < static_cast<std::size_t>(drop_coarsest) + 2)
        throw ValidationError("slope fit needs at least two levels after dropping the coarsest");
    std::vector<double> h, dofs, l2, en;
    for (std::size_t i = static_cast<std::size_t>(drop_coarsest); i < levels.size(); ++i) {
        h.push_back(levels[i].h);
        dofs.push_back(static_cast<double>(levels[i].dofs));
        l2.push_back(levels[i].l2_error);
        en.push_back(levels[i].energy_error);
    }
    return {loglog_slope(h, l2), loglog_slope(h, en), loglog_slope(dofs, l2), loglog_slope(dofs, en)};
}

std::vector<ConvergenceResult> convergence_study(const ConvergenceOptions& options) {
    if (options.sizes.size() < 3) throw ValidationError("convergence study needs at least three mesh sizes");
    if (options.ks.empty()) throw ValidationError("convergence study needs at least one k");
    const QuadTables& tables = options.tables ? *options.tables : default_tables();
    std::vector<ExactSolution> exact;
    for (int k : options.ks) exact.push_back(exact_for(options.source, k, options.s));

    std::vector<ConvergenceResult> results(options.ks.size());
    for (std::size_t c = 0; c < results.size(); ++c) {
        results[c].s = options.s;
        results[c].k = options.ks[c];
        results[c].dropped = options.drop_coarsest;
    }
    using Clock = std::chrono::steady_clock;
    for (double target : options.sizes) {
        const Mesh mesh = generate_disk_mesh(options.domain_radius, target, options.ball_radius);
        AssemblyStats stats;
        const Eigen::MatrixXd K = assemble_stiffness(mesh, options.s, tables, options.assembly, &stats);
        for (std::size_t c = 0; c < results.size(); ++c) {
            const auto t0 = Clock::now();
            const Eigen::VectorXd b = assemble_load(mesh, exact[c].source());
            const Solution sol = solve(mesh, K, b, options.s, options.solve);
            ConvergenceLevel lvl;
            lvl.target_h = target;
            lvl.h = mesh_size(mesh);
            lvl.dofs = mesh.free_nodes.size();
            lvl.triangles = mesh.num_triangles();
            lvl.solve_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            lvl.assembly_seconds = stats.total_seconds;
            lvl.l2_error = l2_error(mesh, sol.values, exact[c]);
            lvl.energy_error = energy_error(mesh, K, sol, exact[c]);
            results[c].levels.push_back(lvl);
        }
    }
    for (auto& r : results) r.fit = fit_rates(r.levels, options.drop_coarsest);
    return results;
}

void write_rate_csv(std::ostream& out, const ConvergenceResult& result) {
    out << std::setprecision(10) << "h,dofs,l2_error,energy_error\n";
    for (const auto& l : result.levels) out << l.h << ',' << l.dofs << ',' << l.l2_error << ',' << l.energy_error << '\n';
    out << "slope_vs_h,," << result.fit.l2_vs_h << ',' << result.fit.energy_vs_h << '\n';
    out << "slope_vs_dofs,," << result.fit.l2_vs_dofs << ',' << result.fit.energy_vs_dofs << '\n';
}

}  // namespace fracfem
