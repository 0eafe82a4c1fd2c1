#include "fracfem/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fracfem/analytic.hpp"
#include "fracfem/assembly.hpp"
#include "fracfem/convergence.hpp"
#include "fracfem/error.hpp"
#include "fracfem/mesh.hpp"
#include "fracfem/quadtables.hpp"
#include "fracfem/solver.hpp"

namespace fracfem {

namespace {

struct MeshSource {
    std::string path;
    double radius = 1.0;
    double h = 0.0;
    double ball = 1.1;
};

struct SolveArgs {
    MeshSource mesh;
    double s = 0.5;
    int k = 0;
    std::string f = "one";
    std::string solver = "cholesky";
    double tol = 1e-12;
    int threads = 1;
    bool deterministic = true;
    std::string dump_matrix, dump_tables, output, grid_output;
    int grid = 0;
};

struct ConvergeArgs {
    double radius = 1.0, ball = 1.1, s = 0.5;
    std::vector<double> sizes{0.2, 0.1, 0.05, 0.025};
    std::vector<int> ks{0};
    std::string f = "one";
    std::string solver = "cholesky";
    double tol = 1e-12;
    int threads = 1;
    bool deterministic = true;
    int drop = 0;
    std::string output, dump_tables;
    std::optional<double> l2_slope, energy_slope, dofs_slope;
    double l2_band = 0.10, energy_band = 0.07, dofs_band = 0.07;
};

Mesh obtain_mesh(const MeshSource& src) {
    if (!src.path.empty()) return load_mesh(src.path);
    if (!(src.h > 0.0)) throw ValidationError("either --mesh or --h (with --radius and --ball) is required");
    return generate_disk_mesh(src.radius, src.h, src.ball);
}

void add_mesh_options(CLI::App* app, MeshSource& m) {
    auto* mesh = app->add_option("--mesh", m.path, "FRACMESH file");
    auto* h = app->add_option("--h", m.h, "target mesh size for the generated disk mesh");
    app->add_option("--radius", m.radius, "domain radius of the generated mesh")->capture_default_str();
    app->add_option("--ball", m.ball, "auxiliary ball radius of the generated mesh")->capture_default_str();
    mesh->excludes(h);
}

int cmd_meshgen(const MeshSource& src, const std::string& output, std::ostream& out) {
    const Mesh mesh = obtain_mesh(src);
    save_mesh(output, mesh);
    out << "nodes " << mesh.num_nodes() << ", triangles " << mesh.num_triangles() << " (" << mesh.n_aux
        << " auxiliary), free nodes " << mesh.free_nodes.size() << ", h " << mesh_size(mesh) << "\n";
    return kExitOk;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
    const Mesh mesh = obtain_mesh(a.mesh);
    const SourceKind kind = parse_source_kind(a.f);
    const ExactSolution exact = exact_for(kind, a.k, a.s);
    const QuadTables& tables = default_tables();
    if (!a.dump_tables.empty()) dump_tables(a.dump_tables, tables);

    AssemblyOptions aopt;
    aopt.threads = a.threads;
    aopt.deterministic = a.deterministic;
    const StiffnessSystem sys = assemble(mesh, a.s, exact.source(), tables, aopt);
    if (!a.dump_matrix.empty()) write_system_csv(a.dump_matrix, sys);

    SolveOptions sopt;
    sopt.kind = parse_solver_kind(a.solver);
    sopt.tolerance = a.tol;
    const Solution sol = solve(mesh, sys, sopt);
    if (!a.output.empty()) write_solution_csv(a.output, mesh, sol);
    if (a.grid > 0) write_grid_csv(a.grid_output.empty() ? "grid.csv" : a.grid_output, mesh, sol, a.grid);

    const AssemblyStats& st = sys.stats;
    out << std::setprecision(6);
    out << "s " << a.s << ", k " << a.k << ", source " << a.f << "\n";
    out << "N_T " << mesh.num_triangles() << " (" << mesh.num_domain_triangles() << " domain), nodes "
        << mesh.num_nodes() << ", free " << mesh.free_nodes.size() << ", h " << mesh_size(mesh) << "\n";
    out << "assembly " << st.total_seconds << " s: identical " << st.identical_seconds << " (" << st.identical_pairs
        << "), disjoint " << st.disjoint_seconds << " (" << st.disjoint_pairs << "), vertex " << st.vertex_seconds
        << " (" << st.vertex_pairs << "), edge " << st.edge_seconds << " (" << st.edge_pairs << "), complement "
        << st.complement_seconds << ", scatter " << st.scatter_seconds << "\n";
    out << "min disjoint quadrature distance " << st.min_disjoint_distance << "\n";
    out << "solver " << to_string(sol.kind) << ", relative residual " << sol.relative_residual;
    if (sol.kind == SolverKind::ConjugateGradient) out << ", iterations " << sol.iterations;
    else out << ", condition estimate " << sol.condition_estimate;
    out << "\n";
    double umax = 0.0;
    for (Eigen::Index i = 0; i < sol.values.size(); ++i) umax = std::max(umax, std::abs(sol.values(i)));
    out << "max |u_h| " << umax << "\n";
    double domain_radius = 0.0;
    for (Index b : mesh.boundary_nodes) domain_radius = std::max(domain_radius, mesh.nodes[b].norm());
    if (std::abs(domain_radius - 1.0) < 1e-9) {
        out << "l2_error " << l2_error(mesh, sol.values, exact) << "\n";
        out << "energy_error " << energy_error(mesh, sys.K, sol, exact) << "\n";
    }
    return kExitOk;
}

int cmd_converge(const ConvergeArgs& a, std::ostream& out, std::ostream& err) {
    ConvergenceOptions opt;
    opt.domain_radius = a.radius;
    opt.ball_radius = a.ball;
    opt.sizes = a.sizes;
    opt.s = a.s;
    opt.ks = a.ks;
    opt.source = parse_source_kind(a.f);
    opt.drop_coarsest = a.drop;
    opt.assembly.threads = a.threads;
    opt.assembly.deterministic = a.deterministic;
    opt.solve.kind = parse_solver_kind(a.solver);
    opt.solve.tolerance = a.tol;
    if (!a.dump_tables.empty()) dump_tables(a.dump_tables, default_tables());
    const std::vector<ConvergenceResult> results = convergence_study(opt);

    std::ofstream file;
    if (!a.output.empty()) {
        file.open(a.output);
        if (!file) throw Error("cannot open " + a.output + " for writing");
    }
    bool in_band = true;
    for (const auto& r : results) {
        write_rate_csv(a.output.empty() ? out : file, r);
        auto check = [&](const char* name, double value, const std::optional<double>& expect, double band) {
            if (expect && std::abs(value - *expect) > band) {
                err << "k=" << r.k << ": " << name << " slope " << value << " outside " << *expect << " +- " << band << "\n";
                in_band = false;
            }
        };
        check("l2", r.fit.l2_vs_h, a.l2_slope, a.l2_band);
        check("energy", r.fit.energy_vs_h, a.energy_slope, a.energy_band);
        check("dofs", r.fit.l2_vs_dofs, a.dofs_slope, a.dofs_band);
    }
    return in_band ? kExitOk : kExitNumerical;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite element solver for the fractional Laplacian on two-dimensional domains", "fracfem"};
    app.require_subcommand(1);
    // "-h" would clash with the mesh size option "--h".
    app.set_help_flag("--help", "print help");

    MeshSource gen;
    std::string gen_output;
    auto* meshgen = app.add_subcommand("meshgen", "generate a disk mesh with an auxiliary annulus");
    meshgen->set_help_flag("--help", "print help");
    meshgen->add_option("--radius", gen.radius, "domain radius")->capture_default_str();
    meshgen->add_option("--h", gen.h, "target mesh size")->required();
    meshgen->add_option("--ball", gen.ball, "auxiliary ball radius")->capture_default_str();
    meshgen->add_option("-o,--output", gen_output, "output FRACMESH file")->required();

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "assemble and solve on one mesh");
    solve_cmd->set_help_flag("--help", "print help");
    add_mesh_options(solve_cmd, sa.mesh);
    solve_cmd->add_option("--s", sa.s, "fractional order in (0,1)")->capture_default_str();
    solve_cmd->add_option("--k", sa.k, "Jacobi index for --f jacobi")->capture_default_str();
    solve_cmd->add_option("--f", sa.f, "right-hand side")->check(CLI::IsMember({"one", "jacobi"}))->capture_default_str();
    solve_cmd->add_option("--solver", sa.solver)->check(CLI::IsMember({"cholesky", "cg"}))->capture_default_str();
    solve_cmd->add_option("--tol", sa.tol, "conjugate gradient tolerance")->capture_default_str();
    solve_cmd->add_option("--threads", sa.threads, "worker threads, 0 for all cores")->capture_default_str();
    solve_cmd->add_flag("--deterministic,!--nondeterministic", sa.deterministic, "ordered reduction (default on)");
    solve_cmd->add_option("--dump-matrix", sa.dump_matrix, "write K and b as CSV (at most 2000 nodes)");
    solve_cmd->add_option("--dump-tables", sa.dump_tables, "write the quadrature tables as CSV");
    solve_cmd->add_option("-o,--output", sa.output, "solution CSV node_index,x,y,u");
    solve_cmd->add_option("--grid", sa.grid, "also sample the solution on an n-by-n grid");
    solve_cmd->add_option("--grid-output", sa.grid_output, "grid CSV path (default grid.csv)");

    ConvergeArgs ca;
    auto* conv = app.add_subcommand("converge", "convergence study on a ladder of disk meshes");
    conv->set_help_flag("--help", "print help");
    conv->add_option("--radius", ca.radius)->capture_default_str();
    conv->add_option("--ball", ca.ball)->capture_default_str();
    conv->add_option("--h", ca.sizes, "mesh sizes, at least three")->capture_default_str();
    conv->add_option("--s", ca.s)->capture_default_str();
    conv->add_option("--k", ca.ks, "Jacobi indices (one rate table each)")->capture_default_str();
    conv->add_option("--f", ca.f)->check(CLI::IsMember({"one", "jacobi"}))->capture_default_str();
    conv->add_option("--solver", ca.solver)->check(CLI::IsMember({"cholesky", "cg"}))->capture_default_str();
    conv->add_option("--tol", ca.tol)->capture_default_str();
    conv->add_option("--threads", ca.threads)->capture_default_str();
    conv->add_flag("--deterministic,!--nondeterministic", ca.deterministic);
    conv->add_option("--drop-coarsest", ca.drop, "levels left out of the slope fit")->capture_default_str();
    conv->add_option("--dump-tables", ca.dump_tables);
    conv->add_option("-o,--output", ca.output, "rate CSV (stdout when absent)");
    conv->add_option("--expect-l2-slope", ca.l2_slope);
    conv->add_option("--expect-energy-slope", ca.energy_slope);
    conv->add_option("--expect-dofs-slope", ca.dofs_slope, "expected L2 slope against the number of DOFs");
    conv->add_option("--l2-band", ca.l2_band)->capture_default_str();
    conv->add_option("--energy-band", ca.energy_band)->capture_default_str();
    conv->add_option("--dofs-band", ca.dofs_band)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*meshgen) return cmd_meshgen(gen, gen_output, out);
        if (*solve_cmd) return cmd_solve(sa, out);
        if (ca.sizes.size() < 3) {
            err << "usage error: --h needs at least three mesh sizes\n";
            return kExitUsage;
        }
        return cmd_converge(ca, out, err);
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return kExitNumerical;
    }
}

}  // namespace fracfem
