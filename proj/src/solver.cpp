#include "fracfem/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "fracfem/error.hpp"

namespace fracfem {

namespace {

Eigen::VectorXd conjugate_gradient(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SolveOptions& options,
                                   int& iterations) {
    const Eigen::Index n = b.size();
    const int cap = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(10 * std::max<Eigen::Index>(n, 1));
    const Eigen::VectorXd inv_diag = A.diagonal().cwiseInverse();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = b;
    const double bnorm = b.norm();
    iterations = 0;
    if (bnorm == 0.0) return x;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    Eigen::VectorXd Ap(n);
    while (r.norm() > options.tolerance * bnorm) {
        if (iterations >= cap)
            throw NumericalError("conjugate gradients did not converge in " + std::to_string(cap) +
                                 " iterations (relative residual " + std::to_string(r.norm() / bnorm) + ")");
        Ap.noalias() = A.selfadjointView<Eigen::Lower>() * p;
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) throw NumericalError("conjugate gradients: matrix is not positive definite");
        const double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        z = inv_diag.cwiseProduct(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        ++iterations;
    }
    return x;
}

// Power iteration for the largest eigenvalue and inverse iteration through the
// factor for the smallest one.
double condition_estimate(const Eigen::MatrixXd& A, const Eigen::LLT<Eigen::MatrixXd>& llt, int steps = 30) {
    const Eigen::Index n = A.rows();
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).normalized();
    Eigen::VectorXd w = v;
    double lmax = 0.0, inv_lmin = 0.0;
    for (int k = 0; k < steps; ++k) {
        const Eigen::VectorXd Av = A * v;
        lmax = v.dot(Av);
        v = Av.normalized();
        const Eigen::VectorXd Aw = llt.solve(w);
        inv_lmin = w.dot(Aw);
        w = Aw.normalized();
    }
    return lmax * inv_lmin;
}

}  // namespace

const char* to_string(SolverKind kind) { return kind == SolverKind::Cholesky ? "cholesky" : "cg"; }

SolverKind parse_solver_kind(const std::string& name) {
    if (name == "cholesky") return SolverKind::Cholesky;
    if (name == "cg") return SolverKind::ConjugateGradient;
    throw ValidationError("unknown solver '" + name + "' (expected cholesky or cg)");
}

Eigen::MatrixXd free_block(const Eigen::MatrixXd& K, const Mesh& mesh) {
    const auto& f = mesh.free_nodes;
    const Eigen::Index n = static_cast<Eigen::Index>(f.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) out(i, j) = K(f[i], f[j]);
    return out;
}

Eigen::VectorXd free_part(const Eigen::VectorXd& v, const Mesh& mesh) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(mesh.free_nodes.size()));
    for (std::size_t i = 0; i < mesh.free_nodes.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(mesh.free_nodes[i]);
    return out;
}

Solution solve(const Mesh& mesh, const Eigen::MatrixXd& K, const Eigen::VectorXd& b, double s,
               const SolveOptions& options) {
    const Eigen::Index n = static_cast<Eigen::Index>(mesh.num_nodes());
    if (K.rows() != n || K.cols() != n || b.size() != n)
        throw ValidationError("solve: system size does not match the mesh");
    if (mesh.free_nodes.empty()) throw ValidationError("solve: mesh has no free nodes");
    const Eigen::MatrixXd Kff = free_block(K, mesh);
    const Eigen::VectorXd bf = free_part(b, mesh);

    Solution sol;
    sol.s = s;
    sol.kind = options.kind;
    Eigen::VectorXd uf;
    if (options.kind == SolverKind::Cholesky) {
        const Eigen::LLT<Eigen::MatrixXd> llt(Kff);
        if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization failed: K_ff is not positive definite");
        uf = llt.solve(bf);
        sol.condition_estimate = condition_estimate(Kff, llt);
    } else {
        uf = conjugate_gradient(Kff, bf, options, sol.iterations);
    }
    const double bnorm = bf.norm();
    sol.relative_residual = bnorm > 0.0 ? (Kff * uf - bf).norm() / bnorm : 0.0;
    const double limit = options.kind == SolverKind::Cholesky ? 1e-10 : std::max(1e-10, 10.0 * options.tolerance);
    if (!(sol.relative_residual <= limit))
        throw NumericalError("solve: relative residual " + std::to_string(sol.relative_residual) + " above " +
                             std::to_string(limit));
    sol.values = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < mesh.free_nodes.size(); ++i) sol.values(mesh.free_nodes[i]) = uf(static_cast<Eigen::Index>(i));
    return sol;
}

Solution solve(const Mesh& mesh, const StiffnessSystem& system, const SolveOptions& options) {
    return solve(mesh, system.K, system.b, system.s, options);
}

double discrete_energy(const Mesh& mesh, const Eigen::MatrixXd& K, const Solution& solution) {
    const Eigen::VectorXd uf = free_part(solution.values, mesh);
    return uf.dot(free_block(K, mesh) * uf);
}

double evaluate(const Mesh& mesh, const Eigen::VectorXd& values, const Point& x) {
    for (std::size_t t = 0; t < mesh.num_domain_triangles(); ++t) {
        const Triangle& tri = mesh.triangles[t];
        const Point& a = mesh.nodes[tri[0]];
        const Point& b = mesh.nodes[tri[1]];
        const Point& c = mesh.nodes[tri[2]];
        Eigen::Matrix2d M;
        M << b - a, c - a;
        const Eigen::Vector2d lam = M.inverse() * (x - a);
        const double tol = -1e-12;
        if (lam(0) >= tol && lam(1) >= tol && lam(0) + lam(1) <= 1.0 - tol)
            return (1.0 - lam(0) - lam(1)) * values(tri[0]) + lam(0) * values(tri[1]) + lam(1) * values(tri[2]);
    }
    return 0.0;
}

void write_solution_csv(std::ostream& out, const Mesh& mesh, const Solution& solution) {
    out << std::setprecision(17) << "node_index,x,y,u\n";
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
        out << i << ',' << mesh.nodes[i].x() << ',' << mesh.nodes[i].y() << ','
            << solution.values(static_cast<Eigen::Index>(i)) << '\n';
}

void write_solution_csv(const std::string& path, const Mesh& mesh, const Solution& solution) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_solution_csv(out, mesh, solution);
    if (!out) throw Error("write failed: " + path);
}

void write_grid_csv(const std::string& path, const Mesh& mesh, const Solution& solution, int n) {
    if (n < 2) throw ValidationError("grid size must be at least 2");
    double radius = 0.0;
    for (Index b : mesh.boundary_nodes) radius = std::max(radius, mesh.nodes[b].norm());
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << std::setprecision(17) << "x,y,u\n";
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Point x(-radius + 2.0 * radius * i / (n - 1), -radius + 2.0 * radius * j / (n - 1));
            out << x.x() << ',' << x.y() << ',' << evaluate(mesh, solution.values, x) << '\n';
        }
    if (!out) throw Error("write failed: " + path);
}

}  // namespace fracfem
