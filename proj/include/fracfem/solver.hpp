#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "fracfem/assembly.hpp"
#include "fracfem/mesh.hpp"

namespace fracfem {

enum class SolverKind { Cholesky, ConjugateGradient };

const char* to_string(SolverKind kind);
SolverKind parse_solver_kind(const std::string& name);

struct SolveOptions {
    SolverKind kind = SolverKind::Cholesky;
    /// Relative residual target for conjugate gradients.
    double tolerance = 1e-12;
    /// Iteration cap for conjugate gradients; 0 means 10 times the number of unknowns.
    int max_iterations = 0;
};

/// Nodal values on every mesh node, zero on boundary and auxiliary nodes.
struct Solution {
    Eigen::VectorXd values;
    double s = 0.0;
    SolverKind kind = SolverKind::Cholesky;
    /// ||K_ff u_f - b_f|| / ||b_f||.
    double relative_residual = 0.0;
    int iterations = 0;
    /// Estimate of the 2-norm condition number of K_ff (Cholesky path only, else 0).
    double condition_estimate = 0.0;
};

Eigen::MatrixXd free_block(const Eigen::MatrixXd& K, const Mesh& mesh);
Eigen::VectorXd free_part(const Eigen::VectorXd& v, const Mesh& mesh);

Solution solve(const Mesh& mesh, const Eigen::MatrixXd& K, const Eigen::VectorXd& b, double s,
               const SolveOptions& options = {});
Solution solve(const Mesh& mesh, const StiffnessSystem& system, const SolveOptions& options = {});

/// u_f^T K_ff u_f, the discrete energy of the solution.
double discrete_energy(const Mesh& mesh, const Eigen::MatrixXd& K, const Solution& solution);

/// Piecewise linear interpolant of nodal values at x; zero outside the domain triangles.
double evaluate(const Mesh& mesh, const Eigen::VectorXd& values, const Point& x);

/// CSV `node_index,x,y,u`.
void write_solution_csv(std::ostream& out, const Mesh& mesh, const Solution& solution);
void write_solution_csv(const std::string& path, const Mesh& mesh, const Solution& solution);

/// CSV `x,y,u` on an n-by-n grid covering [-R, R]^2, R the domain radius.
void write_grid_csv(const std::string& path, const Mesh& mesh, const Solution& solution, int n);

}  // namespace fracfem
