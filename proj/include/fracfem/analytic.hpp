#pragma once

#include <vector>

#include <Eigen/Core>

#include "fracfem/assembly.hpp"
#include "fracfem/mesh.hpp"
#include "fracfem/solver.hpp"

namespace fracfem {

/// Jacobi polynomial P_k^{(alpha,beta)}(z) from its explicit finite sum.
double jacobi(int k, double alpha, double beta, double z);

/// Eigenvalue 2^{2s} Gamma(1+s+k) Gamma(n/2+s+k) / (k! Gamma(n/2+k)).
double eigenvalue_lambda(int k, double s, int n = 2);

/// Exact pair on the unit disk: u = scale (1-|x|^2)_+^s P_k^{(s,0)}(2|x|^2-1) and
/// f = scale lambda P_k^{(s,0)}(2|x|^2-1), so that the fractional Laplacian of u is f.
struct ExactSolution {
    int k = 0;
    double s = 0.5;
    double lambda = 1.0;
    double scale = 1.0;

    double profile(double r2) const;  // P_k^{(s,0)}(2 r2 - 1)
    double u(const Point& x) const;
    double f(const Point& x) const;
    Source source() const;
};

/// u = (1-|x|^2)^s P_k, f = lambda P_k.
ExactSolution exact_pair(int k, double s);
/// The k = 0 pair rescaled so that f = 1.
ExactSolution exact_unit_source(double s);

/// Coefficients c_j of P_k^{(alpha,beta)}(1 - 2t) = sum_j c_j t^j.
std::vector<double> jacobi_coefficients_in_t(int k, double alpha, double beta);

/// Closed form of the integral of f u over the unit disk.
double integral_f_u(const ExactSolution& exact);
/// The same integral over the domain triangles with the 12-point rule, elements
/// touching the boundary subdivided once.
double integral_f_u_quadrature(const Mesh& mesh, const ExactSolution& exact);

/// L2 norm of u - u_h over the domain triangles (12-point rule, boundary elements subdivided once).
double l2_error(const Mesh& mesh, const Eigen::VectorXd& values, const ExactSolution& exact);

/// sqrt(int f u - u_f^T K_ff u_f) with K including the normalization constant.
/// Radicands in [-1e-10, 0) clamp to zero; more negative ones throw NumericalError.
double energy_error(const Mesh& mesh, const Eigen::MatrixXd& K, const Solution& solution, const ExactSolution& exact);

}  // namespace fracfem
