#include "fracfem/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fracfem/error.hpp"
#include "fracfem/kernels.hpp"
#include "fracfem/quadtables.hpp"

namespace fracfem {

namespace {

double binomial(int n, int m) {
    double out = 1.0;
    for (int i = 1; i <= m; ++i) out = out * (n - m + i) / i;
    return out;
}

std::vector<bool> boundary_flags(const Mesh& mesh) {
    std::vector<bool> flag(mesh.num_nodes(), false);
    for (Index b : mesh.boundary_nodes) flag[static_cast<std::size_t>(b)] = true;
    return flag;
}

// Sum of g over domain triangles with the 12-point rule; triangles with a boundary
// vertex are split into their four midpoint children first. g receives the physical
// point and the barycentric coordinates with respect to the parent triangle.
template <class G>
double integrate_domain(const Mesh& mesh, G&& g) {
    const QuadRule rule = triangle_rule_12();
    const std::vector<bool> on_boundary = boundary_flags(mesh);
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.num_domain_triangles(); ++t) {
        const Triangle& tri = mesh.triangles[t];
        const Point& a = mesh.nodes[tri[0]];
        const Point& b = mesh.nodes[tri[1]];
        const Point& c = mesh.nodes[tri[2]];
        // Sub-triangles in barycentric coordinates of the parent.
        using B = Eigen::Vector3d;
        std::vector<std::array<B, 3>> pieces;
        const B e0(1, 0, 0), e1(0, 1, 0), e2(0, 0, 1);
        if (on_boundary[tri[0]] || on_boundary[tri[1]] || on_boundary[tri[2]]) {
            const B m01 = 0.5 * (e0 + e1), m12 = 0.5 * (e1 + e2), m02 = 0.5 * (e0 + e2);
            pieces = {{e0, m01, m02}, {m01, e1, m12}, {m02, m12, e2}, {m12, m02, m01}};
        } else {
            pieces = {{e0, e1, e2}};
        }
        const double area = triangle_area(a, b, c) / static_cast<double>(pieces.size());
        double sum = 0.0;
        for (const auto& p : pieces)
            for (Eigen::Index q = 0; q < rule.size(); ++q) {
                // Reference point (x, y) on (0,0),(1,0),(1,1) has barycentrics (1-x, x-y, y).
                const double x = rule.points(q, 0), y = rule.points(q, 1);
                const B lam = (1.0 - x) * p[0] + (x - y) * p[1] + y * p[2];
                const Point pt = lam(0) * a + lam(1) * b + lam(2) * c;
                sum += rule.weights(q) * g(pt, lam, tri);
            }
        total += 2.0 * area * sum;
    }
    return total;
}

}  // namespace

double jacobi(int k, double alpha, double beta, double z) {
    if (k < 0) throw ValidationError("jacobi: k must be non-negative");
    if (!(alpha > -1.0) || !(beta > -1.0)) throw ValidationError("jacobi: alpha and beta must exceed -1");
    if (k == 0) return 1.0;
    // Explicit sum in powers of (z-1)/2; extended precision absorbs the cancellation near z = -1.
    using L = long double;
    const L t = 0.5L * (1.0L - static_cast<L>(z));
    L kfact = 1.0L;
    for (int i = 2; i <= k; ++i) kfact *= i;
    L sum = 0.0L;
    for (int m = k; m >= 0; --m) {
        L c = static_cast<L>(binomial(k, m)) / kfact;
        for (int i = m + 1; i <= k; ++i) c *= static_cast<L>(alpha) + i;
        for (int i = 1; i <= m; ++i) c *= static_cast<L>(alpha) + static_cast<L>(beta) + k + i;
        sum = sum * -t + c;
    }
    return static_cast<double>(sum);
}

std::vector<double> jacobi_coefficients_in_t(int k, double alpha, double beta) {
    // P_k(z) = G(a+k+1)/(k! G(a+b+k+1)) sum_m C(k,m) G(a+b+k+m+1)/G(a+m+1) ((z-1)/2)^m, (z-1)/2 = -t.
    // Both gamma ratios are finite products.
    std::vector<double> c(static_cast<std::size_t>(k) + 1);
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    for (int m = 0; m <= k; ++m) {
        double v = ((m % 2) ? -1.0 : 1.0) * binomial(k, m) / kfact;
        for (int i = m + 1; i <= k; ++i) v *= alpha + i;
        for (int i = 1; i <= m; ++i) v *= alpha + beta + k + i;
        c[static_cast<std::size_t>(m)] = v;
    }
    return c;
}

double eigenvalue_lambda(int k, double s, int n) {
    if (k < 0) throw ValidationError("eigenvalue_lambda: k must be non-negative");
    if (n < 1) throw ValidationError("eigenvalue_lambda: dimension must be positive");
    check_order(s);
    const double h = 0.5 * n;
    return std::exp(2.0 * s * std::log(2.0) + std::lgamma(1.0 + s + k) + std::lgamma(h + s + k) -
                    std::lgamma(k + 1.0) - std::lgamma(h + k));
}

double ExactSolution::profile(double r2) const { return jacobi(k, s, 0.0, 2.0 * r2 - 1.0); }

double ExactSolution::u(const Point& x) const {
    const double r2 = x.squaredNorm();
    if (r2 >= 1.0) return 0.0;
    return scale * std::pow(1.0 - r2, s) * profile(r2);
}

double ExactSolution::f(const Point& x) const { return scale * lambda * profile(x.squaredNorm()); }

Source ExactSolution::source() const {
    return [e = *this](const Point& x) { return e.f(x); };
}

ExactSolution exact_pair(int k, double s) {
    check_order(s);
    if (k < 0) throw ValidationError("exact_pair: k must be non-negative");
    ExactSolution e;
    e.k = k;
    e.s = s;
    e.lambda = eigenvalue_lambda(k, s);
    e.scale = 1.0;
    return e;
}

ExactSolution exact_unit_source(double s) {
    ExactSolution e = exact_pair(0, s);
    e.scale = 1.0 / e.lambda;
    return e;
}

double integral_f_u(const ExactSolution& e) {
    // With t = 1 - |x|^2: int f u = scale^2 lambda pi int_0^1 t^s P(1-2t)^2 dt.
    const std::vector<double> c = jacobi_coefficients_in_t(e.k, e.s, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) sum += c[i] * c[j] / (e.s + static_cast<double>(i + j) + 1.0);
    return e.scale * e.scale * e.lambda * std::numbers::pi * sum;
}

double integral_f_u_quadrature(const Mesh& mesh, const ExactSolution& exact) {
    return integrate_domain(mesh, [&](const Point& x, const Eigen::Vector3d&, const Triangle&) {
        return exact.f(x) * exact.u(x);
    });
}

double l2_error(const Mesh& mesh, const Eigen::VectorXd& values, const ExactSolution& exact) {
    if (values.size() != static_cast<Eigen::Index>(mesh.num_nodes()))
        throw ValidationError("l2_error: value vector does not match the mesh");
    const double sq = integrate_domain(mesh, [&](const Point& x, const Eigen::Vector3d& lam, const Triangle& tri) {
        const double uh = lam(0) * values(tri[0]) + lam(1) * values(tri[1]) + lam(2) * values(tri[2]);
        const double d = exact.u(x) - uh;
        return d * d;
    });
    return std::sqrt(sq);
}

double energy_error(const Mesh& mesh, const Eigen::MatrixXd& K, const Solution& solution, const ExactSolution& exact) {
    const double radicand = integral_f_u(exact) - discrete_energy(mesh, K, solution);
    if (radicand < -1e-10)
        throw NumericalError("energy_error: negative radicand " + std::to_string(radicand) +
                             " (inconsistent system, solution or exact pair)");
    return std::sqrt(std::max(radicand, 0.0));
}

}  // namespace fracfem
