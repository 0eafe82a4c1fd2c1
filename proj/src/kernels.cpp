#include "fracfem/kernels.hpp"

#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <string>

#include "fracfem/error.hpp"

namespace fracfem {

namespace {

// |v|^{-(2+2s)} computed from the squared norm.
inline double inv_pow(const Eigen::Vector2d& v, double s) { return std::pow(v.squaredNorm(), -1.0 - s); }

void check_map(const Eigen::Matrix2d& B, const char* where) {
    const double scale = B.col(0).squaredNorm() + B.col(1).squaredNorm();
    if (!(std::abs(B.determinant()) > 1e-14 * scale)) throw NumericalError(std::string(where) + ": degenerate element");
}

double area_of(const Eigen::Matrix2d& B) { return 0.5 * std::abs(B.determinant()); }

}  // namespace

void check_order(double s) {
    if (!(s > 0.0 && s < 1.0)) throw ValidationError("fractional order s must lie in (0,1), got " + std::to_string(s));
}

Block6 nontouching_block(const ElementMap& map_l, const ElementMap& map_m, double s, const QuadTables& tables,
                         double* min_distance) {
    check_order(s);
    check_map(map_l.matrix_B, "nontouching_block");
    check_map(map_m.matrix_B, "nontouching_block");
    const QuadRule& rule = tables.tri_near;
    const Eigen::Index n = rule.size();
    Eigen::MatrixXd xl(n, 2), xm(n, 2);
    for (Eigen::Index q = 0; q < n; ++q) {
        const Point p(rule.points(q, 0), rule.points(q, 1));
        xl.row(q) = map_l(p).transpose();
        xm.row(q) = map_m(p).transpose();
    }
    Eigen::VectorXd d(n * n);
    double dmin2 = INFINITY;
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index q = 0; q < n; ++q) {
            const double r2 = (xl.row(q) - xm.row(k)).squaredNorm();
            dmin2 = std::min(dmin2, r2);
            d(q + n * k) = std::pow(r2, -1.0 - s);
        }
    if (min_distance) *min_distance = std::sqrt(dmin2);
    if (dmin2 < 1e-28) throw NumericalError("nontouching_block: elements touch (quadrature points coincide)");

    const Eigen::VectorXd a = tables.phiA * d, b = tables.phiB * d, dd = tables.phiD * d;
    Block6 out;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            out(i, j) = a(i + 3 * j);
            out(i, j + 3) = b(i + 3 * j);
            out(j + 3, i) = b(i + 3 * j);
            out(i + 3, j + 3) = dd(i + 3 * j);
        }
    return 4.0 * map_l.area * map_m.area * out;
}

Block5 vertex_block(const Point& v, const Point& l1, const Point& l2, const Point& m1, const Point& m2, double s,
                    const QuadTables& tables) {
    check_order(s);
    Eigen::Matrix2d Bl, Bm;
    Bl << l1 - v, l2 - l1;
    Bm << m1 - v, m2 - m1;
    check_map(Bl, "vertex_block");
    check_map(Bm, "vertex_block");

    const QuadRule& cube = tables.cube;
    const Eigen::Index nq = cube.size();
    Eigen::VectorXd d1(nq), d2(nq);
    for (Eigen::Index k = 0; k < nq; ++k) {
        const double x = cube.points(k, 0), y = cube.points(k, 1), z = cube.points(k, 2);
        d1(k) = inv_pow(Bl * Eigen::Vector2d(1.0, x) - Bm * Eigen::Vector2d(y, y * z), s);
        d2(k) = inv_pow(Bm * Eigen::Vector2d(1.0, x) - Bl * Eigen::Vector2d(y, y * z), s);
    }
    const Eigen::VectorXd hat = tables.vpsi[0] * d1 + tables.vpsi[1] * d2;
    const double scale = 4.0 * area_of(Bl) * area_of(Bm) / (4.0 - 2.0 * s);
    Block5 out;
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) out(i, j) = scale * hat(i + 5 * j);
    return out;
}

Block4 edge_block(const Point& p1, const Point& p2, const Point& l3, const Point& m3, double s,
                  const QuadTables& tables) {
    check_order(s);
    Eigen::Matrix2d Bl, Bm;
    Bl << p2 - p1, l3 - p2;
    Bm << p2 - p1, m3 - p2;
    check_map(Bl, "edge_block");
    check_map(Bm, "edge_block");

    using V = Eigen::Vector2d;
    const QuadRule& cube = tables.cube;
    const Eigen::Index nq = cube.size();
    Eigen::Matrix<double, Eigen::Dynamic, 5> d(nq, 5);
    for (Eigen::Index k = 0; k < nq; ++k) {
        const double x = cube.points(k, 0), y = cube.points(k, 1), z = cube.points(k, 2);
        d(k, 0) = inv_pow(Bl * V(1.0, x * z) - Bm * V(1.0 - x * y, x * (1.0 - y)), s);
        d(k, 1) = inv_pow(Bl * V(1.0, x) - Bm * V(1.0 - x * y * z, x * y * (1.0 - z)), s);
        d(k, 2) = inv_pow(Bl * V(1.0 - x * y, x * (1.0 - y)) - Bm * V(1.0, x * y * z), s);
        d(k, 3) = inv_pow(Bl * V(1.0 - x * y * z, x * y * (1.0 - z)) - Bm * V(1.0, x), s);
        d(k, 4) = inv_pow(Bl * V(1.0 - x * y * z, x * (1.0 - y * z)) - Bm * V(1.0, x * y), s);
    }
    Eigen::VectorXd hat = tables.epsi[0] * d.col(0);
    for (int h = 1; h < 5; ++h) hat += tables.epsi[h] * d.col(h);
    const double scale = 4.0 * area_of(Bl) * area_of(Bm) / (4.0 - 2.0 * s);
    Block4 out;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) out(i, j) = scale * hat(i + 4 * j);
    return out;
}

Block3 identical_block(const ElementMap& map, double s, const QuadTables& tables) {
    check_order(s);
    check_map(map.matrix_B, "identical_block");
    const Eigen::Matrix2d& B = map.matrix_B;
    const QuadRule& rule = tables.interval;
    const Eigen::Index nq = rule.size();
    Eigen::VectorXd d1(nq), d2(nq), d3(nq);
    for (Eigen::Index k = 0; k < nq; ++k) {
        const double x = rule.points(k, 0);
        d1(k) = inv_pow(B * Eigen::Vector2d(x, 1.0), s);
        d2(k) = inv_pow(B * Eigen::Vector2d(1.0, x), s);
        d3(k) = inv_pow(B * Eigen::Vector2d(x, x - 1.0), s);
    }
    const Eigen::VectorXd hat = tables.tpsi[0] * d1 + tables.tpsi[1] * d2 + tables.tpsi[2] * d3;
    const double a = map.area;
    const double scale = 8.0 * a * a / ((4.0 - 2.0 * s) * (3.0 - 2.0 * s) * (2.0 - 2.0 * s));
    Block3 out;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) out(i, j) = scale * hat(i + 3 * j);
    return out;
}

double psi_complement(const Point& x, double R, double s, const QuadTables& tables) {
    check_order(s);
    const double r = x.norm();
    if (!(R > 0.0) || !(r < R)) throw ValidationError("psi_complement: point must lie inside the ball");
    const QuadRule& ang = tables.angular;
    double sum = 0.0;
    for (Eigen::Index q = 0; q < ang.size(); ++q) {
        const double theta = 2.0 * std::numbers::pi * ang.points(q, 0);
        const double sn = std::sin(theta);
        const double rho = -r * std::cos(theta) + std::sqrt(R * R - r * r * sn * sn);
        sum += ang.weights(q) * std::pow(rho, -2.0 * s);
    }
    return std::numbers::pi / s * sum;
}

Block3 complement_block(const ElementMap& map, double R, double s, const QuadTables& tables) {
    check_order(s);
    check_map(map.matrix_B, "complement_block");
    const double tol = R * (1.0 + 1e-12);
    const Point v1 = map.offset + map.matrix_B.col(0);
    if (map.offset.norm() > tol || v1.norm() > tol || (v1 + map.matrix_B.col(1)).norm() > tol)
        throw ValidationError("complement_block: element is not contained in the ball");
    const QuadRule& rule = tables.tri_comp;
    Eigen::VectorXd psi(rule.size());
    for (Eigen::Index k = 0; k < rule.size(); ++k)
        psi(k) = psi_complement(map(Point(rule.points(k, 0), rule.points(k, 1))), R, s, tables);
    const Eigen::VectorXd hat = tables.cphi * psi;
    Block3 out;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) out(i, j) = 4.0 * map.area * hat(i + 3 * j);
    return out;
}

Eigen::MatrixXd pair_block(const Mesh& mesh, const PairClass& pair, std::size_t l, std::size_t m, double s,
                           const QuadTables& tables) {
    const auto& o = pair.ordered_nodes;
    auto P = [&](int k) -> const Point& { return mesh.nodes[o[k]]; };
    switch (pair.kind) {
        case PairKind::Identical: return identical_block(element_map(mesh, l), s, tables);
        case PairKind::Vertex: return vertex_block(P(0), P(1), P(2), P(3), P(4), s, tables);
        case PairKind::Edge: return edge_block(P(0), P(1), P(2), P(3), s, tables);
        case PairKind::Disjoint:
            return nontouching_block(element_map(mesh, l), element_map(mesh, m), s, tables);
    }
    return {};
}

}  // namespace fracfem
