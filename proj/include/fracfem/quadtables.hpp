#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace fracfem {

/// Nodes (one per row) and weights of a quadrature rule.
struct QuadRule {
    Eigen::MatrixXd points;
    Eigen::VectorXd weights;

    Eigen::Index size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule on [0,1], nodes ascending. Exact to degree 2n-1.
QuadRule gauss_legendre_01(int n);

/// 9-point Gauss-Legendre rule on [0,1] listed in the order used by the reference tables.
QuadRule interval_rule_reference_order();

/// Symmetric rules on the reference triangle (0,0),(1,0),(1,1); weights sum to 1/2.
QuadRule triangle_rule_6();   // degree 4
QuadRule triangle_rule_12();  // degree 6

/// Collapsed (conical) Gauss product rule with n*n points on the reference triangle.
QuadRule triangle_rule_conical(int n);

/// Tensor Gauss-Legendre rule on [0,1]^3, third coordinate varying fastest.
QuadRule cube_rule(int n);

/// Quadrature orders. Defaults reproduce the reference choices; raising them is
/// meant for accuracy studies against the subdivision oracle.
struct QuadOrders {
    int cube = 3;          // points per direction on [0,1]^3 (vertex/edge cases)
    int interval = 9;      // points on [0,1] (identical case)
    int angular = 9;       // points on [0,2pi] (complement)
    int nontouching = 0;   // 0: 6-point symmetric rule, n > 0: n*n conical rule
    int complement = 0;    // 0: 12-point symmetric rule, n > 0: n*n conical rule

    bool is_default() const {
        return cube == 3 && interval == 9 && angular == 9 && nontouching == 0 && complement == 0;
    }
};

/// Quadrature data and the precomputed interaction matrices. Rows of every
/// matrix are indexed by i = a + n*b (0-based) for the local basis pair (a, b);
/// columns by quadrature point.
struct QuadTables {
    QuadOrders orders;

    QuadRule cube;         // p_cube, w_cube
    QuadRule tri_near;     // p_T_6, w_T_6
    QuadRule tri_comp;     // p_T_12, w_T_12
    QuadRule interval;     // p_I, w_I
    QuadRule angular;      // nodes in [0,1], scaled by 2pi on use

    // Non-touching: column q + n*k pairs point q on T_l with point k on T_m.
    Eigen::MatrixXd phiA, phiB, phiD;
    std::array<Eigen::MatrixXd, 2> vpsi;
    std::array<Eigen::MatrixXd, 5> epsi;
    std::array<Eigen::MatrixXd, 3> tpsi;
    Eigen::MatrixXd cphi;
};

QuadTables build_tables(const QuadOrders& orders = {});

/// Tables with default orders, built once.
const QuadTables& default_tables();

/// Writes every array as a labelled CSV section.
void write_tables_csv(std::ostream& out, const QuadTables& tables);
void dump_tables(const std::string& path, const QuadTables& tables);

}  // namespace fracfem
