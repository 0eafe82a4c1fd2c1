#pragma once

#include <Eigen/Core>

#include "fracfem/mesh.hpp"
#include "fracfem/quadtables.hpp"

namespace fracfem {

using Block3 = Eigen::Matrix3d;
using Block4 = Eigen::Matrix4d;
using Block5 = Eigen::Matrix<double, 5, 5>;
using Block6 = Eigen::Matrix<double, 6, 6>;

/// Throws ValidationError unless 0 < s < 1.
void check_order(double s);

/// Interaction of two elements with disjoint closures. Local numbering: nodes of
/// T_l in map order, then nodes of T_m. Throws NumericalError if two quadrature
/// points coincide (distance below 1e-14); `min_distance` receives the smallest
/// point distance seen when non-null.
Block6 nontouching_block(const ElementMap& map_l, const ElementMap& map_m, double s, const QuadTables& tables,
                         double* min_distance = nullptr);

/// Elements sharing the vertex `v`. Local numbering: v, l1, l2, m1, m2.
Block5 vertex_block(const Point& v, const Point& l1, const Point& l2, const Point& m1, const Point& m2, double s,
                    const QuadTables& tables);

/// Elements sharing the edge p1-p2; l3 and m3 are the opposite vertices.
/// Local numbering: p1, p2, l3, m3.
Block4 edge_block(const Point& p1, const Point& p2, const Point& l3, const Point& m3, double s,
                  const QuadTables& tables);

/// Self-interaction of one element, local numbering as in the map.
Block3 identical_block(const ElementMap& map, double s, const QuadTables& tables);

/// Integral of |x-y|^{-(2+2s)} over y outside the ball B(0,R); requires |x| < R.
double psi_complement(const Point& x, double R, double s, const QuadTables& tables);

/// Twice the complement interaction of the element with the exterior of B(0,R).
Block3 complement_block(const ElementMap& map, double R, double s, const QuadTables& tables);

/// Block for a classified mesh pair in the pair's local numbering (3, 4, 5 or 6 nodes).
Eigen::MatrixXd pair_block(const Mesh& mesh, const PairClass& pair, std::size_t l, std::size_t m, double s,
                           const QuadTables& tables);

}  // namespace fracfem
