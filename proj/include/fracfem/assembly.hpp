#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include <Eigen/Core>

#include "fracfem/mesh.hpp"
#include "fracfem/quadtables.hpp"

namespace fracfem {

using Source = std::function<double(const Point&)>;

/// C(2,s)/2 = s 2^{2s-1} Gamma(1+s) / (pi Gamma(1-s)).
double normalization_constant(double s);

/// Edge-midpoint rule for the integrals of f against the three hat functions of a triangle.
Eigen::Vector3d load_element(const Point& a, const Point& b, const Point& c, const Source& f);

struct AssemblyOptions {
    int threads = 1;
    /// Ordered reduction: bit-identical results for any thread count.
    bool deterministic = true;
    std::size_t memory_cap_bytes = std::size_t{2} << 30;
    /// Multiply K by C(2,s)/2 at the end; off gives the bare sum of element blocks.
    bool fold_constant = true;
};

struct AssemblyStats {
    double identical_seconds = 0, complement_seconds = 0, disjoint_seconds = 0, vertex_seconds = 0,
           edge_seconds = 0, scatter_seconds = 0, total_seconds = 0;
    std::size_t identical_pairs = 0, disjoint_pairs = 0, vertex_pairs = 0, edge_pairs = 0;
    /// Smallest distance between quadrature points of two disjoint elements.
    double min_disjoint_distance = INFINITY;
};

/// Dense symmetric stiffness matrix over all nodes and the load vector.
struct StiffnessSystem {
    Eigen::MatrixXd K;
    Eigen::VectorXd b;
    double s = 0.0;
    double cns = 0.0;
    AssemblyStats stats;
};

/// Bytes needed to assemble a mesh of this size (dense matrix plus work buffers).
std::size_t assembly_memory_estimate(const Mesh& mesh, const QuadTables& tables, const AssemblyOptions& options);

Eigen::MatrixXd assemble_stiffness(const Mesh& mesh, double s, const QuadTables& tables,
                                   const AssemblyOptions& options = {}, AssemblyStats* stats = nullptr);
Eigen::VectorXd assemble_load(const Mesh& mesh, const Source& f);

StiffnessSystem assemble(const Mesh& mesh, double s, const Source& f, const QuadTables& tables,
                         const AssemblyOptions& options = {});

/// Reference assembler: every ordered element pair with at least one domain element,
/// classified by vertex-set intersection, no symmetry shortcuts. Meant for small meshes.
Eigen::MatrixXd assemble_stiffness_brute_force(const Mesh& mesh, double s, const QuadTables& tables,
                                               bool fold_constant = true);

/// Writes K and b as CSV; refuses systems with more than `max_nodes` nodes.
void write_system_csv(const std::string& path, const StiffnessSystem& system, std::size_t max_nodes = 2000);

}  // namespace fracfem
