#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fracfem {

using Index = std::int32_t;
using Point = Eigen::Vector2d;
using Triangle = std::array<Index, 3>;

/// Triangulation of an enclosing ball B(0, R): the domain triangles come first,
/// the auxiliary triangles covering B minus the domain come last.
///
/// Nodes that belong only to auxiliary triangles, together with the nodes on the
/// domain boundary, carry homogeneous Dirichlet data.
struct Mesh {
    std::vector<Point> nodes;
    std::vector<Triangle> triangles;
    std::size_t n_aux = 0;
    std::vector<Index> boundary_nodes;
    std::vector<Index> free_nodes;
    double ball_radius = 0.0;

    std::size_t num_nodes() const noexcept { return nodes.size(); }
    std::size_t num_triangles() const noexcept { return triangles.size(); }
    std::size_t num_domain_triangles() const noexcept { return triangles.size() - n_aux; }
    bool is_auxiliary(std::size_t t) const noexcept { return t >= num_domain_triangles(); }
};

/// Checks every structural invariant of a Mesh and throws ValidationError on the
/// first violation: index ranges, positive areas, node sets, ball containment and
/// conformity (no edge used by more than two triangles, no hanging vertices).
void validate(const Mesh& mesh);

double triangle_area(const Point& a, const Point& b, const Point& c);
double triangle_area(const Mesh& mesh, std::size_t t);
std::vector<double> triangle_areas(const Mesh& mesh);

/// Diameter (longest edge) and inradius of a triangle.
double triangle_diameter(const Point& a, const Point& b, const Point& c);
double triangle_inradius(const Point& a, const Point& b, const Point& c);

/// Maximum of h_T / rho_T over all triangles.
double shape_regularity(const Mesh& mesh);
/// Maximum triangle diameter over the domain triangles.
double mesh_size(const Mesh& mesh);

/// Affine map x = B * xhat + offset from the reference triangle with vertices
/// (0,0), (1,0), (1,1) onto a physical triangle.
struct ElementMap {
    Eigen::Matrix2d matrix_B;
    Point offset;
    double area = 0.0;

    Point operator()(const Point& xhat) const { return matrix_B * xhat + offset; }
};

/// Map sending the reference vertices to (v0, v1, v2) in that order.
ElementMap make_element_map(const Point& v0, const Point& v1, const Point& v2);
ElementMap element_map(const Mesh& mesh, std::size_t t);

/// For every node, the indices of the triangles incident to it (ascending).
class PatchIndex {
public:
    PatchIndex() = default;
    explicit PatchIndex(const Mesh& mesh);

    std::span<const Index> patch(std::size_t node) const {
        return {indices_.data() + offsets_[node], indices_.data() + offsets_[node + 1]};
    }
    std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t total_size() const noexcept { return indices_.size(); }

private:
    std::vector<std::size_t> offsets_;
    std::vector<Index> indices_;
};

PatchIndex build_patches(const Mesh& mesh);

enum class PairKind { Identical, Edge, Vertex, Disjoint };

const char* to_string(PairKind kind);

/// Geometric relation between two closed triangles plus the local node numbering
/// used by the interaction kernels:
///   Identical: the 3 nodes of T_l;
///   Vertex:    shared node, the other two of T_l, the other two of T_m;
///   Edge:      the two shared nodes (in T_l order), the node only in T_l, the node only in T_m;
///   Disjoint:  the 3 nodes of T_l followed by the 3 nodes of T_m.
struct PairClass {
    PairKind kind = PairKind::Disjoint;
    std::array<Index, 6> ordered_nodes{};
    int count = 0;

    std::span<const Index> nodes() const { return {ordered_nodes.data(), static_cast<std::size_t>(count)}; }
};

PairClass classify_pair(const Mesh& mesh, std::size_t l, std::size_t m);

/// Triangles with index strictly greater than l, split by how they touch T_l.
struct PairLists {
    std::vector<Index> disjoint;
    std::vector<Index> vertex;
    std::vector<Index> edge;
};

/// Linear-time classification of all triangles m > l against T_l using the patch lists.
void classify_all_against(const Mesh& mesh, const PatchIndex& patches, std::size_t l, PairLists& out);
PairLists classify_all_against(const Mesh& mesh, const PatchIndex& patches, std::size_t l);

// FRACMESH text format.
Mesh read_mesh(std::istream& in);
Mesh load_mesh(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);
void save_mesh(const std::string& path, const Mesh& mesh);

struct DiskMeshOptions {
    /// Upper bound on the total triangle count; generation fails beyond it.
    std::size_t max_triangles = 2'000'000;
};

/// Concentric-ring triangulation of the disk of radius domain_radius, extended by
/// rings of auxiliary triangles out to ball_radius.
Mesh generate_disk_mesh(double domain_radius, double target_h, double ball_radius,
                        const DiskMeshOptions& options = {});

}  // namespace fracfem
