#pragma once

#include <random>
#include <set>
#include <sstream>

#include "fracfem/mesh.hpp"

namespace testing_support {

using fracfem::Mesh;
using fracfem::Point;

inline Mesh single_triangle(double R = 10.0) {
    Mesh m;
    m.nodes = {Point(0, 0), Point(1, 0), Point(0, 1)};
    m.triangles = {{0, 1, 2}};
    m.boundary_nodes = {0, 1, 2};
    m.ball_radius = R;
    return m;
}

// Unit square split along its diagonal.
inline Mesh two_triangles(double R = 10.0) {
    Mesh m;
    m.nodes = {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    m.boundary_nodes = {0, 1, 2, 3};
    m.ball_radius = R;
    return m;
}

// Set of vertex indices shared by two triangles.
inline int shared_count(const Mesh& m, std::size_t a, std::size_t b) {
    std::set<fracfem::Index> sa(m.triangles[a].begin(), m.triangles[a].end());
    int n = 0;
    for (auto v : m.triangles[b]) n += static_cast<int>(sa.count(v));
    return n;
}

// Applies a node permutation: new index of old node i is perm[i].
inline Mesh renumber(const Mesh& m, const std::vector<fracfem::Index>& perm) {
    Mesh r = m;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) r.nodes[static_cast<std::size_t>(perm[i])] = m.nodes[i];
    for (auto& t : r.triangles)
        for (auto& v : t) v = perm[static_cast<std::size_t>(v)];
    for (auto& v : r.boundary_nodes) v = perm[static_cast<std::size_t>(v)];
    for (auto& v : r.free_nodes) v = perm[static_cast<std::size_t>(v)];
    return r;
}

}  // namespace testing_support
