#include "fracfem/mesh.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "fracfem/error.hpp"

namespace fracfem {

double triangle_area(const Point& a, const Point& b, const Point& c) {
    const Point u = b - a, v = c - a;
    return 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
}

double triangle_area(const Mesh& mesh, std::size_t t) {
    const Triangle& tri = mesh.triangles[t];
    return triangle_area(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
}

std::vector<double> triangle_areas(const Mesh& mesh) {
    std::vector<double> out(mesh.num_triangles());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = triangle_area(mesh, t);
    return out;
}

double triangle_diameter(const Point& a, const Point& b, const Point& c) {
    return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

double triangle_inradius(const Point& a, const Point& b, const Point& c) {
    const double perimeter = (b - a).norm() + (c - b).norm() + (a - c).norm();
    return 2.0 * triangle_area(a, b, c) / perimeter;
}

double shape_regularity(const Mesh& mesh) {
    double sigma = 0.0;
    for (const Triangle& t : mesh.triangles) {
        const Point &a = mesh.nodes[t[0]], &b = mesh.nodes[t[1]], &c = mesh.nodes[t[2]];
        sigma = std::max(sigma, triangle_diameter(a, b, c) / triangle_inradius(a, b, c));
    }
    return sigma;
}

double mesh_size(const Mesh& mesh) {
    double h = 0.0;
    for (std::size_t t = 0; t < mesh.num_domain_triangles(); ++t) {
        const Triangle& tri = mesh.triangles[t];
        h = std::max(h, triangle_diameter(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]));
    }
    return h;
}

ElementMap make_element_map(const Point& v0, const Point& v1, const Point& v2) {
    ElementMap m;
    m.matrix_B.col(0) = v1 - v0;
    m.matrix_B.col(1) = v2 - v1;
    m.offset = v0;
    m.area = 0.5 * std::abs(m.matrix_B.determinant());
    return m;
}

ElementMap element_map(const Mesh& mesh, std::size_t t) {
    const Triangle& tri = mesh.triangles[t];
    return make_element_map(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
}

void validate(const Mesh& mesh) {
    const std::size_t nn = mesh.num_nodes(), nt = mesh.num_triangles();
    if (nn == 0) throw ValidationError("mesh has no nodes");
    if (nt == 0) throw ValidationError("mesh has no triangles");
    if (mesh.n_aux > nt) throw ValidationError("auxiliary triangle count exceeds triangle count");
    if (mesh.n_aux == nt) throw ValidationError("mesh has no domain triangles");
    if (!(mesh.ball_radius > 0.0) || !std::isfinite(mesh.ball_radius))
        throw ValidationError("ball radius must be positive");

    const double R = mesh.ball_radius;
    for (std::size_t i = 0; i < nn; ++i) {
        const Point& p = mesh.nodes[i];
        if (!p.allFinite()) throw ValidationError("node " + std::to_string(i) + " has non-finite coordinates");
        if (p.norm() > R * (1.0 + 1e-12))
            throw ValidationError("node " + std::to_string(i) + " lies outside the ball of radius " +
                                  std::to_string(R));
    }

    // 0: unused, 1: domain triangle, 2: auxiliary triangle, 3: both
    std::vector<unsigned char> use(nn, 0);
    for (std::size_t t = 0; t < nt; ++t) {
        const Triangle& tri = mesh.triangles[t];
        for (Index v : tri)
            if (v < 0 || static_cast<std::size_t>(v) >= nn)
                throw ValidationError("triangle " + std::to_string(t) + " references node out of range");
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw ValidationError("triangle " + std::to_string(t) + " repeats a node");
        const Point &a = mesh.nodes[tri[0]], &b = mesh.nodes[tri[1]], &c = mesh.nodes[tri[2]];
        const double diam = triangle_diameter(a, b, c);
        if (!(triangle_area(a, b, c) > 1e-14 * diam * diam))
            throw ValidationError("triangle " + std::to_string(t) + " is degenerate");
        for (Index v : tri) use[v] |= mesh.is_auxiliary(t) ? 2 : 1;
    }
    for (std::size_t i = 0; i < nn; ++i)
        if (!use[i]) throw ValidationError("node " + std::to_string(i) + " belongs to no triangle");

    std::vector<unsigned char> tag(nn, 0);  // 1 boundary, 2 free
    auto mark = [&](const std::vector<Index>& set, unsigned char value, const char* name) {
        for (Index v : set) {
            if (v < 0 || static_cast<std::size_t>(v) >= nn)
                throw ValidationError(std::string(name) + " node index out of range");
            if (tag[v] == value) throw ValidationError(std::string(name) + " node listed twice");
            if (tag[v]) throw ValidationError("node " + std::to_string(v) + " is both free and boundary");
            tag[v] = value;
        }
    };
    mark(mesh.boundary_nodes, 1, "boundary");
    mark(mesh.free_nodes, 2, "free");
    for (std::size_t i = 0; i < nn; ++i) {
        if (tag[i] == 2 && use[i] != 1)
            throw ValidationError("free node " + std::to_string(i) + " touches an auxiliary triangle");
        if (tag[i] != 0 && !(use[i] & 1))
            throw ValidationError("node " + std::to_string(i) + " is tagged but outside the domain");
        if (tag[i] == 0 && (use[i] & 1))
            throw ValidationError("domain node " + std::to_string(i) + " is neither free nor boundary");
    }

    // Conformity: each edge used at most twice; domain-boundary edges join boundary nodes.
    struct EdgeUse {
        int total = 0;
        int domain = 0;
    };
    std::unordered_map<std::uint64_t, EdgeUse> edges;
    edges.reserve(3 * nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const Triangle& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const auto a = static_cast<std::uint64_t>(std::min(tri[e], tri[(e + 1) % 3]));
            const auto b = static_cast<std::uint64_t>(std::max(tri[e], tri[(e + 1) % 3]));
            EdgeUse& u = edges[(a << 32) | b];
            ++u.total;
            if (!mesh.is_auxiliary(t)) ++u.domain;
            if (u.total > 2)
                throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                      ") is shared by more than two triangles");
        }
    }
    for (const auto& [key, u] : edges) {
        if (u.domain != 1) continue;
        const auto a = static_cast<std::size_t>(key >> 32), b = static_cast<std::size_t>(key & 0xffffffffu);
        if (tag[a] != 1 || tag[b] != 1)
            throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") lies on the domain boundary but a node is not a boundary node");
    }
}

PatchIndex::PatchIndex(const Mesh& mesh) {
    const std::size_t nn = mesh.num_nodes();
    offsets_.assign(nn + 1, 0);
    for (const Triangle& t : mesh.triangles)
        for (Index v : t) ++offsets_[v + 1];
    for (std::size_t i = 0; i < nn; ++i) offsets_[i + 1] += offsets_[i];
    indices_.resize(offsets_[nn]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
        for (Index v : mesh.triangles[t]) indices_[fill[v]++] = static_cast<Index>(t);
}

PatchIndex build_patches(const Mesh& mesh) { return PatchIndex(mesh); }

const char* to_string(PairKind kind) {
    switch (kind) {
        case PairKind::Identical: return "identical";
        case PairKind::Edge: return "edge";
        case PairKind::Vertex: return "vertex";
        case PairKind::Disjoint: return "disjoint";
    }
    return "?";
}

PairClass classify_pair(const Mesh& mesh, std::size_t l, std::size_t m) {
    const Triangle& tl = mesh.triangles[l];
    const Triangle& tm = mesh.triangles[m];
    PairClass pc;
    auto in = [](const Triangle& t, Index v) { return t[0] == v || t[1] == v || t[2] == v; };

    if (l == m) {
        pc.kind = PairKind::Identical;
        pc.count = 3;
        std::copy(tl.begin(), tl.end(), pc.ordered_nodes.begin());
        return pc;
    }
    int shared = 0;
    for (Index v : tl) shared += in(tm, v);

    switch (shared) {
        case 0:
            pc.kind = PairKind::Disjoint;
            pc.count = 6;
            std::copy(tl.begin(), tl.end(), pc.ordered_nodes.begin());
            std::copy(tm.begin(), tm.end(), pc.ordered_nodes.begin() + 3);
            break;
        case 1: {
            pc.kind = PairKind::Vertex;
            pc.count = 5;
            int k = 1;
            for (Index v : tl)
                if (in(tm, v)) pc.ordered_nodes[0] = v;
            for (Index v : tl)
                if (v != pc.ordered_nodes[0]) pc.ordered_nodes[k++] = v;
            for (Index v : tm)
                if (v != pc.ordered_nodes[0]) pc.ordered_nodes[k++] = v;
            break;
        }
        case 2: {
            pc.kind = PairKind::Edge;
            pc.count = 4;
            int k = 0;
            for (Index v : tl)
                if (in(tm, v)) pc.ordered_nodes[k++] = v;
            for (Index v : tl)
                if (!in(tm, v)) pc.ordered_nodes[2] = v;
            for (Index v : tm)
                if (!in(tl, v)) pc.ordered_nodes[3] = v;
            break;
        }
        default:
            throw ValidationError("triangles " + std::to_string(l) + " and " + std::to_string(m) +
                                  " have the same vertex set");
    }
    return pc;
}

void classify_all_against(const Mesh& mesh, const PatchIndex& patches, std::size_t l, PairLists& out) {
    out.disjoint.clear();
    out.vertex.clear();
    out.edge.clear();

    // Touching triangles above l, repeated once per shared vertex.
    std::vector<Index> touching;
    for (Index v : mesh.triangles[l])
        for (Index t : patches.patch(v))
            if (static_cast<std::size_t>(t) > l) touching.push_back(t);
    std::sort(touching.begin(), touching.end());

    std::size_t i = 0;
    std::vector<Index> distinct;
    while (i < touching.size()) {
        std::size_t j = i;
        while (j < touching.size() && touching[j] == touching[i]) ++j;
        (j - i >= 2 ? out.edge : out.vertex).push_back(touching[i]);
        distinct.push_back(touching[i]);
        i = j;
    }

    const std::size_t nt = mesh.num_triangles();
    out.disjoint.reserve(nt - l - 1 - distinct.size());
    std::size_t k = 0;
    for (std::size_t m = l + 1; m < nt; ++m) {
        if (k < distinct.size() && static_cast<std::size_t>(distinct[k]) == m) {
            ++k;
            continue;
        }
        out.disjoint.push_back(static_cast<Index>(m));
    }
}

PairLists classify_all_against(const Mesh& mesh, const PatchIndex& patches, std::size_t l) {
    PairLists out;
    classify_all_against(mesh, patches, l, out);
    return out;
}

}  // namespace fracfem
