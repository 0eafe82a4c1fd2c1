#include <cmath>
#include <numbers>
#include <string>

#include "fracfem/error.hpp"
#include "fracfem/mesh.hpp"

namespace fracfem {

namespace {

struct Ring {
    Index first = 0;  // index of node at angle 0
    int count = 1;    // 1 for the center
};

// Triangulates the band between two consecutive rings by merging their nodes in angle order.
void zip(const Mesh& mesh, const Ring& inner, const Ring& outer, std::vector<Triangle>& out) {
    auto node = [](const Ring& r, int j) { return static_cast<Index>(r.first + (j % r.count)); };
    if (inner.count == 1) {
        for (int j = 0; j < outer.count; ++j) out.push_back({inner.first, node(outer, j), node(outer, j + 1)});
        return;
    }
    int a = 0, b = 0;
    while (a < inner.count || b < outer.count) {
        const double ta = (a + 1.0) / inner.count, tb = (b + 1.0) / outer.count;
        bool advance_inner;
        if (a == inner.count)
            advance_inner = false;
        else if (b == outer.count)
            advance_inner = true;
        else if (std::abs(ta - tb) < 1e-12) {
            const double d_in = (mesh.nodes[node(inner, a + 1)] - mesh.nodes[node(outer, b)]).norm();
            const double d_out = (mesh.nodes[node(outer, b + 1)] - mesh.nodes[node(inner, a)]).norm();
            advance_inner = d_in <= d_out;
        } else
            advance_inner = ta < tb;
        if (advance_inner) {
            out.push_back({node(inner, a), node(inner, a + 1), node(outer, b)});
            ++a;
        } else {
            out.push_back({node(inner, a), node(outer, b + 1), node(outer, b)});
            ++b;
        }
    }
}

}  // namespace

Mesh generate_disk_mesh(double domain_radius, double target_h, double ball_radius, const DiskMeshOptions& options) {
    if (!(domain_radius > 0.0) || !std::isfinite(domain_radius))
        throw ValidationError("domain radius must be positive");
    if (!(ball_radius >= domain_radius) || !std::isfinite(ball_radius))
        throw ValidationError("ball radius must be at least the domain radius");
    if (!(target_h > 0.0) || !(target_h < domain_radius))
        throw ValidationError("target h must satisfy 0 < h < domain radius");

    const int n = static_cast<int>(std::ceil(domain_radius / target_h - 1e-9));
    const int m = ball_radius > domain_radius
                      ? static_cast<int>(std::ceil((ball_radius - domain_radius) / target_h - 1e-9))
                      : 0;
    const double total = 6.0 * double(n + m) * double(n + m);
    if (total > static_cast<double>(options.max_triangles))
        throw ValidationError("mesh would have " + std::to_string(static_cast<long long>(total)) +
                              " triangles, above the cap of " + std::to_string(options.max_triangles));

    Mesh mesh;
    mesh.ball_radius = ball_radius;
    mesh.nodes.emplace_back(0.0, 0.0);
    std::vector<Ring> rings{Ring{0, 1}};
    const double dr = domain_radius / n;
    const double dr_aux = m > 0 ? (ball_radius - domain_radius) / m : 0.0;
    for (int i = 1; i <= n + m; ++i) {
        double r = i <= n ? i * dr : domain_radius + (i - n) * dr_aux;
        if (i == n) r = domain_radius;
        if (i == n + m) r = i == n ? domain_radius : ball_radius;
        const int count = 6 * i;
        rings.push_back(Ring{static_cast<Index>(mesh.nodes.size()), count});
        for (int j = 0; j < count; ++j) {
            const double theta = 2.0 * std::numbers::pi * j / count;
            mesh.nodes.emplace_back(r * std::cos(theta), r * std::sin(theta));
        }
    }

    for (int i = 1; i <= n + m; ++i) {
        zip(mesh, rings[i - 1], rings[i], mesh.triangles);
        if (i == n) mesh.n_aux = mesh.triangles.size();
    }
    mesh.n_aux = mesh.triangles.size() - mesh.n_aux;

    for (Index v = 0; v < rings[n].first; ++v) mesh.free_nodes.push_back(v);
    for (int j = 0; j < rings[n].count; ++j) mesh.boundary_nodes.push_back(rings[n].first + j);

    validate(mesh);
    return mesh;
}

}  // namespace fracfem
