#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracfem/error.hpp"
#include "fracfem/mesh.hpp"

namespace fracfem {

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-blank, non-comment line split into tokens.
    std::vector<std::string> next(const char* expecting) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ss(line);
            std::vector<std::string> tokens;
            for (std::string tok; ss >> tok;) tokens.push_back(tok);
            if (!tokens.empty()) return tokens;
        }
        throw ParseError(std::string("unexpected end of file, expecting ") + expecting, line_ + 1);
    }

    std::size_t line() const { return line_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

    double to_double(const std::string& s) const {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail("invalid number '" + s + "'");
        return v;
    }

    long long to_int(const std::string& s) const {
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) fail("invalid integer '" + s + "'");
        return v;
    }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

std::size_t checked_count(LineReader& r, const std::string& s) {
    const long long v = r.to_int(s);
    if (v < 0) r.fail("negative count");
    return static_cast<std::size_t>(v);
}

std::vector<Index> read_index_block(LineReader& r, std::size_t count, std::size_t nn, const char* what) {
    std::vector<Index> out;
    out.reserve(count);
    while (out.size() < count) {
        const auto tok = r.next(what);
        for (const auto& t : tok) {
            const long long v = r.to_int(t);
            if (v < 0 || static_cast<std::size_t>(v) >= nn)
                r.fail(std::string(what) + " index " + t + " out of range");
            out.push_back(static_cast<Index>(v));
            if (out.size() > count) r.fail(std::string("too many ") + what + " indices");
        }
    }
    return out;
}

}  // namespace

Mesh read_mesh(std::istream& in) {
    LineReader r(in);
    Mesh mesh;

    auto tok = r.next("FRACMESH header");
    if (tok.size() != 2 || tok[0] != "FRACMESH") r.fail("missing 'FRACMESH <version>' header");
    if (tok[1] != "1") r.fail("unsupported format version " + tok[1]);

    tok = r.next("nodes");
    if (tok.size() != 2 || tok[0] != "nodes") r.fail("expected 'nodes <count>'");
    const std::size_t nn = checked_count(r, tok[1]);
    mesh.nodes.reserve(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        tok = r.next("node coordinates");
        if (tok.size() != 2) r.fail("expected two node coordinates");
        mesh.nodes.emplace_back(r.to_double(tok[0]), r.to_double(tok[1]));
    }

    tok = r.next("triangles");
    if (tok.size() != 3 || tok[0] != "triangles") r.fail("expected 'triangles <count> <n_aux>'");
    const std::size_t nt = checked_count(r, tok[1]);
    mesh.n_aux = checked_count(r, tok[2]);
    if (mesh.n_aux > nt) r.fail("n_aux exceeds triangle count");
    mesh.triangles.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        tok = r.next("triangle");
        if (tok.size() != 3) r.fail("expected three node indices");
        Triangle tri;
        for (int k = 0; k < 3; ++k) {
            const long long v = r.to_int(tok[k]);
            if (v < 0 || static_cast<std::size_t>(v) >= nn) r.fail("node index " + tok[k] + " out of range");
            tri[k] = static_cast<Index>(v);
        }
        const Point &a = mesh.nodes[tri[0]], &b = mesh.nodes[tri[1]], &c = mesh.nodes[tri[2]];
        const double diam = triangle_diameter(a, b, c);
        if (!(triangle_area(a, b, c) > 1e-14 * diam * diam)) r.fail("degenerate triangle");
        mesh.triangles.push_back(tri);
    }

    tok = r.next("boundary");
    if (tok.size() != 2 || tok[0] != "boundary") r.fail("expected 'boundary <count>'");
    mesh.boundary_nodes = read_index_block(r, checked_count(r, tok[1]), nn, "boundary");

    tok = r.next("free");
    if (tok.size() != 2 || tok[0] != "free") r.fail("expected 'free <count>'");
    mesh.free_nodes = read_index_block(r, checked_count(r, tok[1]), nn, "free");

    tok = r.next("ball_radius");
    if (tok.size() != 2 || tok[0] != "ball_radius") r.fail("expected 'ball_radius <R>'");
    mesh.ball_radius = r.to_double(tok[1]);

    validate(mesh);
    return mesh;
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open mesh file " + path);
    return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
    out << "FRACMESH 1\n";
    out << "nodes " << mesh.num_nodes() << '\n' << std::setprecision(17);
    for (const Point& p : mesh.nodes) out << p.x() << ' ' << p.y() << '\n';
    out << "triangles " << mesh.num_triangles() << ' ' << mesh.n_aux << '\n';
    for (const Triangle& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    auto block = [&](const char* name, const std::vector<Index>& v) {
        out << name << ' ' << v.size() << '\n';
        for (std::size_t i = 0; i < v.size(); ++i) out << v[i] << ((i % 16 == 15 || i + 1 == v.size()) ? '\n' : ' ');
    };
    block("boundary", mesh.boundary_nodes);
    block("free", mesh.free_nodes);
    out << "ball_radius " << mesh.ball_radius << '\n';
}

void save_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    write_mesh(out, mesh);
    if (!out) throw ValidationError("write failed for " + path);
}

}  // namespace fracfem
