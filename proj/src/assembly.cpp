#include "fracfem/assembly.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

#include "fracfem/error.hpp"
#include "fracfem/kernels.hpp"

namespace fracfem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct TouchingBlock {
    std::array<Index, 5> nodes{};
    int count = 0;
    Eigen::Matrix<double, 5, 5> M;
};

// Everything element l contributes, ready to be scattered.
struct ElementResult {
    Eigen::Matrix3d self = Eigen::Matrix3d::Zero();  // identical + complement + disjoint A-blocks
    std::vector<Index> partners;                     // disjoint m > l
    Eigen::MatrixXd cross;                           // rows 0..8: B(i + 3j), rows 9..17: D(i + 3j), one column per partner
    std::vector<TouchingBlock> touching;
    AssemblyStats stats;
};

// Upper-triangle accumulator over a dense column-major matrix.
struct UpperAccumulator {
    Eigen::MatrixXd& U;
    void add(Index a, Index b, double v) {
        if (a <= b)
            U(a, b) += v;
        else
            U(b, a) += v;
    }
    template <class M>
    void add_block(const Index* nodes, int n, const M& block) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i <= j; ++i) add(nodes[i], nodes[j], block(i, j));
    }
};

class Assembler {
public:
    Assembler(const Mesh& mesh, double s, const QuadTables& tables)
        : mesh_(mesh), s_(s), tables_(tables), patches_(mesh), areas_(triangle_areas(mesh)) {
        const QuadRule& rule = tables.tri_near;
        nq_ = rule.size();
        const std::size_t nt = mesh.num_triangles();
        px_.resize(nq_, static_cast<Eigen::Index>(nt));
        py_.resize(nq_, static_cast<Eigen::Index>(nt));
        for (std::size_t t = 0; t < nt; ++t) {
            const ElementMap map = element_map(mesh, t);
            for (Eigen::Index q = 0; q < nq_; ++q) {
                const Point x = map(Point(rule.points(q, 0), rule.points(q, 1)));
                px_(q, static_cast<Eigen::Index>(t)) = x.x();
                py_(q, static_cast<Eigen::Index>(t)) = x.y();
            }
        }
        phi_.resize(27, nq_ * nq_);
        phi_ << tables.phiA, tables.phiB, tables.phiD;
    }

    struct Workspace {
        PairLists lists;
        Eigen::ArrayXXd r2;
        Eigen::MatrixXd res;
    };

    void compute(std::size_t l, Workspace& ws, ElementResult& out) const {
        out.stats = {};
        out.touching.clear();
        auto t0 = Clock::now();
        const ElementMap map_l = element_map(mesh_, l);
        out.self = identical_block(map_l, s_, tables_);
        out.stats.identical_seconds = seconds_since(t0);
        out.stats.identical_pairs = 1;

        t0 = Clock::now();
        out.self += complement_block(map_l, mesh_.ball_radius, s_, tables_);
        out.stats.complement_seconds = seconds_since(t0);

        classify_all_against(mesh_, patches_, l, ws.lists);

        t0 = Clock::now();
        disjoint(l, ws, out);
        out.stats.disjoint_seconds = seconds_since(t0);

        t0 = Clock::now();
        for (Index m : ws.lists.vertex) touching(l, m, out);
        out.stats.vertex_seconds = seconds_since(t0);
        out.stats.vertex_pairs = ws.lists.vertex.size();

        t0 = Clock::now();
        for (Index m : ws.lists.edge) touching(l, m, out);
        out.stats.edge_seconds = seconds_since(t0);
        out.stats.edge_pairs = ws.lists.edge.size();
    }

private:
    void disjoint(std::size_t l, Workspace& ws, ElementResult& out) const {
        const auto& ms = ws.lists.disjoint;
        out.partners.assign(ms.begin(), ms.end());
        const Eigen::Index nm = static_cast<Eigen::Index>(ms.size());
        out.stats.disjoint_pairs = ms.size();
        out.cross.resize(18, nm);
        if (nm == 0) return;

        const Eigen::Index n = nq_, n2 = nq_ * nq_;
        const Eigen::Index lc = static_cast<Eigen::Index>(l);
        ws.r2.resize(n2, nm);
        for (Eigen::Index j = 0; j < nm; ++j) {
            const Eigen::Index m = ms[j];
            for (Eigen::Index k = 0; k < n; ++k) {
                const double xm = px_(k, m), ym = py_(k, m);
                for (Eigen::Index q = 0; q < n; ++q) {
                    const double dx = px_(q, lc) - xm, dy = py_(q, lc) - ym;
                    ws.r2(q + n * k, j) = dx * dx + dy * dy;
                }
            }
        }
        const double dmin2 = ws.r2.minCoeff();
        out.stats.min_disjoint_distance = std::sqrt(dmin2);
        if (dmin2 < 1e-28) throw NumericalError("assemble: quadrature points of disjoint elements coincide");
        ws.r2 = (ws.r2.log() * (-1.0 - s_)).exp();
        ws.res.noalias() = phi_ * ws.r2.matrix();

        // The factor 8 = 2 * 4 covers the pair (m, l).
        const double al = areas_[l];
        for (Eigen::Index j = 0; j < nm; ++j) {
            const double c = 8.0 * al * areas_[ms[j]];
            for (int i = 0; i < 9; ++i) out.self(i % 3, i / 3) += c * ws.res(i, j);
            out.cross.col(j) = c * ws.res.col(j).tail(18);
        }
    }

    void touching(std::size_t l, Index m, ElementResult& out) const {
        const PairClass pc = classify_pair(mesh_, l, static_cast<std::size_t>(m));
        const Eigen::MatrixXd block = pair_block(mesh_, pc, l, static_cast<std::size_t>(m), s_, tables_);
        TouchingBlock tb;
        tb.count = pc.count;
        std::copy_n(pc.ordered_nodes.begin(), pc.count, tb.nodes.begin());
        tb.M.setZero();
        tb.M.topLeftCorner(pc.count, pc.count) = 2.0 * block;
        out.touching.push_back(tb);
    }

    const Mesh& mesh_;
    double s_;
    const QuadTables& tables_;
    PatchIndex patches_;
    std::vector<double> areas_;
    Eigen::Index nq_ = 0;
    Eigen::MatrixXd px_, py_;
    Eigen::MatrixXd phi_;
};

class Scatter {
public:
    Scatter(const Mesh& mesh, Eigen::MatrixXd& U) : mesh_(mesh), acc_{U}, dacc_(mesh.num_triangles(), Eigen::Matrix3d::Zero()) {}

    void apply(std::size_t l, const ElementResult& r) {
        const Triangle& tl = mesh_.triangles[l];
        acc_.add_block(tl.data(), 3, r.self);
        for (std::size_t j = 0; j < r.partners.size(); ++j) {
            const Index m = r.partners[j];
            const Triangle& tm = mesh_.triangles[static_cast<std::size_t>(m)];
            const auto col = r.cross.col(static_cast<Eigen::Index>(j));
            for (int jj = 0; jj < 3; ++jj)
                for (int ii = 0; ii < 3; ++ii) acc_.add(tl[ii], tm[jj], col(ii + 3 * jj));
            dacc_[static_cast<std::size_t>(m)] += Eigen::Map<const Eigen::Matrix3d>(col.data() + 9);
        }
        for (const TouchingBlock& tb : r.touching) acc_.add_block(tb.nodes.data(), tb.count, tb.M);
    }

    void finish() {
        for (std::size_t m = 0; m < dacc_.size(); ++m) acc_.add_block(mesh_.triangles[m].data(), 3, dacc_[m]);
    }

private:
    const Mesh& mesh_;
    UpperAccumulator acc_;
    std::vector<Eigen::Matrix3d> dacc_;
};

void merge_stats(AssemblyStats& into, const AssemblyStats& from) {
    into.identical_seconds += from.identical_seconds;
    into.complement_seconds += from.complement_seconds;
    into.disjoint_seconds += from.disjoint_seconds;
    into.vertex_seconds += from.vertex_seconds;
    into.edge_seconds += from.edge_seconds;
    into.identical_pairs += from.identical_pairs;
    into.disjoint_pairs += from.disjoint_pairs;
    into.vertex_pairs += from.vertex_pairs;
    into.edge_pairs += from.edge_pairs;
    into.min_disjoint_distance = std::min(into.min_disjoint_distance, from.min_disjoint_distance);
}

void symmetrize_from_upper(Eigen::MatrixXd& K) {
    K.triangularView<Eigen::StrictlyLower>() = K.transpose();
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

double normalization_constant(double s) {
    check_order(s);
    return s * std::pow(2.0, 2.0 * s - 1.0) * std::tgamma(1.0 + s) / (std::numbers::pi * std::tgamma(1.0 - s));
}

Eigen::Vector3d load_element(const Point& a, const Point& b, const Point& c, const Source& f) {
    const double area = triangle_area(a, b, c);
    const double f0 = f(0.5 * (b + c)), f1 = f(0.5 * (a + c)), f2 = f(0.5 * (a + b));
    return area / 6.0 * Eigen::Vector3d(f1 + f2, f0 + f2, f0 + f1);
}

std::size_t assembly_memory_estimate(const Mesh& mesh, const QuadTables& tables, const AssemblyOptions& options) {
    const std::size_t n = mesh.num_nodes(), nt = mesh.num_triangles();
    const std::size_t nq = static_cast<std::size_t>(tables.tri_near.size());
    const std::size_t workers = static_cast<std::size_t>(worker_count(options.threads));
    const std::size_t batch = options.deterministic ? 4 * workers : workers;
    std::size_t bytes = n * n * sizeof(double);
    bytes += nt * (9 + 4 * nq) * sizeof(double);
    bytes += workers * nt * (nq * nq + 27) * sizeof(double);
    bytes += batch * nt * (18 * sizeof(double) + sizeof(Index));
    return bytes;
}

Eigen::MatrixXd assemble_stiffness(const Mesh& mesh, double s, const QuadTables& tables,
                                   const AssemblyOptions& options, AssemblyStats* stats_out) {
    check_order(s);
    const std::size_t need = assembly_memory_estimate(mesh, tables, options);
    if (need > options.memory_cap_bytes)
        throw ValidationError("assemble: " + std::to_string(mesh.num_nodes()) + " nodes need about " +
                              std::to_string(need >> 20) + " MiB, above the memory cap of " +
                              std::to_string(options.memory_cap_bytes >> 20) + " MiB");
    const auto t_start = Clock::now();
    const std::size_t n = mesh.num_nodes();
    const std::size_t nd = mesh.num_domain_triangles();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    const Assembler assembler(mesh, s, tables);
    Scatter scatter(mesh, K);
    AssemblyStats stats;
    const int workers = worker_count(options.threads);

    if (options.deterministic) {
        const std::size_t batch = 4 * static_cast<std::size_t>(workers);
        std::vector<ElementResult> results(batch);
        std::vector<Assembler::Workspace> spaces(static_cast<std::size_t>(workers));
        for (std::size_t first = 0; first < nd; first += batch) {
            const std::size_t count = std::min(batch, nd - first);
            std::atomic<std::size_t> next{0};
            auto work = [&](std::size_t w) {
                for (std::size_t i = next++; i < count; i = next++) assembler.compute(first + i, spaces[w], results[i]);
            };
            if (workers == 1) {
                work(0);
            } else {
                std::vector<std::jthread> pool;
                std::exception_ptr error;
                std::mutex error_mutex;
                for (int w = 0; w < workers; ++w)
                    pool.emplace_back([&, w] {
                        try {
                            work(static_cast<std::size_t>(w));
                        } catch (...) {
                            std::lock_guard lock(error_mutex);
                            if (!error) error = std::current_exception();
                            next = count;
                        }
                    });
                pool.clear();
                if (error) std::rethrow_exception(error);
            }
            const auto t0 = Clock::now();
            for (std::size_t i = 0; i < count; ++i) {
                scatter.apply(first + i, results[i]);
                merge_stats(stats, results[i].stats);
            }
            stats.scatter_seconds += seconds_since(t0);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex scatter_mutex;
        std::exception_ptr error;
        auto work = [&] {
            Assembler::Workspace ws;
            ElementResult r;
            try {
                for (std::size_t l = next++; l < nd; l = next++) {
                    assembler.compute(l, ws, r);
                    std::lock_guard lock(scatter_mutex);
                    const auto t0 = Clock::now();
                    scatter.apply(l, r);
                    merge_stats(stats, r.stats);
                    stats.scatter_seconds += seconds_since(t0);
                }
            } catch (...) {
                std::lock_guard lock(scatter_mutex);
                if (!error) error = std::current_exception();
                next = nd;
            }
        };
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        pool.clear();
        if (error) std::rethrow_exception(error);
    }
    scatter.finish();
    symmetrize_from_upper(K);
    if (options.fold_constant) K *= normalization_constant(s);
    stats.total_seconds = seconds_since(t_start);
    if (stats_out) *stats_out = stats;
    return K;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const Source& f) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
    for (std::size_t t = 0; t < mesh.num_domain_triangles(); ++t) {
        const Triangle& tri = mesh.triangles[t];
        const Eigen::Vector3d v = load_element(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]], f);
        for (int i = 0; i < 3; ++i) b(tri[i]) += v(i);
    }
    return b;
}

StiffnessSystem assemble(const Mesh& mesh, double s, const Source& f, const QuadTables& tables,
                         const AssemblyOptions& options) {
    StiffnessSystem sys;
    sys.s = s;
    sys.cns = normalization_constant(s);
    sys.K = assemble_stiffness(mesh, s, tables, options, &sys.stats);
    sys.b = assemble_load(mesh, f);
    return sys;
}

Eigen::MatrixXd assemble_stiffness_brute_force(const Mesh& mesh, double s, const QuadTables& tables,
                                               bool fold_constant) {
    check_order(s);
    const std::size_t n = mesh.num_nodes(), nt = mesh.num_triangles();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    auto add = [&](std::span<const Index> nodes, const Eigen::MatrixXd& block) {
        for (std::size_t j = 0; j < nodes.size(); ++j)
            for (std::size_t i = 0; i < nodes.size(); ++i) K(nodes[i], nodes[j]) += block(i, j);
    };
    for (std::size_t a = 0; a < nt; ++a) {
        for (std::size_t b = 0; b < nt; ++b) {
            if (mesh.is_auxiliary(a) && mesh.is_auxiliary(b)) continue;
            PairClass pc = classify_pair(mesh, a, b);
            if (pc.kind == PairKind::Identical) {
                const ElementMap map = element_map(mesh, a);
                add(pc.nodes(), identical_block(map, s, tables) + complement_block(map, mesh.ball_radius, s, tables));
            } else if (pc.kind == PairKind::Edge && a > b) {
                // Edge rules are not symmetric under exchanging the two elements at quadrature
                // level; evaluate both orders with the lower index first.
                pc = classify_pair(mesh, b, a);
                add(pc.nodes(), pair_block(mesh, pc, b, a, s, tables));
            } else {
                add(pc.nodes(), pair_block(mesh, pc, a, b, s, tables));
            }
        }
    }
    if (fold_constant) K *= normalization_constant(s);
    return K;
}

void write_system_csv(const std::string& path, const StiffnessSystem& system, std::size_t max_nodes) {
    const std::size_t n = static_cast<std::size_t>(system.K.rows());
    if (n > max_nodes)
        throw ValidationError("dump-matrix: " + std::to_string(n) + " nodes exceed the limit of " +
                              std::to_string(max_nodes));
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << std::setprecision(17);
    out << "# K (" << n << "x" << n << "), then b\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << system.K(i, j);
        out << '\n';
    }
    for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << system.b(i);
    out << '\n';
    if (!out) throw Error("write failed: " + path);
}

}  // namespace fracfem
