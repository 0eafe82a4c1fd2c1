#include "fracfem/quadtables.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <vector>

#include "fracfem/error.hpp"

namespace fracfem {

namespace {

using Fn3 = std::function<double(double, double, double)>;

double phi_hat(int a, double x, double y) {
    switch (a) {
        case 0: return 1.0 - x;
        case 1: return x - y;
        default: return y;
    }
}

// Barycentric (l1, l2, l3) on the reference triangle: xhat = (l2 + l3, l3).
void put_bary(QuadRule& r, int row, double l2, double l3, double w) {
    r.points(row, 0) = l2 + l3;
    r.points(row, 1) = l3;
    r.weights(row) = w;
}

Eigen::MatrixXd cube_table(const QuadRule& cube, int nloc, const std::vector<Fn3>& psi, int jac_y_power,
                           int jac_x_power) {
    const Eigen::Index nq = cube.size();
    Eigen::MatrixXd out(nloc * nloc, nq);
    for (Eigen::Index k = 0; k < nq; ++k) {
        const double x = cube.points(k, 0), y = cube.points(k, 1), z = cube.points(k, 2);
        const double jac = std::pow(x, jac_x_power) * std::pow(y, jac_y_power);
        for (int b = 0; b < nloc; ++b)
            for (int a = 0; a < nloc; ++a)
                out(a + nloc * b, k) = cube.weights(k) * psi[a](x, y, z) * psi[b](x, y, z) * jac;
    }
    return out;
}

}  // namespace

QuadRule gauss_legendre_01(int n) {
    if (n < 1) throw ValidationError("gauss_legendre_01: n must be >= 1");
    QuadRule r;
    r.points.resize(n, 1);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root on [-1,1]
        r.points(n - 1 - i, 0) = 0.5 * (1.0 + x);
        r.points(i, 0) = 0.5 * (1.0 - x);
        r.weights(n - 1 - i) = 0.5 * w;
        r.weights(i) = 0.5 * w;
    }
    if (n % 2 == 1) r.points(n / 2, 0) = 0.5;
    return r;
}

QuadRule interval_rule_reference_order() {
    const QuadRule g = gauss_legendre_01(9);
    static constexpr int order[9] = {4, 1, 7, 0, 8, 3, 5, 6, 2};
    QuadRule r;
    r.points.resize(9, 1);
    r.weights.resize(9);
    for (int i = 0; i < 9; ++i) {
        r.points(i, 0) = g.points(order[i], 0);
        r.weights(i) = g.weights(order[i]);
    }
    return r;
}

QuadRule triangle_rule_6() {
    const double a = 0.445948490915965, wa = 0.223381589678011 / 2.0;
    const double b = 0.091576213509771, wb = 0.109951743655322 / 2.0;
    const double c = 1.0 - 2.0 * a, d = 1.0 - 2.0 * b;
    QuadRule r;
    r.points.resize(6, 2);
    r.weights.resize(6);
    put_bary(r, 0, c, a, wa);
    put_bary(r, 1, a, c, wa);
    put_bary(r, 2, a, a, wa);
    put_bary(r, 3, d, b, wb);
    put_bary(r, 4, b, d, wb);
    put_bary(r, 5, b, b, wb);
    return r;
}

QuadRule triangle_rule_12() {
    const double a = 0.249286745170910, wa = 0.116786275726379 / 2.0;
    const double b = 0.063089014491502, wb = 0.050844906370207 / 2.0;
    const double p = 0.053145049844817, q = 0.310352451033784, rr = 0.636502499121399;
    const double wc = 0.082851075618374 / 2.0;
    const double c = 1.0 - 2.0 * a, e = 1.0 - 2.0 * b;
    QuadRule r;
    r.points.resize(12, 2);
    r.weights.resize(12);
    put_bary(r, 0, c, a, wa);
    put_bary(r, 1, a, c, wa);
    put_bary(r, 2, a, a, wa);
    put_bary(r, 3, e, b, wb);
    put_bary(r, 4, b, e, wb);
    put_bary(r, 5, b, b, wb);
    put_bary(r, 6, p, rr, wc);
    put_bary(r, 7, q, p, wc);
    put_bary(r, 8, rr, q, wc);
    put_bary(r, 9, p, q, wc);
    put_bary(r, 10, rr, p, wc);
    put_bary(r, 11, q, rr, wc);
    return r;
}

QuadRule triangle_rule_conical(int n) {
    const QuadRule g = gauss_legendre_01(n);
    QuadRule r;
    r.points.resize(n * n, 2);
    r.weights.resize(n * n);
    int row = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j, ++row) {
            const double u = g.points(i, 0), v = g.points(j, 0);
            r.points(row, 0) = u;
            r.points(row, 1) = u * v;
            r.weights(row) = u * g.weights(i) * g.weights(j);
        }
    return r;
}

QuadRule cube_rule(int n) {
    const QuadRule g = gauss_legendre_01(n);
    QuadRule r;
    r.points.resize(n * n * n, 3);
    r.weights.resize(n * n * n);
    int row = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k, ++row) {
                r.points(row, 0) = g.points(i, 0);
                r.points(row, 1) = g.points(j, 0);
                r.points(row, 2) = g.points(k, 0);
                r.weights(row) = g.weights(i) * g.weights(j) * g.weights(k);
            }
    return r;
}

QuadTables build_tables(const QuadOrders& orders) {
    if (orders.cube < 1 || orders.interval < 1 || orders.angular < 1 || orders.nontouching < 0 ||
        orders.complement < 0)
        throw ValidationError("build_tables: invalid quadrature orders");

    QuadTables t;
    t.orders = orders;
    t.cube = cube_rule(orders.cube);
    t.tri_near = orders.nontouching == 0 ? triangle_rule_6() : triangle_rule_conical(orders.nontouching);
    t.tri_comp = orders.complement == 0 ? triangle_rule_12() : triangle_rule_conical(orders.complement);
    t.interval = orders.interval == 9 ? interval_rule_reference_order() : gauss_legendre_01(orders.interval);
    t.angular = orders.angular == 9 ? interval_rule_reference_order() : gauss_legendre_01(orders.angular);

    const QuadRule& tn = t.tri_near;
    const Eigen::Index n = tn.size();
    t.phiA.resize(9, n * n);
    t.phiB.resize(9, n * n);
    t.phiD.resize(9, n * n);
    for (int i = 0; i < 9; ++i) {
        const int a = i % 3, b = i / 3;
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index q = 0; q < n; ++q) {
                const double xq = tn.points(q, 0), yq = tn.points(q, 1);
                const double xk = tn.points(k, 0), yk = tn.points(k, 1);
                const double w = tn.weights(q) * tn.weights(k);
                t.phiA(i, q + n * k) = w * phi_hat(a, xq, yq) * phi_hat(b, xq, yq);
                t.phiB(i, q + n * k) = -w * phi_hat(a, xq, yq) * phi_hat(b, xk, yk);
                t.phiD(i, q + n * k) = w * phi_hat(a, xk, yk) * phi_hat(b, xk, yk);
            }
    }

    const std::vector<Fn3> v1 = {
        [](double, double y, double) { return y - 1.0; },
        [](double x, double, double) { return 1.0 - x; },
        [](double x, double, double) { return x; },
        [](double, double y, double z) { return -y * (1.0 - z); },
        [](double, double y, double z) { return -y * z; },
    };
    const std::vector<Fn3> v2 = {
        [](double, double y, double) { return 1.0 - y; },
        [](double, double y, double z) { return y * (1.0 - z); },
        [](double, double y, double z) { return y * z; },
        [](double x, double, double) { return -(1.0 - x); },
        [](double x, double, double) { return -x; },
    };
    t.vpsi[0] = cube_table(t.cube, 5, v1, 1, 0);
    t.vpsi[1] = cube_table(t.cube, 5, v2, 1, 0);

    const std::array<std::vector<Fn3>, 5> e = {{
        {
            [](double x, double y, double) { return -x * y; },
            [](double x, double, double z) { return x * (1.0 - z); },
            [](double x, double, double z) { return x * z; },
            [](double x, double y, double) { return -x * (1.0 - y); },
        },
        {
            [](double x, double y, double z) { return -x * y * z; },
            [](double x, double y, double) { return -x * (1.0 - y); },
            [](double x, double, double) { return x; },
            [](double x, double y, double z) { return -x * y * (1.0 - z); },
        },
        {
            [](double x, double y, double) { return x * y; },
            [](double x, double y, double z) { return -x * (1.0 - y * z); },
            [](double x, double y, double) { return x * (1.0 - y); },
            [](double x, double y, double z) { return -x * y * z; },
        },
        {
            [](double x, double y, double z) { return x * y * z; },
            [](double x, double y, double) { return x * (1.0 - y); },
            [](double x, double y, double z) { return x * y * (1.0 - z); },
            [](double x, double, double) { return -x; },
        },
        {
            [](double x, double y, double z) { return x * y * z; },
            [](double x, double y, double) { return -x * (1.0 - y); },
            [](double x, double y, double z) { return x * (1.0 - y * z); },
            [](double x, double y, double) { return -x * y; },
        },
    }};
    t.epsi[0] = cube_table(t.cube, 4, e[0], 0, 2);
    for (int h = 1; h < 5; ++h) t.epsi[h] = cube_table(t.cube, 4, e[h], 1, 2);

    using Fn1 = double (*)(double);
    const std::array<std::array<Fn1, 3>, 3> lam = {{
        {[](double z) { return -z; }, [](double z) { return -(1.0 - z); }, [](double) { return 1.0; }},
        {[](double) { return -1.0; }, [](double z) { return 1.0 - z; }, [](double z) { return z; }},
        {[](double z) { return z; }, [](double) { return -1.0; }, [](double z) { return 1.0 - z; }},
    }};
    const Eigen::Index ni = t.interval.size();
    for (int h = 0; h < 3; ++h) {
        t.tpsi[h].resize(9, ni);
        for (Eigen::Index k = 0; k < ni; ++k) {
            const double z = t.interval.points(k, 0);
            for (int i = 0; i < 9; ++i)
                t.tpsi[h](i, k) = t.interval.weights(k) * lam[h][i % 3](z) * lam[h][i / 3](z);
        }
    }

    const QuadRule& tc = t.tri_comp;
    t.cphi.resize(9, tc.size());
    for (Eigen::Index k = 0; k < tc.size(); ++k) {
        const double x = tc.points(k, 0), y = tc.points(k, 1);
        for (int i = 0; i < 9; ++i) t.cphi(i, k) = tc.weights(k) * phi_hat(i % 3, x, y) * phi_hat(i / 3, x, y);
    }
    return t;
}

const QuadTables& default_tables() {
    static const QuadTables tables = build_tables();
    return tables;
}

void write_tables_csv(std::ostream& out, const QuadTables& t) {
    const Eigen::IOFormat csv(Eigen::FullPrecision, Eigen::DontAlignCols, ",", "\n");
    auto section = [&](const char* name, const Eigen::MatrixXd& m) {
        out << "# " << name << ' ' << m.rows() << 'x' << m.cols() << '\n' << m.format(csv) << '\n';
    };
    out << std::setprecision(17);
    section("p_cube", t.cube.points);
    section("w_cube", t.cube.weights);
    section("p_T_6", t.tri_near.points);
    section("w_T_6", t.tri_near.weights);
    section("p_T_12", t.tri_comp.points);
    section("w_T_12", t.tri_comp.weights);
    section("p_I", t.interval.points);
    section("w_I", t.interval.weights);
    section("p_theta", t.angular.points);
    section("w_theta", t.angular.weights);
    section("phiA", t.phiA);
    section("phiB", t.phiB);
    section("phiD", t.phiD);
    section("vpsi1", t.vpsi[0]);
    section("vpsi2", t.vpsi[1]);
    for (int h = 0; h < 5; ++h) section(("epsi" + std::to_string(h + 1)).c_str(), t.epsi[h]);
    for (int h = 0; h < 3; ++h) section(("tpsi" + std::to_string(h + 1)).c_str(), t.tpsi[h]);
    section("cphi", t.cphi);
}

void dump_tables(const std::string& path, const QuadTables& tables) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    write_tables_csv(out, tables);
}

}  // namespace fracfem
