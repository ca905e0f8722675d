#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "lgt/calculus.hpp"
#include "lgt/kernels.hpp"

using namespace lgt;
using testing::max_diff;

TEST_CASE("heat kernel basics")
{
    Lattice L(4);
    Plane P0 = heat_kernel(L, 0.0);
    CHECK(P0[0] == 1.0);
    double rest = 0;
    for (int x = 1; x < L.vertices(); ++x)
        rest += std::abs(P0[x]);
    CHECK(rest == 0.0);
    for (double t : {1e-5, 1e-3, 0.01, 0.1, 1.0}) {
        Plane P = heat_kernel(L, t);
        double s = 0;
        for (double v : P) {
            s += v;
            CHECK(v >= -1e-15);
        }
        CHECK(std::abs(s - 1) < 1e-12);
    }
    CHECK_THROWS_AS(heat_kernel(L, -1.0), std::invalid_argument);
    HeatKernel hk = heat_kernel(L, std::vector<double>{0.0, 0.01});
    CHECK(hk.P.size() == 2);
}

TEST_CASE("heat kernel semigroup by direct convolution")
{
    Lattice L(4);
    Plane a = heat_kernel(L, 0.01), ab = heat_kernel(L, 0.02);
    Plane conv(L.vertices(), 0.0);
    for (int x = 0; x < L.vertices(); ++x)
        for (int y = 0; y < L.vertices(); ++y)
            conv[x] += a[y] * a[L.shift(x, -L.x_of(y), -L.y_of(y))];
    CHECK(max_diff(conv, ab) < 1e-10);
}

TEST_CASE("heat kernel solves the lattice heat equation")
{
    Lattice L(3);
    const double t = 0.02, h = 1e-6;
    Plane p = heat_kernel(L, t + h), m = heat_kernel(L, t - h), c = heat_kernel(L, t);
    Plane lap = laplacian(L, c);
    double worst = 0;
    for (int x = 0; x < L.vertices(); ++x)
        worst = std::max(worst, std::abs((p[x] - m[x]) / (2 * h) - lap[x]));
    CHECK(worst < 1e-5);
}

TEST_CASE("cutoff and parabolic norm")
{
    CHECK(cutoff(0.0) == 1.0);
    CHECK(cutoff(0.25) == 1.0);
    CHECK(cutoff(0.5) == 0.0);
    CHECK(cutoff(0.9) == 0.0);
    double prev = 1.0;
    for (double u = 0.25; u <= 0.5; u += 0.01) {
        double c = cutoff(u);
        CHECK(c <= prev + 1e-15);
        prev = c;
    }
    CHECK(parabolic_norm(0.0625, 0.0, 0.0) == doctest::Approx(0.25));
    CHECK(parabolic_norm(0.0, 0.3, 0.4) == doctest::Approx(0.5));
}

TEST_CASE("truncated kernel")
{
    Lattice L(4);
    for (double t : {0.0005, 0.004, 0.02, 0.05}) {
        Plane K = truncated_kernel(L, t), P = heat_kernel(L, t);
        const int s = L.side();
        for (int i = 0; i < L.vertices(); ++i) {
            int m1 = L.x_of(i), m2 = L.y_of(i);
            double x1 = (m1 <= s / 2 ? m1 : m1 - s) * L.eps();
            double x2 = (m2 <= s / 2 ? m2 : m2 - s) * L.eps();
            if (parabolic_norm(t, x1, x2) <= 0.25)
                CHECK(K[i] == P[i]);
            // evenness in each coordinate
            CHECK(K[i] == K[L.index(-m1, m2)]);
            CHECK(K[i] == K[L.index(m1, -m2)]);
        }
    }
    Plane K = truncated_kernel(L, 0.25);
    CHECK(max_abs(K) == 0.0);
    CHECK(max_abs(truncated_kernel(L, 0.4)) == 0.0);
    CHECK_THROWS_AS(truncated_kernel(Lattice(1), 0.01), std::invalid_argument);
    TruncatedKernel tk = truncated_kernel(L);
    CHECK(max_diff(tk(0.01), truncated_kernel(L, 0.01)) == 0.0);
}

TEST_CASE("C2 agrees with a real-space quadrature of the truncated kernel")
{
    Lattice L(4);
    RenormConstants r = renorm_constants(L, 1.0);
    // eps^-2 int_0^{1/4} sum_x K(t, x)^2 dt with independent panels
    std::vector<double> gx, gw;
    gauss_legendre(16, gx, gw);
    auto integrand = [&](double t) {
        double s = 0;
        for (double v : truncated_kernel(L, t))
            s += v * v;
        return s / (L.eps() * L.eps());
    };
    std::vector<std::pair<double, double>> panels;
    double h = L.eps() * L.eps() / 32;
    panels.push_back({0, h});
    while (h < 0.25) {
        double b = std::min(0.25, h * 1.5);
        panels.push_back({h, b});
        h = b;
    }
    double total = 0;
    for (auto [p, q] : panels)
        for (int i = 0; i < 16; ++i)
            total += 0.5 * (q - p) * gw[i] * integrand(0.5 * (q - p) * gx[i] + 0.5 * (p + q));
    CHECK(std::abs(total - r.c2) < 1e-7 * r.c2);
    CHECK(r.tol_c2 < 1e-8);
}

TEST_CASE("renormalization constants: structure")
{
    Lattice L(4);
    RenormConstants r = renorm_constants(L, 1.0);
    const TriangleTable& T = r.table;
    const double tol = 1e-12;
    // moving a difference between legs
    for (int e : {1, 2, -1, -2}) {
        double a = T.triangle(e, 0, 0), b = T.triangle(0, -e, 0), c = T.triangle(0, 0, e);
        CHECK(std::abs(a - b) < tol);
        CHECK(std::abs(a - c) < tol);
    }
    // parity: C4_j^k = C4_j^{-k} for k != j; coordinate swap symmetry
    CHECK(std::abs(r.c4[0][1] - r.c4[0][3]) < tol);
    CHECK(std::abs(r.c4[1][0] - r.c4[1][2]) < tol);
    CHECK(std::abs(r.c3[0][1] - r.c3[1][0]) < tol);
    CHECK(std::abs(r.c3[0][0] - r.c3[1][1]) < tol);
    CHECK(std::abs(r.c4[0][0] - r.c4[1][1]) < tol);
    CHECK(std::abs(r.c1[0] - r.c1[1]) < tol);
    // C3 with a reflected pair equals C4 of the opposite leg order
    CHECK(std::abs(r.c3[0][2] - r.c4[0][0]) < tol);
    // C1 assembled from the C3/C4 table
    double c1 = 0;
    for (int k = 0; k < 2; ++k)
        c1 += r.c3[0][k] - r.c4[0][k] - r.c3[0][k + 2] + r.c4[0][k + 2];
    CHECK(std::abs(c1 - r.c1[0]) < 1e-12);
    CHECK(r.tol_triangle < 1e-8);
}

TEST_CASE("renormalization constants across levels")
{
    std::vector<RenormConstants> rows;
    for (int n = 3; n <= 6; ++n)
        rows.push_back(renorm_constants(Lattice(n), 1.0));
    // C2 grows by about log(2)/(4 pi) per level
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double slope = rows[i].c2 - rows[i - 1].c2;
        CHECK(slope > 0.045);
        CHECK(slope < 0.06);
    }
    double s1 = rows[2].c2 - rows[1].c2, s2 = rows[3].c2 - rows[2].c2;
    CHECK(std::abs(s2 / s1 - 1) < 0.05);
    // C4_1^{2} and C1 - C2 converge, C1, C2 diverge
    for (std::size_t i = 2; i < rows.size(); ++i) {
        double d0 = std::abs(rows[i - 1].c4[0][1] - rows[i - 2].c4[0][1]);
        double d1 = std::abs(rows[i].c4[0][1] - rows[i - 1].c4[0][1]);
        CHECK(d1 * 2 <= d0);
        double e0 = std::abs((rows[i - 1].c1[0] - rows[i - 1].c2) - (rows[i - 2].c1[0] - rows[i - 2].c2));
        double e1 = std::abs((rows[i].c1[0] - rows[i].c2) - (rows[i - 1].c1[0] - rows[i - 1].c2));
        CHECK(e1 * 2 <= e0);
        CHECK(rows[i].c1[0] > rows[i - 1].c1[0]);
    }
    std::ostringstream os;
    write_renorm_table(os, rows);
    CHECK(os.str().rfind("# lgt-renorm-table v1", 0) == 0);
    CHECK(os.str().find("6 C2 ") != std::string::npos);
}

TEST_CASE("counterterm resolution")
{
    Lattice L(3);
    SimConfig c;
    c.lambda = 1.0;
    c.c_eps_mode = CEpsMode::zero;
    CHECK(resolve_c_eps(L, c) == 0.0);
    c.c_eps_mode = CEpsMode::explicit_value;
    c.c_eps = 0.7;
    CHECK(resolve_c_eps(L, c) == 0.7);
    c.c_eps_mode = CEpsMode::computed;
    double v = resolve_c_eps(L, c);
    CHECK(v == doctest::Approx(renorm_constants(L, 1.0).c_mass).epsilon(1e-8));
    CHECK(resolve_c_eps(L, c) == v);
    CHECK_THROWS_AS(renorm_constants(Lattice(1), 1.0), std::invalid_argument);
}

TEST_CASE("Ward identity residual of the Gaussian vector field")
{
    for (int n : {3, 4}) {
        Lattice L(n);
        WardField w = ward_vector_field(L, 4.0);
        double exact = max_abs(ward_residual(L, w, -1.0));
        double scale = max_abs(div(L, w.V));
        CHECK(exact <= 1e-9 * std::max(1.0, scale));
        // the relative sign between the two terms matters
        CHECK(max_abs(ward_residual(L, w, +1.0)) > 1e3 * exact);
        CHECK(w.tail_bound < 1e-30);
    }
    CHECK_THROWS_AS(ward_vector_field(Lattice(3), 0.0), std::invalid_argument);
}

TEST_CASE("heat-kernel gradient identity on the torus")
{
    Lattice L(4);
    int y = L.index(3, 5), y1 = L.shift(y, 1, 0);
    IdentityResidual a = heat_kernel_identity_residual(L, 0.01, 0.01, y, y);
    CHECK(a.residual <= 1e-8);
    IdentityResidual b = heat_kernel_identity_residual(L, 0.02, 0.02, y1, y);
    CHECK(b.residual <= 1e-8);
    IdentityResidual c = heat_kernel_identity_residual(L, 0.003, 0.04, y, L.index(10, 2));
    IdentityResidual d = heat_kernel_identity_residual(L, 0.04, 0.003, L.index(10, 2), y);
    CHECK(c.residual <= 1e-8);
    CHECK(std::abs(c.residual - d.residual) <= 1e-12);
    CHECK(a.tail_bound < 1e-12);
}
