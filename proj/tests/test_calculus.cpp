#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "lgt/calculus.hpp"
#include "lgt/gauge.hpp"

using namespace lgt;
using testing::max_diff;

TEST_CASE("gradient of a constant vanishes")
{
    Lattice L(3);
    Plane f(L.vertices(), 2.5);
    CHECK(max_abs(grad(L, f, 1)) == 0.0);
    CHECK(max_abs(grad(L, f, 2)) == 0.0);
}

TEST_CASE("gradient of the origin indicator, n = 1")
{
    Lattice L(1);
    Plane f(L.vertices(), 0.0);
    f[0] = 1.0;
    Plane g = grad(L, f, 1);
    // edge (0, e1) gets -1/eps, edge (-e1, 0) = (1, 0) -> (0, 0) gets +1/eps
    CHECK(g[0] == doctest::Approx(-2.0));
    CHECK(g[L.index(1, 0)] == doctest::Approx(2.0));
    CHECK(g[L.index(0, 1)] == 0.0);
    CHECK(g[L.index(1, 1)] == 0.0);
}

TEST_CASE("row sums of eps * grad_1 f telescope to zero")
{
    Lattice L(3);
    std::mt19937_64 rng(2);
    Plane g = grad(L, testing::random_plane(L, rng), 1);
    for (int y = 0; y < L.side(); ++y) {
        double s = 0;
        for (int x = 0; x < L.side(); ++x)
            s += L.eps() * g[L.index(x, y)];
        CHECK(std::abs(s) < 1e-12);
    }
}

TEST_CASE("curl of a gradient vanishes")
{
    Lattice L(3);
    std::mt19937_64 rng(3);
    PlaquetteField F = curl(L, grad(L, testing::random_plane(L, rng)));
    CHECK(max_abs(F.f) < 1e-11);
}

TEST_CASE("curl of A_2 = x-coordinate")
{
    Lattice L(2);
    GaugeField A(L);
    for (int x = 0; x < L.vertices(); ++x)
        A.v[x] = L.x_of(x) * L.eps();
    PlaquetteField F = curl(L, A);
    for (int p = 0; p < L.plaquettes(); ++p) {
        if (L.x_of(p) == L.side() - 1)
            CHECK(F[p] == doctest::Approx(-(L.side() - 1)));
        else
            CHECK(F[p] == doctest::Approx(1.0));
    }
}

TEST_CASE("total curvature and total divergence vanish")
{
    Lattice L(3);
    std::mt19937_64 rng(4);
    for (int r = 0; r < 5; ++r) {
        GaugeField A = testing::random_gauge(L, rng);
        double s = 0;
        for (double f : curl(L, A).f)
            s += f;
        CHECK(std::abs(L.eps() * L.eps() * s) < 1e-12);
        CHECK(std::abs(L.eps() * L.eps() * mean(div(L, A)) * L.vertices()) < 1e-12);
    }
}

TEST_CASE("divergence: constants vanish, div grad = 5-point Laplacian")
{
    Lattice L(2);
    GaugeField C(L);
    std::fill(C.h.begin(), C.h.end(), 1.5);
    std::fill(C.v.begin(), C.v.end(), -0.5);
    CHECK(max_abs(div(L, C)) < 1e-12);
    std::mt19937_64 rng(5);
    Plane f = testing::random_plane(L, rng);
    Plane lap(L.vertices());
    const double ie2 = 1 / (L.eps() * L.eps());
    for (int x = 0; x < L.vertices(); ++x)
        lap[x] = ie2 * (f[L.shift(x, 1, 0)] + f[L.shift(x, -1, 0)] + f[L.shift(x, 0, 1)] + f[L.shift(x, 0, -1)] -
                        4 * f[x]);
    CHECK(max_diff(div(L, grad(L, f)), lap) < 1e-10);
    CHECK(max_diff(laplacian(L, f), lap) < 1e-10);
}

TEST_CASE("covariant derivative basics")
{
    Lattice L(3);
    std::mt19937_64 rng(6);
    GaugeField A = testing::random_gauge(L, rng);
    ScalarField phi = testing::random_scalar(L, rng);
    for (int j = 1; j <= 2; ++j) {
        ScalarField d = cov_deriv(L, A, phi, 0.0, j);
        CHECK(max_diff(d.re, grad(L, phi.re, j)) < 1e-12);
        CHECK(max_diff(d.im, grad(L, phi.im, j)) < 1e-12);
    }
    ScalarField one(L);
    std::fill(one.re.begin(), one.re.end(), 1.0);
    CHECK(max_abs(cov_deriv(L, GaugeField(L), one, 2.0, 1)) == 0.0);
}

TEST_CASE("covariant derivative transforms covariantly")
{
    Lattice L(3);
    std::mt19937_64 rng(7);
    const double lambda = 1.3;
    GaugeField A = testing::random_gauge(L, rng);
    ScalarField phi = testing::random_scalar(L, rng);
    Plane f = testing::random_plane(L, rng);
    auto [A2, phi2] = apply_gauge(L, A, phi, f, lambda);
    for (int j = 1; j <= 2; ++j)
        for (int o : {+1, -1}) {
            ScalarField lhs = cov_deriv(L, A2, phi2, lambda, j, o);
            ScalarField base = cov_deriv(L, A, phi, lambda, j, o);
            double m = 0;
            for (int x = 0; x < L.vertices(); ++x)
                m = std::max(m, std::abs(lhs[x] - std::polar(1.0, lambda * f[x]) * base[x]));
            CHECK(m < 1e-10);
        }
}

TEST_CASE("covariant Laplacian")
{
    std::mt19937_64 rng(8);
    SUBCASE("lambda = 0 is the plain Laplacian")
    {
        Lattice L(3);
        GaugeField A = testing::random_gauge(L, rng);
        ScalarField phi = testing::random_scalar(L, rng);
        CHECK(max_diff(cov_laplacian(L, A, phi, 0.0), laplacian(L, phi)) < 1e-10);
    }
    SUBCASE("equals -sum_j D_j^* D_j by literal adjoints")
    {
        Lattice L(2);
        const double lambda = 0.9;
        const int N = L.vertices();
        GaugeField A = testing::random_gauge(L, rng);
        ScalarField phi = testing::random_scalar(L, rng);
        // matrices of D_1, D_2 from images of the basis vectors
        std::vector<std::vector<cplx>> M[2];
        for (int j = 0; j < 2; ++j) {
            M[j].assign(N, std::vector<cplx>(N));
            for (int k = 0; k < N; ++k) {
                ScalarField ek(L);
                ek.re[k] = 1.0;
                ScalarField col = cov_deriv(L, A, ek, lambda, j + 1);
                for (int r = 0; r < N; ++r)
                    M[j][r][k] = col[r];
            }
        }
        std::vector<cplx> out(N, 0.0);
        for (int j = 0; j < 2; ++j) {
            std::vector<cplx> d(N, 0.0);
            for (int r = 0; r < N; ++r)
                for (int k = 0; k < N; ++k)
                    d[r] += M[j][r][k] * phi[k];
            for (int k = 0; k < N; ++k)
                for (int r = 0; r < N; ++r)
                    out[k] -= std::conj(M[j][r][k]) * d[r];
        }
        ScalarField lap = cov_laplacian(L, A, phi, lambda);
        double m = 0;
        for (int x = 0; x < N; ++x)
            m = std::max(m, std::abs(lap[x] - out[x]));
        CHECK(m < 1e-10);
    }
    SUBCASE("gauge covariance")
    {
        Lattice L(3);
        const double lambda = 1.7;
        GaugeField B = testing::random_gauge(L, rng);
        ScalarField psi = testing::random_scalar(L, rng);
        Plane f = testing::random_plane(L, rng);
        auto [B2, psi2] = apply_gauge(L, B, psi, f, lambda);
        ScalarField a = cov_laplacian(L, B2, psi2, lambda), b = cov_laplacian(L, B, psi, lambda);
        double m = 0;
        for (int x = 0; x < L.vertices(); ++x)
            m = std::max(m, std::abs(std::polar(1.0, -lambda * f[x]) * a[x] - b[x]));
        CHECK(m < 1e-9);
    }
}

TEST_CASE("edge Laplacian")
{
    Lattice L(3);
    std::mt19937_64 rng(9);
    GaugeField C(L);
    std::fill(C.h.begin(), C.h.end(), 3.0);
    CHECK(max_abs(edge_laplacian(L, C)) < 1e-10);
    GaugeField B = testing::random_gauge(L, rng);
    GaugeField lb = edge_laplacian(L, B);
    CHECK(max_diff(lb.h, laplacian(L, B.h)) < 1e-10);
    CHECK(max_diff(lb.v, laplacian(L, B.v)) < 1e-10);
    GaugeField B2 = testing::random_gauge(L, rng);
    double a = inner(L, edge_laplacian(L, B), B2), b = inner(L, B, edge_laplacian(L, B2));
    CHECK(std::abs(a - b) < 1e-10 * (1 + std::abs(a)));
}

TEST_CASE("edge Laplacian minus grad div is the curl term")
{
    Lattice L(3);
    std::mt19937_64 rng(10);
    GaugeField B = testing::random_gauge(L, rng);
    GaugeField d = edge_laplacian(L, B) - grad_div(L, B);
    PlaquetteField F = curl(L, B);
    double m = 0;
    for (int x = 0; x < L.vertices(); ++x)
        for (int j = 1; j <= 2; ++j) {
            auto s = L.edge_neighborhood(EdgeId{x, j});
            double expect = (F[s.p_a.sw] - F[s.p_b.sw]) / L.eps();
            m = std::max(m, std::abs(d.plane(j)[x] - expect));
        }
    CHECK(m < 1e-9);
}

TEST_CASE("grad div")
{
    Lattice L(3);
    std::mt19937_64 rng(11);
    Plane f = testing::random_plane(L, rng);
    CHECK(max_diff(grad_div(L, grad(L, f)), grad(L, laplacian(L, f))) < 1e-8);
    GaugeField B = testing::random_gauge(L, rng);
    Helmholtz h = helmholtz(L, B);
    CHECK(max_abs(grad_div(L, h.divergence_free)) < 1e-9);
}

TEST_CASE("Helmholtz decomposition")
{
    Lattice L(4);
    std::mt19937_64 rng(12);
    SUBCASE("gradient input")
    {
        Plane f = testing::random_plane(L, rng);
        GaugeField G = grad(L, f);
        Helmholtz h = helmholtz(L, G);
        CHECK(max_abs(h.divergence_free) < 1e-10);
        CHECK(std::abs(h.c1 - mean(G.h)) < 1e-12);
        CHECK(std::abs(h.c2 - mean(G.v)) < 1e-12);
    }
    SUBCASE("reconstruction and curl")
    {
        GaugeField A = testing::random_gauge(L, rng);
        Helmholtz h = helmholtz(L, A);
        GaugeField sum = h.divergence_free + h.gradient_part;
        for (int x = 0; x < L.vertices(); ++x) {
            sum.h[x] += h.c1;
            sum.v[x] += h.c2;
        }
        CHECK(max_diff(sum, A) < 1e-10);
        CHECK(max_diff(curl(L, h.divergence_free).f, curl(L, A).f) < 1e-10);
        CHECK(max_abs(div(L, h.divergence_free)) < 1e-10);
    }
}

TEST_CASE("Poisson solver")
{
    Lattice L(4);
    std::mt19937_64 rng(13);
    Plane r = testing::random_plane(L, rng);
    Plane u = solve_poisson(L, r);
    Plane lu = laplacian(L, u);
    double m = mean(r);
    for (auto& x : r)
        x -= m;
    CHECK(max_diff(lu, r) < 1e-9);
    CHECK(std::abs(mean(u)) < 1e-12);
}
