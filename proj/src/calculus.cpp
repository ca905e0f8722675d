#include "lgt/calculus.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace lgt {

namespace {
std::mutex fftw_plan_mutex;
}

GaugeField operator+(const GaugeField& a, const GaugeField& b)
{
    GaugeField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.h[i] += b.h[i];
        r.v[i] += b.v[i];
    }
    return r;
}

GaugeField operator-(const GaugeField& a, const GaugeField& b)
{
    GaugeField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.h[i] -= b.h[i];
        r.v[i] -= b.v[i];
    }
    return r;
}

GaugeField operator*(double c, const GaugeField& a)
{
    GaugeField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.h[i] *= c;
        r.v[i] *= c;
    }
    return r;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b)
{
    ScalarField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.re[i] += b.re[i];
        r.im[i] += b.im[i];
    }
    return r;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b)
{
    ScalarField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.re[i] -= b.re[i];
        r.im[i] -= b.im[i];
    }
    return r;
}

ScalarField operator*(double c, const ScalarField& a)
{
    ScalarField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.re[i] *= c;
        r.im[i] *= c;
    }
    return r;
}

double max_abs(const Plane& p)
{
    double m = 0;
    for (double x : p)
        m = std::max(m, std::abs(x));
    return m;
}
double max_abs(const GaugeField& A) { return std::max(max_abs(A.h), max_abs(A.v)); }
double max_abs(const ScalarField& P) { return std::max(max_abs(P.re), max_abs(P.im)); }

Plane grad(const Lattice& L, const Plane& f, int j)
{
    require(L, f);
    const double ie = 1.0 / L.eps();
    Plane r(f.size());
    for (int x = 0; x < L.vertices(); ++x)
        r[x] = ie * (f[L.step(x, j, 1)] - f[x]);
    return r;
}

GaugeField grad(const Lattice& L, const Plane& f)
{
    GaugeField A;
    A.h = grad(L, f, 1);
    A.v = grad(L, f, 2);
    return A;
}

Plane grad_back(const Lattice& L, const Plane& f, int j)
{
    require(L, f);
    const double ie = 1.0 / L.eps();
    Plane r(f.size());
    for (int x = 0; x < L.vertices(); ++x)
        r[x] = ie * (f[L.step(x, j, -1)] - f[x]);
    return r;
}

PlaquetteField curl(const Lattice& L, const GaugeField& A)
{
    require(L, A);
    const double ie = 1.0 / L.eps();
    PlaquetteField F(L);
    for (int p = 0; p < L.plaquettes(); ++p) {
        // counter-clockwise: +east +south -north -west in positive orientation
        F.f[p] = ie * (A.v[L.shift(p, 1, 0)] - A.h[L.shift(p, 0, 1)] - A.v[p] + A.h[p]);
    }
    return F;
}

Plane div(const Lattice& L, const GaugeField& A)
{
    require(L, A);
    const double ie = 1.0 / L.eps();
    Plane d(A.size());
    for (int x = 0; x < L.vertices(); ++x)
        d[x] = ie * (A.v[x] - A.v[L.shift(x, 0, -1)] + A.h[x] - A.h[L.shift(x, -1, 0)]);
    return d;
}

Plane laplacian(const Lattice& L, const Plane& f)
{
    require(L, f);
    const double ie2 = 1.0 / (L.eps() * L.eps());
    Plane r(f.size());
    for (int x = 0; x < L.vertices(); ++x)
        r[x] = ie2 * (f[L.shift(x, 1, 0)] + f[L.shift(x, -1, 0)] + f[L.shift(x, 0, 1)] +
                      f[L.shift(x, 0, -1)] - 4.0 * f[x]);
    return r;
}

ScalarField laplacian(const Lattice& L, const ScalarField& phi)
{
    ScalarField r;
    r.re = laplacian(L, phi.re);
    r.im = laplacian(L, phi.im);
    return r;
}

ScalarField cov_deriv(const Lattice& L, const GaugeField& A, const ScalarField& phi,
                      double lambda, int j, int orient)
{
    require(L, A);
    require(L, phi);
    const double e = L.eps();
    const Plane& Aj = A.plane(j);
    ScalarField r(L);
    for (int x = 0; x < L.vertices(); ++x) {
        int y = L.step(x, j, orient);
        double a = orient > 0 ? Aj[x] : -Aj[y]; // A(x, y)
        cplx u = std::polar(1.0, -e * lambda * a) * phi[y];
        r.set(x, (u - phi[x]) / e);
    }
    return r;
}

ScalarField cov_laplacian(const Lattice& L, const GaugeField& A, const ScalarField& phi,
                          double lambda)
{
    require(L, A);
    require(L, phi);
    const double e = L.eps();
    const double ie2 = 1.0 / (e * e);
    ScalarField r(L);
    for (int x = 0; x < L.vertices(); ++x) {
        int xe = L.shift(x, 1, 0), xw = L.shift(x, -1, 0);
        int xn = L.shift(x, 0, 1), xs = L.shift(x, 0, -1);
        cplx s = std::polar(1.0, -e * lambda * A.h[x]) * phi[xe] +
                 std::polar(1.0, e * lambda * A.h[xw]) * phi[xw] +
                 std::polar(1.0, -e * lambda * A.v[x]) * phi[xn] +
                 std::polar(1.0, e * lambda * A.v[xs]) * phi[xs];
        r.set(x, ie2 * (s - 4.0 * phi[x]));
    }
    return r;
}

GaugeField edge_laplacian(const Lattice& L, const GaugeField& B)
{
    GaugeField r;
    r.h = laplacian(L, B.h);
    r.v = laplacian(L, B.v);
    return r;
}

GaugeField grad_div(const Lattice& L, const GaugeField& B)
{
    return grad(L, div(L, B));
}

Plane solve_poisson(const Lattice& L, const Plane& rhs)
{
    require(L, rhs);
    const int s = L.side();
    const int sh = s / 2 + 1;
    std::vector<double> in(rhs);
    std::vector<fftw_complex> spec(static_cast<std::size_t>(s) * sh);
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        // row-major (y, x) layout matches index(x, y) = y*side + x
        fwd = fftw_plan_dft_r2c_2d(s, s, in.data(), spec.data(), FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_2d(s, s, spec.data(), in.data(), FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    const double ie2 = 1.0 / (L.eps() * L.eps());
    for (int ky = 0; ky < s; ++ky)
        for (int kx = 0; kx < sh; ++kx) {
            double mu = ie2 * (4.0 - 2.0 * std::cos(2 * M_PI * kx / s) - 2.0 * std::cos(2 * M_PI * ky / s));
            auto& c = spec[static_cast<std::size_t>(ky) * sh + kx];
            double f = (kx == 0 && ky == 0) ? 0.0 : -1.0 / (mu * s * s);
            c[0] *= f;
            c[1] *= f;
        }
    fftw_execute(bwd);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    return in;
}

Helmholtz helmholtz(const Lattice& L, const GaugeField& A)
{
    require(L, A);
    Helmholtz r;
    r.f = solve_poisson(L, div(L, A));
    r.g = solve_poisson(L, curl(L, A).f);
    r.gradient_part = grad(L, r.f);
    r.c1 = mean(A.h);
    r.c2 = mean(A.v);
    const double ie = 1.0 / L.eps();
    r.divergence_free = GaugeField(L);
    for (int x = 0; x < L.vertices(); ++x) {
        r.divergence_free.h[x] = -ie * (r.g[x] - r.g[L.shift(x, 0, -1)]);
        r.divergence_free.v[x] = ie * (r.g[x] - r.g[L.shift(x, -1, 0)]);
    }
    return r;
}

double inner(const Lattice& L, const Plane& a, const Plane& b)
{
    require(L, a);
    require(L, b);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return L.eps() * L.eps() * s;
}

double inner(const Lattice& L, const GaugeField& a, const GaugeField& b)
{
    return inner(L, a.h, b.h) + inner(L, a.v, b.v);
}

cplx inner(const Lattice& L, const ScalarField& a, const ScalarField& b)
{
    require(L, a);
    require(L, b);
    cplx s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::conj(a[i]) * b[i];
    return L.eps() * L.eps() * s;
}

double mean(const Plane& p)
{
    double s = 0;
    for (double x : p)
        s += x;
    return s / static_cast<double>(p.size());
}

} // namespace lgt
