#include "lgt/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <fftw3.h>
#include <fmt/format.h>
#include <gsl/gsl_integration.h>

#include "lgt/calculus.hpp"

namespace lgt {

namespace {

std::mutex plan_mutex;

struct Panel
{
    double a, b;
};

void add_nodes(const std::vector<Panel>& panels, int order, std::vector<double>& t,
               std::vector<double>& w)
{
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    for (auto p : panels)
        for (int i = 0; i < order; ++i) {
            t.push_back(0.5 * (p.b - p.a) * gx[i] + 0.5 * (p.a + p.b));
            w.push_back(0.5 * (p.b - p.a) * gw[i]);
        }
}

// [0, h0], dyadic up to 1/16, uniform on [1/16, 1/4] where the cutoff acts
std::vector<Panel> kernel_panels(const Lattice& L, double h0_factor)
{
    std::vector<Panel> p;
    double h = h0_factor * L.eps() * L.eps();
    p.push_back({0.0, h});
    while (h < 1.0 / 16) {
        double b = std::min(2 * h, 1.0 / 16);
        p.push_back({h, b});
        h = b;
    }
    const int m = 24;
    for (int i = 0; i < m; ++i)
        p.push_back({1.0 / 16 + (3.0 / 16) * i / m, 1.0 / 16 + (3.0 / 16) * (i + 1) / m});
    return p;
}

// standard bump exp(1 - 1/(1-w^2)) on (-1, 1)
double bump(double w)
{
    if (std::abs(w) >= 1)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - w * w));
}

// Truncated kernel on the quadrant 0 <= m1, m2 <= side/2 and its even
// transform K^(k1, k2), k in the same quadrant (REDFT00 of size side/2+1).
class QuadrantKernel
{
public:
    explicit QuadrantKernel(const Lattice& L) : L_(L), h_(L.side() / 2 + 1)
    {
        const int s = L.side();
        cosq_.resize(static_cast<std::size_t>(s) * h_);
        for (int q = 0; q < s; ++q)
            for (int m = 0; m < h_; ++m)
                cosq_[q * h_ + m] = std::cos(2 * M_PI * double(q) * m / s);
        mu1_.resize(s);
        for (int q = 0; q < s; ++q)
            mu1_[q] = (2.0 - 2.0 * std::cos(2 * M_PI * q / s)) / (L.eps() * L.eps());
        r4_.resize(static_cast<std::size_t>(h_) * h_);
        for (int m2 = 0; m2 < h_; ++m2)
            for (int m1 = 0; m1 < h_; ++m1) {
                double r2 = (double(m1) * m1 + double(m2) * m2) * L.eps() * L.eps();
                r4_[m2 * h_ + m1] = r2 * r2;
            }
        in_ = fftw_alloc_real(h_ * h_);
        out_ = fftw_alloc_real(h_ * h_);
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan_ = fftw_plan_r2r_2d(h_, h_, in_, out_, FFTW_REDFT00, FFTW_REDFT00, FFTW_ESTIMATE);
    }
    ~QuadrantKernel()
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    QuadrantKernel(const QuadrantKernel&) = delete;
    QuadrantKernel& operator=(const QuadrantKernel&) = delete;

    int h() const { return h_; }

    std::vector<double> p1(double t) const
    {
        const int s = L_.side();
        std::vector<double> e(s), p(h_, 0.0);
        for (int q = 0; q < s; ++q)
            e[q] = std::exp(-t * mu1_[q]);
        for (int q = 0; q < s; ++q)
            for (int m = 0; m < h_; ++m)
                p[m] += e[q] * cosq_[q * h_ + m];
        for (double& v : p)
            v /= s;
        return p;
    }

    // spatial values on the quadrant (cutoff applied unless disabled)
    void values(double t, bool with_cutoff, double* dst) const
    {
        std::vector<double> p = p1(t);
        const double t2 = t * t;
        for (int m2 = 0; m2 < h_; ++m2)
            for (int m1 = 0; m1 < h_; ++m1) {
                double v = p[m1] * p[m2];
                if (with_cutoff) {
                    double q = t2 + r4_[m2 * h_ + m1];
                    if (q >= 1.0 / 16)
                        v = 0.0;
                    else if (q > 1.0 / 256)
                        v *= cutoff(std::pow(q, 0.25));
                }
                dst[m2 * h_ + m1] = v;
            }
    }

    // even transform; out[k2*h + k1] = sum over the full torus of K(x) cos(k.x)
    std::vector<double> transform(double t, bool with_cutoff)
    {
        values(t, with_cutoff, in_);
        fftw_execute(plan_);
        return std::vector<double>(out_, out_ + h_ * h_);
    }

private:
    Lattice L_;
    int h_;
    std::vector<double> cosq_, mu1_, r4_;
    double* in_;
    double* out_;
    fftw_plan plan_;
};

cplx sigma(const Lattice& L, int kx, int ky, int d)
{
    if (d == 0)
        return 1.0;
    int j = std::abs(d);
    double th = 2 * M_PI * (j == 1 ? kx : ky) / L.side();
    cplx s = (std::polar(1.0, th) - 1.0) / L.eps();
    return d > 0 ? s : std::conj(s);
}

struct Accumulated
{
    double c2 = 0;
    std::vector<double> W;
};

Accumulated accumulate(const Lattice& L, int order, double h0_factor)
{
    QuadrantKernel qk(L);
    const int h = qk.h();
    std::vector<double> t, w;
    add_nodes(kernel_panels(L, h0_factor), order, t, w);
    const std::size_t M = t.size();
    std::vector<std::vector<double>> hat(M);
    for (std::size_t i = 0; i < M; ++i)
        hat[i] = qk.transform(t[i], true);

    Accumulated acc;
    acc.W.assign(static_cast<std::size_t>(h) * h, 0.0);
    auto mult = [&](int k1, int k2) {
        int a = (k1 == 0 || k1 == h - 1) ? 1 : 2;
        int b = (k2 == 0 || k2 == h - 1) ? 1 : 2;
        return double(a * b);
    };
    for (std::size_t i = 0; i < M; ++i)
        for (int k2 = 0; k2 < h; ++k2)
            for (int k1 = 0; k1 < h; ++k1) {
                double v = hat[i][k2 * h + k1];
                acc.c2 += w[i] * mult(k1, k2) * v * v;
            }
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j) {
            double tau = t[i] + t[j];
            if (tau >= 0.25)
                continue;
            std::vector<double> b = qk.transform(tau, true);
            double ww = w[i] * w[j];
            const double* a = hat[i].data();
            const double* c = hat[j].data();
            for (std::size_t k = 0; k < b.size(); ++k)
                acc.W[k] += ww * b[k] * a[k] * c[k];
        }
    return acc;
}

void fill_constants(RenormConstants& r, const TriangleTable& tab, double c2, double lambda)
{
    const int dirs[4] = {1, 2, -1, -2};
    r.c2 = c2;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 4; ++k) {
            r.c3[j][k] = tab.triangle(0, j + 1, dirs[k]);
            r.c4[j][k] = tab.triangle(j + 1, 0, dirs[k]);
        }
    for (int k = 0; k < 2; ++k)
        r.c3_neg[k] = tab.triangle(0, -(k + 1), k + 1);
    for (int j = 0; j < 2; ++j) {
        double s = 0;
        for (int k = 0; k < 2; ++k)
            s += r.c3[j][k] - r.c4[j][k] - r.c3[j][k + 2] + r.c4[j][k + 2];
        r.c1[j] = s;
    }
    double l2 = lambda * lambda;
    r.c_mass = -2 * l2 * c2 + l2 * ((r.c3[0][0] - r.c3_neg[0]) + (r.c3[1][1] - r.c3_neg[1]));
}

} // namespace

void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w)
{
    gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(order);
    x.resize(order);
    w.resize(order);
    for (int i = 0; i < order; ++i)
        gsl_integration_glfixed_point(-1.0, 1.0, i, &x[i], &w[i], tab);
    gsl_integration_glfixed_table_free(tab);
}

std::vector<double> laplacian_symbol(const Lattice& L)
{
    const int s = L.side();
    std::vector<double> mu(L.vertices());
    const double ie2 = 1.0 / (L.eps() * L.eps());
    for (int ky = 0; ky < s; ++ky)
        for (int kx = 0; kx < s; ++kx)
            mu[ky * s + kx] = ie2 * (4.0 - 2.0 * std::cos(2 * M_PI * kx / s) - 2.0 * std::cos(2 * M_PI * ky / s));
    return mu;
}

std::vector<double> heat_kernel_1d(const Lattice& L, double t)
{
    if (t < 0)
        throw std::invalid_argument("heat kernel requires t >= 0");
    const int s = L.side();
    std::vector<double> e(s), p(s, 0.0);
    for (int q = 0; q < s; ++q)
        e[q] = std::exp(-t * (2.0 - 2.0 * std::cos(2 * M_PI * q / s)) / (L.eps() * L.eps()));
    // evaluated on 0 <= m <= s/2 and mirrored, so p(t, -m) = p(t, m) exactly
    for (int m = 0; m <= s / 2; ++m) {
        double acc = 0;
        for (int q = 0; q < s; ++q)
            acc += e[q] * std::cos(2 * M_PI * double((long(q) * m) % s) / s);
        p[m] = acc / s;
        p[(s - m) % s] = p[m];
    }
    if (t == 0) {
        std::fill(p.begin(), p.end(), 0.0);
        p[0] = 1.0;
    }
    return p;
}

Plane heat_kernel(const Lattice& L, double t)
{
    std::vector<double> p = heat_kernel_1d(L, t);
    Plane P(L.vertices());
    for (int i = 0; i < L.vertices(); ++i)
        P[i] = p[L.x_of(i)] * p[L.y_of(i)];
    return P;
}

HeatKernel heat_kernel(const Lattice& L, const std::vector<double>& t_grid)
{
    HeatKernel hk{L, t_grid, {}};
    for (double t : t_grid)
        hk.P.push_back(heat_kernel(L, t));
    return hk;
}

double cutoff(double u)
{
    if (u <= 0.25)
        return 1.0;
    if (u >= 0.5)
        return 0.0;
    double s = (0.5 - u) / 0.25; // 1 at the plateau edge, 0 at the outer edge
    double a = bump(1.0 - s), b = bump(s);
    return a / (a + b);
}

double parabolic_norm(double t, double x1, double x2)
{
    double r2 = x1 * x1 + x2 * x2;
    return std::pow(t * t + r2 * r2, 0.25);
}

Plane truncated_kernel(const Lattice& L, double t)
{
    if (L.eps() > 0.25)
        throw std::invalid_argument("truncated kernel needs eps <= 1/4");
    std::vector<double> p = heat_kernel_1d(L, t);
    Plane K(L.vertices());
    const int s = L.side();
    for (int i = 0; i < L.vertices(); ++i) {
        int m1 = L.x_of(i), m2 = L.y_of(i);
        double x1 = (m1 <= s / 2 ? m1 : m1 - s) * L.eps();
        double x2 = (m2 <= s / 2 ? m2 : m2 - s) * L.eps();
        K[i] = cutoff(parabolic_norm(t, x1, x2)) * p[m1] * p[m2];
    }
    return K;
}

TruncatedKernel truncated_kernel(const Lattice& L)
{
    if (L.eps() > 0.25)
        throw std::invalid_argument("truncated kernel needs eps <= 1/4");
    return TruncatedKernel{L};
}

double TriangleTable::triangle(int a, int b, int c) const
{
    const int h = lattice.side() / 2 + 1;
    const int s = lattice.side();
    double total = 0;
    for (int k2 = 0; k2 < h; ++k2)
        for (int k1 = 0; k1 < h; ++k1) {
            double wk = W[k2 * h + k1];
            cplx orbit = 0;
            for (int s1 : {1, -1}) {
                if (s1 < 0 && (k1 == 0 || k1 == h - 1))
                    continue;
                for (int s2 : {1, -1}) {
                    if (s2 < 0 && (k2 == 0 || k2 == h - 1))
                        continue;
                    int kx = (s1 * k1 + s) % s, ky = (s2 * k2 + s) % s;
                    orbit += std::conj(sigma(lattice, kx, ky, b)) * sigma(lattice, kx, ky, a) *
                             sigma(lattice, kx, ky, c);
                }
            }
            total += wk * orbit.real();
        }
    return total;
}

RenormConstants renorm_constants(const Lattice& L, double lambda, const QuadratureOptions& q)
{
    if (L.eps() > 0.25)
        throw std::invalid_argument("renormalization constants need eps <= 1/4");
    RenormConstants r;
    r.n = L.n();
    r.eps = L.eps();
    r.lambda = lambda;
    Accumulated hi = accumulate(L, q.order, q.h0_factor);
    r.table = TriangleTable{L, hi.W};
    fill_constants(r, r.table, hi.c2, lambda);
    if (q.refine_order > 0) {
        Accumulated ref = accumulate(L, q.refine_order, q.h0_factor);
        RenormConstants r2;
        TriangleTable t2{L, ref.W};
        fill_constants(r2, t2, ref.c2, lambda);
        r.tol_c2 = std::abs(r2.c2 - r.c2);
        double d = 0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 4; ++k)
                d = std::max({d, std::abs(r2.c3[j][k] - r.c3[j][k]), std::abs(r2.c4[j][k] - r.c4[j][k])});
        r.tol_triangle = d;
        r.tol_mass = std::abs(r2.c_mass - r.c_mass);
        // report the more accurate rule
        r.table = std::move(t2);
        fill_constants(r, r.table, ref.c2, lambda);
    }
    return r;
}

double resolve_c_eps(const Lattice& L, const SimConfig& cfg)
{
    switch (cfg.c_eps_mode) {
    case CEpsMode::zero: return 0.0;
    case CEpsMode::explicit_value: return cfg.c_eps;
    case CEpsMode::computed: break;
    }
    static std::mutex m;
    static std::map<std::pair<int, double>, double> cache;
    {
        std::lock_guard<std::mutex> lock(m);
        auto it = cache.find({L.n(), cfg.lambda});
        if (it != cache.end())
            return it->second;
    }
    QuadratureOptions q;
    q.refine_order = 0;
    double c = renorm_constants(L, cfg.lambda, q).c_mass;
    std::lock_guard<std::mutex> lock(m);
    cache[{L.n(), cfg.lambda}] = c;
    return c;
}

void write_renorm_table(std::ostream& os, const std::vector<RenormConstants>& rows)
{
    os << "# lgt-renorm-table v1\n# n name value achieved_tolerance\n";
    const char* kn[4] = {"+1", "+2", "-1", "-2"};
    for (const auto& r : rows) {
        auto line = [&](const std::string& name, double v, double tol) {
            os << fmt::format("{} {} {:.15e} {:.3e}\n", r.n, name, v, tol);
        };
        line("C2", r.c2, r.tol_c2);
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 4; ++k) {
                line(fmt::format("C3_{}^{}", j + 1, kn[k]), r.c3[j][k], r.tol_triangle);
                line(fmt::format("C4_{}^{}", j + 1, kn[k]), r.c4[j][k], r.tol_triangle);
            }
        for (int k = 0; k < 2; ++k)
            line(fmt::format("C3_-{}^{}", k + 1, k + 1), r.c3_neg[k], r.tol_triangle);
        line("C1", r.c1[0], 4 * r.tol_triangle);
        line(fmt::format("Ceps(lambda={})", r.lambda), r.c_mass, r.tol_mass);
    }
}

// ---------------------------------------------------------------------------
// Ward identity vector field

namespace {

class Spectral
{
public:
    explicit Spectral(const Lattice& L) : s_(L.side()), n_(L.vertices())
    {
        buf_ = fftw_alloc_complex(n_);
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan_ = fftw_plan_dft_2d(s_, s_, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Spectral()
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan_);
        fftw_free(buf_);
    }
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    // real part of sum_k h(k) e^{i k w}
    Plane synth(const std::vector<cplx>& h)
    {
        for (int i = 0; i < n_; ++i) {
            buf_[i][0] = h[i].real();
            buf_[i][1] = h[i].imag();
        }
        fftw_execute(plan_);
        Plane r(n_);
        for (int i = 0; i < n_; ++i)
            r[i] = buf_[i][0];
        return r;
    }

private:
    int s_, n_;
    fftw_complex* buf_;
    fftw_plan plan_;
};

} // namespace

WardField ward_vector_field(const Lattice& L, double T_back, int gl_order)
{
    if (!(T_back > 0))
        throw std::invalid_argument("Ward field needs T_back > 0");
    const int s = L.side();
    const int N = L.vertices();
    const double e = L.eps();
    std::vector<double> mu = laplacian_symbol(L);
    std::vector<cplx> sig[2];
    for (int j = 0; j < 2; ++j) {
        sig[j].resize(N);
        for (int ky = 0; ky < s; ++ky)
            for (int kx = 0; kx < s; ++kx)
                sig[j][ky * s + kx] = sigma(L, kx, ky, j + 1);
    }
    // covariance spectrum of one real component at times (s, 0), s <= 0
    auto g = [&](double sv) {
        std::vector<cplx> out(N);
        for (int k = 0; k < N; ++k)
            out[k] = mu[k] > 0 ? (std::exp(sv * mu[k]) - std::exp(-(sv + 2 * T_back) * mu[k])) / (2 * mu[k])
                               : cplx(sv + T_back);
        return out;
    };

    std::vector<Panel> panels;
    double h = e * e / 64;
    panels.push_back({-h, 0.0});
    while (h < T_back) {
        double b = std::min(2 * h, T_back);
        panels.push_back({-b, -h});
        h = b;
    }
    std::vector<double> nodes, weights;
    add_nodes(panels, gl_order, nodes, weights);

    Spectral sp(L);
    Plane V[2] = {Plane(N, 0.0), Plane(N, 0.0)};
    Plane U(N, 0.0);
    std::vector<cplx> tmp(N);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        const double sv = nodes[q], wt = weights[q];
        std::vector<cplx> G = g(sv);
        for (int k = 0; k < N; ++k)
            tmp[k] = std::exp(sv * mu[k]) / double(N);
        Plane P = sp.synth(tmp);
        Plane dP[2];
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < N; ++k)
                tmp[k] = sig[j][k] * std::exp(sv * mu[k]) / double(N);
            dP[j] = sp.synth(tmp);
        }
        Plane C = sp.synth(G);
        for (int l = 0; l < 2; ++l) {
            for (int k = 0; k < N; ++k)
                tmp[k] = std::conj(sig[l][k]) * G[k];
            Plane bl = sp.synth(tmp);
            for (int j = 0; j < 2; ++j) {
                for (int k = 0; k < N; ++k)
                    tmp[k] = std::conj(sig[l][k]) * sig[j][k] * G[k];
                Plane blj = sp.synth(tmp);
                for (int sh = 0; sh < 2; ++sh)
                    for (int w = 0; w < N; ++w) {
                        int ws = sh ? L.step(w, l + 1, -1) : w; // argument w - sh e_l
                        V[l][w] += wt * 2 * (-dP[j][ws] * bl[w] + P[ws] * blj[w]);
                    }
            }
        }
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < N; ++k)
                tmp[k] = sig[j][k] * G[k];
            Plane cj = sp.synth(tmp);
            for (int w = 0; w < N; ++w)
                U[w] += wt * 2 * (P[w] * cj[w] - dP[j][w] * C[w]);
        }
    }
    // equal-time term at y = x
    std::vector<cplx> G0 = g(0.0);
    for (int l = 0; l < 2; ++l) {
        cplx acc = 0;
        for (int ky = 0; ky < s; ++ky)
            for (int kx = 0; kx < s; ++kx) {
                double th = 2 * M_PI * (l == 0 ? kx : ky) / s;
                acc += std::polar(1.0, -th) * G0[ky * s + kx];
            }
        V[l][0] -= 2 * acc.real();
    }
    // functions of w = x - y with x at the origin -> functions of y
    WardField out{GaugeField(L), Plane(N, 0.0), 0.0};
    for (int y = 0; y < N; ++y) {
        int w = L.index(-L.x_of(y), -L.y_of(y));
        out.V.h[y] = V[0][w];
        out.V.v[y] = V[1][w];
        out.U[y] = U[w];
    }
    // the free fields start at -T_back; report how far the slowest mode is
    // from equilibrium as the finite-burn-in tail
    double mu_min = 1e300;
    for (double m : mu)
        if (m > 0)
            mu_min = std::min(mu_min, m);
    out.tail_bound = std::exp(-2 * T_back * mu_min);
    return out;
}

Plane ward_residual(const Lattice& L, const WardField& w, double sign_U)
{
    Plane d = div(L, w.V);
    Plane lu = laplacian(L, w.U);
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] += sign_U * lu[i];
    return d;
}

IdentityResidual heat_kernel_identity_residual(const Lattice& L, double s, double s_prime, int y,
                                               int y_prime)
{
    const int N = L.vertices();
    std::vector<double> mu = laplacian_symbol(L);
    double mu_min = 1e300;
    for (double m : mu)
        if (m > 0)
            mu_min = std::min(mu_min, m);
    const double t0 = -std::min(s, s_prime);
    const double span = 20.0 / mu_min;
    std::vector<Panel> panels;
    double h = L.eps() * L.eps() / 16;
    panels.push_back({t0, t0 + h});
    while (h < span) {
        panels.push_back({t0 + h, t0 + 2 * h});
        h *= 2;
    }
    std::vector<double> nodes, weights;
    add_nodes(panels, 12, nodes, weights);
    const double T = t0 + h;

    double lhs = 0;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
        const double t = nodes[q];
        Plane a = heat_kernel(L, t + s), b = heat_kernel(L, t + s_prime);
        double acc = 0;
        for (int j = 1; j <= 2; ++j) {
            Plane ga = grad(L, a, j), gb = grad(L, b, j);
            for (int x = 0; x < N; ++x) {
                int xa = L.shift(x, L.x_of(y), L.y_of(y));
                int xb = L.shift(x, L.x_of(y_prime), L.y_of(y_prime));
                acc += ga[xa] * gb[xb];
            }
        }
        lhs += 2 * weights[q] * acc;
    }
    int d = L.shift(y, -L.x_of(y_prime), -L.y_of(y_prime));
    double rhs = heat_kernel(L, std::abs(s - s_prime))[d] - 1.0 / N;
    IdentityResidual r;
    r.residual = std::abs(lhs - rhs);
    // remaining tail: sum_k e^{-(2T + s + s') mu_k} / N over nonzero modes
    double tail = 0;
    for (double m : mu)
        if (m > 0)
            tail += std::exp(-(2 * T + s + s_prime) * m) / N;
    r.tail_bound = tail;
    return r;
}

} // namespace lgt
