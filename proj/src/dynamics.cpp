#include "lgt/dynamics.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "lgt/calculus.hpp"
#include "lgt/rng.hpp"

namespace lgt {

namespace {

std::mutex plan_mutex;

// link phases u(x) = e^{-i eps lambda B_j(x)} for both planes
struct Links
{
    std::vector<cplx> h, v;
};

Links link_phases(const Lattice& L, const GaugeField& B, double lambda)
{
    const double a = -L.eps() * lambda;
    Links u;
    u.h.resize(B.size());
    u.v.resize(B.size());
    for (std::size_t x = 0; x < B.size(); ++x) {
        u.h[x] = std::polar(1.0, a * B.h[x]);
        u.v[x] = std::polar(1.0, a * B.v[x]);
    }
    return u;
}

// eps^-1 lambda Im(e^{-i eps lambda B} Psi(e+) conj Psi(e-)) for both planes
void add_link_current(const Lattice& L, const Links& u, const ScalarField& psi, double lambda,
                      GaugeField& out)
{
    const double c = lambda / L.eps();
    for (int x = 0; x < L.vertices(); ++x) {
        cplx p = std::conj(psi[x]);
        out.h[x] += c * std::imag(u.h[x] * psi[L.shift(x, 1, 0)] * p);
        out.v[x] += c * std::imag(u.v[x] * psi[L.shift(x, 0, 1)] * p);
    }
}

ScalarField cov_laplacian_links(const Lattice& L, const Links& u, const ScalarField& psi)
{
    const double ie2 = 1.0 / (L.eps() * L.eps());
    ScalarField r(L);
    for (int x = 0; x < L.vertices(); ++x) {
        int xe = L.shift(x, 1, 0), xw = L.shift(x, -1, 0);
        int xn = L.shift(x, 0, 1), xs = L.shift(x, 0, -1);
        cplx s = u.h[x] * psi[xe] + std::conj(u.h[xw]) * psi[xw] + u.v[x] * psi[xn] +
                 std::conj(u.v[xs]) * psi[xs];
        r.set(x, ie2 * (s - 4.0 * psi[x]));
    }
    return r;
}

Plane filtered_white_noise(const Lattice& L, double eta, std::uint64_t seed, std::uint32_t channel)
{
    const int s = L.side();
    const int sh = s / 2 + 1;
    Plane w(L.vertices());
    for (int x = 0; x < L.vertices(); ++x)
        w[x] = gaussian_pair(seed, ~std::uint64_t(0), x, 100 + channel).first / L.eps();
    std::vector<fftw_complex> spec(static_cast<std::size_t>(s) * sh);
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fwd = fftw_plan_dft_r2c_2d(s, s, w.data(), spec.data(), FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_2d(s, s, spec.data(), w.data(), FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    const double ie2 = 1.0 / (L.eps() * L.eps());
    for (int ky = 0; ky < s; ++ky)
        for (int kx = 0; kx < sh; ++kx) {
            double mu = ie2 * (4.0 - 2.0 * std::cos(2 * M_PI * kx / s) - 2.0 * std::cos(2 * M_PI * ky / s));
            double f = std::pow(1.0 + mu, -(1.0 + eta) / 2.0) / (double(s) * s);
            auto& c = spec[static_cast<std::size_t>(ky) * sh + kx];
            c[0] *= f;
            c[1] *= f;
        }
    fftw_execute(bwd);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    return w;
}

} // namespace

NoiseRealization sample_noise(const Lattice& L, double dt, std::uint64_t seed, std::uint64_t step)
{
    if (!(dt > 0))
        throw std::invalid_argument("noise requires dt > 0");
    const double sd = std::sqrt(dt) / L.eps();
    NoiseRealization w{GaugeField(L), ScalarField(L)};
    for (int x = 0; x < L.vertices(); ++x) {
        auto [a, b] = gaussian_pair(seed, step, x, 0);
        auto [c, d] = gaussian_pair(seed, step, x, 1);
        w.edges.h[x] = sd * a;
        w.edges.v[x] = sd * b;
        w.vertices.re[x] = sd * c;
        w.vertices.im[x] = sd * d;
    }
    return w;
}

NoiseRealization coarsen_noise(const Lattice& fine, const NoiseRealization& w, const Lattice& coarse)
{
    if (fine.n() != coarse.n() + 1)
        throw std::invalid_argument("coarsen_noise: fine level must be coarse level + 1");
    require(fine, w.edges);
    require(fine, w.vertices);
    NoiseRealization r{GaugeField(coarse), ScalarField(coarse)};
    auto avg = [&](const Plane& p, int X) {
        int fx = 2 * coarse.x_of(X), fy = 2 * coarse.y_of(X);
        return 0.25 * (p[fine.index(fx, fy)] + p[fine.index(fx + 1, fy)] +
                       p[fine.index(fx, fy + 1)] + p[fine.index(fx + 1, fy + 1)]);
    };
    for (int X = 0; X < coarse.vertices(); ++X) {
        r.edges.h[X] = avg(w.edges.h, X);
        r.edges.v[X] = avg(w.edges.v, X);
        r.vertices.re[X] = avg(w.vertices.re, X);
        r.vertices.im[X] = avg(w.vertices.im, X);
    }
    return r;
}

NoiseRealization operator+(const NoiseRealization& a, const NoiseRealization& b)
{
    return {a.edges + b.edges, a.vertices + b.vertices};
}

NoiseRealization operator*(double c, const NoiseRealization& a)
{
    return {c * a.edges, c * a.vertices};
}

double hamiltonian(const Lattice& L, const GaugeField& A, const ScalarField& phi, double lambda)
{
    PlaquetteField F = curl(L, A);
    double hf = 0;
    for (double f : F.f)
        hf += f * f;
    double hd = 0;
    for (int j = 1; j <= 2; ++j) {
        ScalarField D = cov_deriv(L, A, phi, lambda, j);
        for (std::size_t x = 0; x < D.size(); ++x)
            hd += D.re[x] * D.re[x] + D.im[x] * D.im[x];
    }
    return 0.5 * L.eps() * L.eps() * (hf + hd);
}

Drift drift_original(const Lattice& L, const SystemState& s, double lambda, double c_eps)
{
    require(L, s.gauge);
    require(L, s.scalar);
    const double ie = 1.0 / L.eps();
    PlaquetteField F = curl(L, s.gauge);
    Drift d{GaugeField(L), ScalarField(L)};
    for (int x = 0; x < L.vertices(); ++x) {
        d.gauge.h[x] = ie * (F.f[L.shift(x, 0, -1)] - F.f[x]);
        d.gauge.v[x] = ie * (F.f[x] - F.f[L.shift(x, -1, 0)]);
    }
    Links u = link_phases(L, s.gauge, lambda);
    add_link_current(L, u, s.scalar, lambda, d.gauge);
    d.scalar = cov_laplacian_links(L, u, s.scalar);
    for (int x = 0; x < L.vertices(); ++x) {
        d.scalar.re[x] -= c_eps * s.scalar.re[x];
        d.scalar.im[x] -= c_eps * s.scalar.im[x];
    }
    return d;
}

Drift drift_gauge_fixed(const Lattice& L, const SystemState& s, double lambda, double c_eps)
{
    require(L, s.gauge);
    require(L, s.scalar);
    Drift d{edge_laplacian(L, s.gauge), ScalarField(L)};
    Links u = link_phases(L, s.gauge, lambda);
    add_link_current(L, u, s.scalar, lambda, d.gauge);
    d.scalar = cov_laplacian_links(L, u, s.scalar);
    Plane dv = div(L, s.gauge);
    for (int x = 0; x < L.vertices(); ++x) {
        cplx p = s.scalar[x];
        cplx r = d.scalar[x] + cplx(0, lambda * dv[x]) * p - c_eps * p;
        d.scalar.set(x, r);
    }
    return d;
}

cplx exp_rem1(cplx z)
{
    if (std::abs(z) > 0.5)
        return std::exp(z) - 1.0 - z;
    cplx term = z * z / 2.0, sum = 0;
    for (int k = 3; k < 30 && term != cplx(0); ++k) {
        sum += term;
        term *= z / double(k);
    }
    return sum;
}

cplx exp_rem2(cplx z)
{
    if (std::abs(z) > 0.5)
        return std::exp(z) - 1.0 - z - z * z / 2.0;
    cplx term = z * z * z / 6.0, sum = 0;
    for (int k = 4; k < 30 && term != cplx(0); ++k) {
        sum += term;
        term *= z / double(k);
    }
    return sum;
}

PolynomialDrift drift_polynomial(const Lattice& L, const SystemState& s, double lambda,
                                 double c_eps, bool include_remainders)
{
    require(L, s.gauge);
    require(L, s.scalar);
    const double e = L.eps();
    const double ie = 1.0 / e;
    const double ie2 = ie * ie;
    const double l2 = lambda * lambda;
    const GaugeField& B = s.gauge;
    const ScalarField& psi = s.scalar;
    PolynomialDrift out{{edge_laplacian(L, B), ScalarField(L)}, {GaugeField(L), ScalarField(L)}};
    ScalarField lap = laplacian(L, psi);
    const cplx I(0, 1);

    for (int x = 0; x < L.vertices(); ++x) {
        const int nb[4] = {L.shift(x, 1, 0), L.shift(x, -1, 0), L.shift(x, 0, 1), L.shift(x, 0, -1)};
        const double b[4] = {B.h[x], -B.h[nb[1]], B.v[x], -B.v[nb[3]]}; // B(x, x+e)
        cplx p = psi[x];
        cplx pc = std::conj(p);

        // gauge plane rates, vertex-indexed B~_j(x) = B_j(x, x+e_j)
        for (int j = 0; j < 2; ++j) {
            cplx q = psi[nb[2 * j]];
            cplx grad_q = (q - p) * ie;
            double rate = lambda * std::imag(grad_q * pc) - l2 * b[2 * j] * std::real(q * pc);
            double rem = ie * lambda * std::imag(exp_rem1(-I * e * lambda * b[2 * j]) * q * pc);
            Plane& rp = j == 0 ? out.rate.gauge.h : out.rate.gauge.v;
            rp[x] += rate;
            (j == 0 ? out.remainder.gauge.h : out.remainder.gauge.v)[x] = rem;
        }

        cplx transport = 0, mass = 0, rem = 0;
        for (int k = 0; k < 4; ++k) {
            cplx q = psi[nb[k]];
            transport += b[k] * (q - p) * ie;
            mass += b[k] * b[k] * q;
            rem += exp_rem2(-I * e * lambda * b[k]) * q;
        }
        cplx rate = lap[x] - I * lambda * transport - 0.5 * l2 * mass - c_eps * p;
        out.rate.scalar.set(x, rate);
        out.remainder.scalar.set(x, ie2 * rem);
    }
    if (include_remainders) {
        out.rate.gauge = out.rate.gauge + out.remainder.gauge;
        out.rate.scalar = out.rate.scalar + out.remainder.scalar;
    }
    return out;
}

PolynomialDrift drift_polynomial_edgewise(const Lattice& L, const SystemState& s, double lambda,
                                          double c_eps, bool include_remainders)
{
    require(L, s.gauge);
    require(L, s.scalar);
    const double e = L.eps();
    const double ie = 1.0 / e;
    const double l2 = lambda * lambda;
    const GaugeField& B = s.gauge;
    const ScalarField& psi = s.scalar;
    const cplx I(0, 1);
    PolynomialDrift out{{GaugeField(L), ScalarField(L)}, {GaugeField(L), ScalarField(L)}};

    for (int dir = 1; dir <= 2; ++dir)
        for (int x = 0; x < L.vertices(); ++x) {
            EdgeId ed{x, dir, +1};
            EdgeStencil st = L.edge_neighborhood(ed);
            double lap = ie * ie * (B(st.n) + B(st.s) + B(st.e) + B(st.w) - 4.0 * B(ed));
            cplx pp = psi[L.head(ed)], pm = psi[L.tail(ed)];
            double rate = lap + lambda * std::imag((pp - pm) * ie * std::conj(pm)) -
                          l2 * B(ed) * std::real(pp * std::conj(pm));
            double rem = ie * lambda * std::imag(exp_rem1(-I * e * lambda * B(ed)) * pp * std::conj(pm));
            out.rate.gauge.at(ed) = rate;
            out.remainder.gauge.at(ed) = rem;
        }

    for (int x = 0; x < L.vertices(); ++x) {
        cplx p = psi[x];
        cplx sum_lap = -4.0 * p, transport = 0, mass = 0, rem = 0;
        for (int dir = 1; dir <= 2; ++dir)
            for (int o : {+1, -1}) {
                EdgeId ed = o > 0 ? EdgeId{x, dir, +1} : EdgeId{L.step(x, dir, -1), dir, -1};
                cplx q = psi[L.head(ed)];
                double b = B(ed);
                sum_lap += q;
                transport += b * (q - p) * ie;
                mass += b * b * q;
                rem += exp_rem2(-I * e * lambda * b) * q;
            }
        out.rate.scalar.set(x, ie * ie * sum_lap - I * lambda * transport - 0.5 * l2 * mass - c_eps * p);
        out.remainder.scalar.set(x, ie * ie * rem);
    }
    if (include_remainders) {
        out.rate.gauge = out.rate.gauge + out.remainder.gauge;
        out.rate.scalar = out.rate.scalar + out.remainder.scalar;
    }
    return out;
}

double default_dt(const Lattice& L) { return stability_factor * L.eps() * L.eps(); }

void validate(const Lattice& L, const SimConfig& cfg)
{
    double bound = default_dt(L);
    if (!(cfg.dt > 0))
        throw std::invalid_argument("dt must be positive");
    if (cfg.dt > bound * (1 + 1e-12))
        throw std::invalid_argument("dt=" + std::to_string(cfg.dt) +
                                    " exceeds the stability bound eps^2/8=" + std::to_string(bound));
    if (cfg.t_final < 0)
        throw std::invalid_argument("t_final must be >= 0");
}

bool finite_and_bounded(const SystemState& s)
{
    auto ok = [](const Plane& p) {
        for (double v : p)
            if (!std::isfinite(v) || std::abs(v) > blowup_threshold)
                return false;
        return true;
    };
    return ok(s.gauge.h) && ok(s.gauge.v) && ok(s.scalar.re) && ok(s.scalar.im) && ok(s.phase);
}

SystemState step(const Lattice& L, const SystemState& s, const SimConfig& cfg,
                 const NoiseRealization& w)
{
    const double dt = cfg.dt;
    Drift d;
    switch (cfg.system) {
    case System::original: d = drift_original(L, s, cfg.lambda, cfg.c_eps); break;
    case System::gauge_fixed: d = drift_gauge_fixed(L, s, cfg.lambda, cfg.c_eps); break;
    case System::polynomial: d = drift_polynomial(L, s, cfg.lambda, cfg.c_eps, true).rate; break;
    }
    SystemState r;
    r.phase = s.phase;
    if (cfg.system != System::original) {
        Plane dv = div(L, s.gauge);
        for (std::size_t x = 0; x < dv.size(); ++x)
            r.phase[x] += dt * dv[x];
    }
    r.gauge = s.gauge + dt * d.gauge + w.edges;
    r.scalar = s.scalar + dt * d.scalar + w.vertices;
    r.t = s.t + dt;
    r.step = s.step + 1;
    if (!finite_and_bounded(r))
        throw BlowUp(r.t, r.step);
    return r;
}

TrajectoryRecord run_trajectory(const Lattice& L, const SimConfig& cfg, const SystemState& init,
                                const std::vector<ObserverSpec>& observers)
{
    validate(L, cfg);
    TrajectoryRecord rec;
    SystemState s = init;
    if (s.phase.empty())
        s.phase.assign(L.vertices(), 0.0);
    const long nsteps = std::lround(cfg.t_final / cfg.dt);
    auto observe = [&](const SystemState& st) {
        for (const auto& o : observers)
            if (st.step % std::max(1L, o.stride) == 0)
                o.fn(st.step, st.t, st);
    };
    observe(s);
    for (long k = 0; k < nsteps; ++k) {
        try {
            s = step(L, s, cfg, sample_noise(L, cfg.dt, cfg.seed, s.step));
        } catch (const BlowUp& b) {
            rec.blew_up = true;
            rec.blowup_time = b.t;
            break;
        }
        observe(s);
    }
    rec.steps = s.step - init.step;
    rec.final_state = std::move(s);
    return rec;
}

SystemState initial_zero(const Lattice& L) { return SystemState(L); }

SystemState initial_smooth(const Lattice& L, double a, double b, int m1, int m2)
{
    SystemState s(L);
    for (int i = 0; i < L.vertices(); ++i) {
        double x = L.x_of(i) * L.eps(), y = L.y_of(i) * L.eps();
        // edge values sampled at midpoints
        s.gauge.h[i] = a * std::cos(2 * M_PI * (m1 * (x + 0.5 * L.eps()) + m2 * y));
        s.gauge.v[i] = a * std::cos(2 * M_PI * (m1 * x + m2 * (y + 0.5 * L.eps())));
        s.scalar.set(i, std::polar(b, 2 * M_PI * (m1 * x + m2 * y)));
    }
    return s;
}

SystemState initial_gff(const Lattice& L, double eta, std::uint64_t seed)
{
    if (!(eta > -0.5))
        throw std::invalid_argument("initial data regularity requires eta > -1/2");
    SystemState s(L);
    s.gauge.h = filtered_white_noise(L, eta, seed, 0);
    s.gauge.v = filtered_white_noise(L, eta, seed, 1);
    s.scalar.re = filtered_white_noise(L, eta, seed, 2);
    s.scalar.im = filtered_white_noise(L, eta, seed, 3);
    return s;
}

} // namespace lgt
