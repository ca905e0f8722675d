#include "lgt/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lgt {

namespace {

double bump(double x1, double x2)
{
    double w = x1 * x1 + x2 * x2;
    return w < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - w)) : 0.0;
}

// nested central differences for d^{a} / dx1^{a1} dx2^{a2}
double derivative(const BumpFn& f, double x1, double x2, int a1, int a2, double h)
{
    if (a1 > 0)
        return (derivative(f, x1 + h, x2, a1 - 1, a2, h) - derivative(f, x1 - h, x2, a1 - 1, a2, h)) /
               (2 * h);
    if (a2 > 0)
        return (derivative(f, x1, x2 + h, a1, a2 - 1, h) - derivative(f, x1, x2 - h, a1, a2 - 1, h)) /
               (2 * h);
    return f(x1, x2);
}

} // namespace

double cr_norm(const BumpFn& phi, int r)
{
    const int g = 160;
    const double h = 2e-3;
    double best = 0;
    for (int k = 0; k <= r; ++k)
        for (int a1 = 0; a1 <= k; ++a1)
            for (int i = 0; i <= g; ++i)
                for (int j = 0; j <= g; ++j) {
                    double x1 = -1.0 + 2.0 * i / g, x2 = -1.0 + 2.0 * j / g;
                    best = std::max(best, std::abs(derivative(phi, x1, x2, a1, k - a1, h)));
                }
    return best;
}

std::vector<BumpFn> default_bumps(int r)
{
    std::vector<BumpFn> raw = {
        [](double a, double b) { return bump(a, b); },
        [](double a, double b) { return a * bump(a, b); },
        [](double a, double b) { return b * bump(a, b); },
    };
    std::vector<BumpFn> out;
    for (auto& f : raw) {
        double c = 1.0 / cr_norm(f, r);
        out.push_back([f, c](double a, double b) { return c * f(a, b); });
    }
    return out;
}

TestFunctionFamily make_family(double lambda_min, int r, double lambda_max)
{
    if (!(lambda_min > 0) || lambda_min > lambda_max)
        throw std::invalid_argument("test family needs 0 < lambda_min <= lambda_max");
    TestFunctionFamily f;
    f.r = r;
    f.base = default_bumps(r);
    for (double l = lambda_min; l <= lambda_max * (1 + 1e-12); l *= 2)
        f.scales.push_back(l);
    return f;
}

std::size_t TestFunctionFamily::centers_per_side(std::size_t s) const
{
    return std::max<std::size_t>(1, std::size_t(std::lround(std::ceil(2.0 / scales.at(s) - 1e-9))));
}

std::size_t TestFunctionFamily::size() const
{
    std::size_t n = 0;
    for (std::size_t s = 0; s < scales.size(); ++s) {
        std::size_t c = centers_per_side(s);
        n += base.size() * c * c;
    }
    return n;
}

TestIndex test_index(const TestFunctionFamily& fam, std::size_t t)
{
    for (std::size_t s = 0; s < fam.scales.size(); ++s) {
        std::size_t c = fam.centers_per_side(s), block = fam.base.size() * c * c;
        if (t < block) {
            TestIndex ix;
            ix.scale = s;
            ix.base = t / (c * c);
            std::size_t k = t % (c * c);
            ix.x1 = double(k % c) / double(c);
            ix.x2 = double(k / c) / double(c);
            return ix;
        }
        t -= block;
    }
    throw std::out_of_range("test function index");
}

DiscreteField vertex_field(const Lattice& L, const Plane& f)
{
    require(L, f);
    return DiscreteField{L, {f}, {{0.0, 0.0}}};
}

DiscreteField vertex_field(const Lattice& L, const ScalarField& phi)
{
    require(L, phi);
    return DiscreteField{L, {phi.re, phi.im}, {{0.0, 0.0}, {0.0, 0.0}}};
}

DiscreteField edge_field(const Lattice& L, const GaugeField& A)
{
    require(L, A);
    return DiscreteField{L, {A.h, A.v}, {{0.5, 0.0}, {0.0, 0.5}}};
}

DiscreteField state_field(const Lattice& L, const SystemState& s)
{
    DiscreteField f = edge_field(L, s.gauge);
    f.comps.push_back(s.scalar.re);
    f.comps.push_back(s.scalar.im);
    f.offsets.push_back({0.0, 0.0});
    f.offsets.push_back({0.0, 0.0});
    return f;
}

double discrete_pairing(const Lattice& L, const Plane& f, std::array<double, 2> o, const BumpFn& phi,
                        double lambda, double x1, double x2)
{
    require(L, f);
    const double e = L.eps();
    if (lambda < e * (1 - 1e-12))
        throw std::invalid_argument("pairing scale lambda must be >= eps");
    // unwrapped lattice points within distance lambda of the center; wrapping
    // the index sums over all periodic images
    long i0 = long(std::ceil((x1 - lambda) / e - o[0])), i1 = long(std::floor((x1 + lambda) / e - o[0]));
    long j0 = long(std::ceil((x2 - lambda) / e - o[1])), j1 = long(std::floor((x2 + lambda) / e - o[1]));
    const double il = 1.0 / lambda;
    double acc = 0;
    for (long j = j0; j <= j1; ++j) {
        double z2 = ((j + o[1]) * e - x2) * il;
        for (long i = i0; i <= i1; ++i) {
            double z1 = ((i + o[0]) * e - x1) * il;
            double p = phi(z1, z2);
            if (p != 0.0)
                acc += p * f[L.index(int(i & L.mask()), int(j & L.mask()))];
        }
    }
    return e * e * il * il * acc;
}

PairingVector pairings(const TestFunctionFamily& fam, const DiscreteField& f)
{
    PairingVector p;
    p.ncomp = f.comps.size();
    const std::size_t n = fam.size();
    p.v.resize(n * p.ncomp);
    for (std::size_t t = 0; t < n; ++t) {
        TestIndex ix = test_index(fam, t);
        for (std::size_t c = 0; c < p.ncomp; ++c)
            p.v[t * p.ncomp + c] = discrete_pairing(f.lattice, f.comps[c], f.offsets[c], fam.base[ix.base],
                                                    fam.scales[ix.scale], ix.x1, ix.x2);
    }
    return p;
}

namespace {

HolderReport sup_report(const std::vector<double>& d, std::size_t ncomp, double alpha,
                        const TestFunctionFamily& fam)
{
    HolderReport r;
    r.alpha = alpha;
    std::size_t best = d.size();
    for (std::size_t t = 0, off = 0; off < d.size(); ++t) {
        TestIndex ix = test_index(fam, t);
        double w = std::pow(fam.scales[ix.scale], -alpha);
        for (std::size_t c = 0; c < ncomp; ++c, ++off) {
            double val = w * std::abs(d[off]);
            if (val > r.value) {
                r.value = val;
                best = off;
            }
        }
    }
    if (best < d.size()) {
        TestIndex ix = test_index(fam, best / ncomp);
        r.lambda = fam.scales[ix.scale];
        r.x1 = ix.x1;
        r.x2 = ix.x2;
        r.base = ix.base;
        r.comp = best % ncomp;
    }
    return r;
}

// skips the test-index walk when only the value is needed
double sup_value(const std::vector<double>& d, std::size_t ncomp, const std::vector<double>& weights)
{
    double v = 0;
    for (std::size_t off = 0; off < d.size(); ++off)
        v = std::max(v, weights[off / ncomp] * std::abs(d[off]));
    return v;
}

std::vector<double> weights(const TestFunctionFamily& fam, double alpha)
{
    std::vector<double> w(fam.size());
    for (std::size_t t = 0; t < w.size(); ++t)
        w[t] = std::pow(fam.scales[test_index(fam, t).scale], -alpha);
    return w;
}

} // namespace

HolderReport holder_norm(const PairingVector& p, double alpha, const TestFunctionFamily& fam)
{
    return sup_report(p.v, p.ncomp, alpha, fam);
}

HolderReport holder_norm(const DiscreteField& f, double alpha, const TestFunctionFamily& fam)
{
    return holder_norm(pairings(fam, f), alpha, fam);
}

HolderReport cross_scale_distance(const PairingVector& coarse, const PairingVector& fine, double alpha,
                                  const TestFunctionFamily& fam)
{
    if (coarse.ncomp != fine.ncomp || coarse.v.size() != fine.v.size())
        throw std::invalid_argument("cross-scale distance: pairing layouts differ");
    std::vector<double> d(coarse.v.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = fine.v[i] - coarse.v[i];
    return sup_report(d, coarse.ncomp, alpha, fam);
}

HolderReport cross_scale_distance(const DiscreteField& coarse, const DiscreteField& fine, double alpha,
                                  const TestFunctionFamily& fam)
{
    return cross_scale_distance(pairings(fam, coarse), pairings(fam, fine), alpha, fam);
}

SpacetimeReport spacetime_distance(const std::vector<double>& ta, const std::vector<PairingVector>& a,
                                   const std::vector<double>& tb, const std::vector<PairingVector>& b,
                                   double alpha, double delta, double eta, double eps,
                                   const TestFunctionFamily& fam)
{
    if (ta.size() != a.size() || tb.size() != b.size())
        throw std::invalid_argument("spacetime distance: times and snapshots differ in length");
    if (ta.size() != tb.size())
        throw std::invalid_argument("spacetime distance: time grids differ");
    for (std::size_t i = 0; i < ta.size(); ++i)
        if (std::abs(ta[i] - tb[i]) > 1e-12 * std::max(1.0, std::abs(ta[i])))
            throw std::invalid_argument("spacetime distance: time grids differ");
    const std::size_t nc = a.empty() ? 0 : a[0].ncomp;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].ncomp != nc || b[i].ncomp != nc || a[i].v.size() != b[i].v.size())
            throw std::invalid_argument("spacetime distance: pairing layouts differ");

    auto tnorm = [eps](double t) { return std::max(std::min(std::sqrt(std::abs(t)), 1.0), eps); };
    std::vector<double> w0 = weights(fam, alpha), w1 = weights(fam, alpha - delta);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ta.size(); ++i)
        if (ta[i] > 0)
            idx.push_back(i);

    SpacetimeReport r;
    std::vector<double> d;
    for (std::size_t i : idx) {
        d.resize(a[i].v.size());
        for (std::size_t k = 0; k < d.size(); ++k)
            d[k] = a[i].v[k] - b[i].v[k];
        r.instantaneous = std::max(r.instantaneous, std::pow(tnorm(ta[i]), -eta) * sup_value(d, nc, w0));
    }
    for (std::size_t p = 0; p < idx.size(); ++p)
        for (std::size_t q = p + 1; q < idx.size(); ++q) {
            std::size_t i = idx[p], j = idx[q];
            d.resize(a[i].v.size());
            for (std::size_t k = 0; k < d.size(); ++k)
                d[k] = (a[j].v[k] - a[i].v[k]) - (b[j].v[k] - b[i].v[k]);
            double st = std::min(tnorm(ta[i]), tnorm(ta[j]));
            double den = std::pow(std::max(std::sqrt(std::abs(ta[j] - ta[i])), eps), delta);
            r.increments = std::max(r.increments, std::pow(st, -eta) * sup_value(d, nc, w1) / den);
        }
    r.value = r.instantaneous + r.increments;
    return r;
}

} // namespace lgt
