#include "lgt/observables.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "lgt/calculus.hpp"

namespace lgt {

PlaquetteField curvature(const Lattice& L, const GaugeField& A) { return curl(L, A); }

WickVariance wick_variance_from_c2(double c2) { return WickVariance{2.0 * c2}; }

// W_0 = 1, W_1 = u - s, W_{n+1} = (u - (2n+1) s) W_n - n^2 s^2 W_{n-1}
std::vector<std::int64_t> wick_coefficients(int n)
{
    if (n < 0)
        throw std::invalid_argument("wick power order must be >= 0");
    std::vector<std::int64_t> prev{1}, cur{1, -1};
    if (n == 0)
        return prev;
    for (int m = 1; m < n; ++m) {
        std::vector<std::int64_t> next(m + 2, 0);
        for (int k = 0; k <= m; ++k) {
            next[k] += cur[k];                       // u * W_m
            next[k + 1] -= (2 * m + 1) * cur[k];     // -(2m+1) s W_m
        }
        for (int k = 0; k < m; ++k)
            next[k + 2] -= std::int64_t(m) * m * prev[k]; // -m^2 s^2 W_{m-1}
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

Plane wick_power(const Lattice& L, const ScalarField& phi, int n, WickVariance var)
{
    require(L, phi);
    if (n < 1)
        throw std::invalid_argument("wick power order must be >= 1");
    std::vector<std::int64_t> c = wick_coefficients(n);
    Plane out(phi.size());
    for (std::size_t x = 0; x < phi.size(); ++x) {
        double u = phi.re[x] * phi.re[x] + phi.im[x] * phi.im[x];
        // Horner in u with coefficients c[n-d] sigma2^{n-d} of u^d
        double acc = 0;
        for (int d = n; d >= 0; --d)
            acc = acc * u + double(c[n - d]) * std::pow(var.sigma2, n - d);
        out[x] = acc;
    }
    return out;
}

ScalarField covariant_composite(const Lattice& L, const GaugeField& A, const ScalarField& phi,
                                double lambda, int j)
{
    ScalarField D = cov_deriv(L, A, phi, lambda, j);
    ScalarField out(L);
    for (int x = 0; x < L.vertices(); ++x)
        out.set(x, std::conj(phi[x]) * D[x]);
    return out;
}

namespace {

struct IV
{
    long x, y;
    bool operator==(const IV&) const = default;
};

EdgeId directed(const Lattice& L, IV a, IV b)
{
    long dx = b.x - a.x, dy = b.y - a.y;
    int ia = L.index(int(a.x & L.mask()), int(a.y & L.mask()));
    int ib = L.index(int(b.x & L.mask()), int(b.y & L.mask()));
    if (dx == 1 && dy == 0)
        return {ia, 1, +1};
    if (dx == -1 && dy == 0)
        return {ib, 1, -1};
    if (dx == 0 && dy == 1)
        return {ia, 2, +1};
    if (dx == 0 && dy == -1)
        return {ib, 2, -1};
    throw std::logic_error("non-adjacent vertices in lattice path");
}

struct Crossing
{
    double sigma;
    IV from;
    IV dir;
};

bool build(const SmoothCurve& c, const Lattice& L, double dx, double dy, DiscreteCurve& out)
{
    const double ie = 1.0 / L.eps();
    // a closed curve ends exactly where it starts, up to whole windings of the torus
    const auto r0 = c.r(0.0), r1 = c.r(1.0);
    const std::array<double, 2> wind{std::round(r1[0] - r0[0]), std::round(r1[1] - r0[1])};
    auto u = [&](double s) {
        auto p = c.closed && s >= 1.0 ? std::array<double, 2>{r0[0] + wind[0], r0[1] + wind[1]} : c.r(s);
        return std::array<double, 2>{(p[0] + dx) * ie, (p[1] + dy) * ie};
    };
    auto cell = [&](double s) {
        auto p = u(s);
        return IV{long(std::floor(p[0])), long(std::floor(p[1]))};
    };
    double vmax = 0;
    const int ns = 4096;
    for (int i = 0; i < ns; ++i) {
        auto a = u(double(i) / ns), b = u(double(i + 1) / ns);
        vmax = std::max(vmax, std::hypot(b[0] - a[0], b[1] - a[1]) * ns);
    }
    const double h = std::min(1e-3, 1.0 / (64.0 * std::max(vmax, 1e-300)));

    std::vector<Crossing> cr;
    IV cur = cell(0.0);
    const IV start = cur;
    double s = 0;
    while (s < 1.0) {
        double sn = std::min(1.0, s + h);
        IV cn = cell(sn);
        if (cn == cur) {
            s = sn;
            continue;
        }
        double lo = s, hi = sn;
        for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
            double mid = 0.5 * (lo + hi);
            if (cell(mid) == cur)
                lo = mid;
            else
                hi = mid;
        }
        IV nx = cell(hi);
        IV d{nx.x - cur.x, nx.y - cur.y};
        if (std::abs(d.x) + std::abs(d.y) != 1)
            return false; // corner hit or unresolved double crossing
        cr.push_back({hi, cur, d});
        cur = nx;
        s = hi;
    }
    // drop zero-measure pieces at the ends of open curves
    if (!c.closed) {
        while (!cr.empty() && cr.back().sigma > 1.0 - 1e-12)
            cr.pop_back();
        while (!cr.empty() && cr.front().sigma < 1e-12)
            cr.erase(cr.begin());
    } else if (((cur.x - start.x) & L.mask()) != 0 || ((cur.y - start.y) & L.mask()) != 0) {
        throw std::invalid_argument("closed curve does not return to its starting square");
    }

    // covering-density condition: no vertex shared by all 4 covering squares
    {
        std::map<std::pair<int, int>, int> used;
        auto addsq = [&](IV q) { used[{int(q.x & L.mask()), int(q.y & L.mask())}] = 1; };
        addsq(cr.empty() ? start : cr.front().from);
        for (auto& k : cr)
            addsq(IV{k.from.x + k.dir.x, k.from.y + k.dir.y});
        for (auto& [q, one] : used) {
            (void)one;
            int cnt = 0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    cnt += used.count({(q.first + a) & L.mask(), (q.second + b) & L.mask()}) ? 1 : 0;
            if (cnt == 4)
                throw std::invalid_argument("mesh too coarse for the curve: a vertex is shared by 4 covering squares");
        }
    }

    out = DiscreteCurve{};
    out.closed = c.closed;
    const std::size_t m = cr.size();
    if (m == 0) {
        if (c.closed)
            throw std::invalid_argument("closed curve inside a single square");
        IV a = start, b{start.x + 1, start.y};
        out.vertices = {L.index(int(a.x & L.mask()), int(a.y & L.mask())),
                        L.index(int(b.x & L.mask()), int(b.y & L.mask()))};
        out.edges = {directed(L, a, b)};
        out.partition = {1.0};
        return true;
    }

    auto endpoints = [&](const Crossing& k, bool left) {
        IV p, q;
        const IV& a = k.from;
        if (k.dir.x == 1) { p = {a.x + 1, a.y}; q = {a.x + 1, a.y + 1}; }
        else if (k.dir.x == -1) { p = {a.x, a.y}; q = {a.x, a.y + 1}; }
        else if (k.dir.y == 1) { p = {a.x, a.y + 1}; q = {a.x + 1, a.y + 1}; }
        else { p = {a.x, a.y}; q = {a.x + 1, a.y}; }
        // left of the motion is rot90(dir) = (-dy, dx)
        long lp = -k.dir.y * p.x + k.dir.x * p.y, lq = -k.dir.y * q.x + k.dir.x * q.y;
        bool p_left = lp > lq;
        return (left == p_left) ? p : q;
    };
    auto turn = [](const Crossing& a, const Crossing& b) {
        return a.dir.x * b.dir.x + a.dir.y * b.dir.y == 0;
    };

    // first label: endpoint nearest to the first crossing point
    std::vector<bool> label(m);
    {
        auto p = u(cr[0].sigma);
        IV a = endpoints(cr[0], true), b = endpoints(cr[0], false);
        double da = std::hypot(p[0] - a.x, p[1] - a.y), db = std::hypot(p[0] - b.x, p[1] - b.y);
        label[0] = da <= db;
    }
    for (std::size_t i = 1; i < m; ++i)
        label[i] = turn(cr[i - 1], cr[i]) ? !label[i - 1] : label[i - 1];

    std::vector<IV> v;
    std::vector<double> piece;
    if (!c.closed) {
        IV v1 = endpoints(cr[0], label[0]);
        v.push_back(IV{v1.x - cr[0].dir.x, v1.y - cr[0].dir.y});
        piece.push_back(cr[0].sigma);
        for (std::size_t i = 0; i < m; ++i) {
            v.push_back(endpoints(cr[i], label[i]));
            double next = i + 1 < m ? cr[i + 1].sigma : 1.0;
            piece.push_back(next - cr[i].sigma);
        }
        IV vl = v.back();
        v.push_back(IV{vl.x + cr[m - 1].dir.x, vl.y + cr[m - 1].dir.y});
    } else {
        bool wrap_label = turn(cr[m - 1], cr[0]) ? !label[m - 1] : label[m - 1];
        if (wrap_label != label[0])
            throw std::logic_error("inconsistent edge selection around closed curve");
        for (std::size_t i = 0; i < m; ++i)
            v.push_back(endpoints(cr[i], label[i]));
        // closing edge lies in the first square; express v[0] in the final unwrapped frame
        IV shift{cur.x - start.x, cur.y - start.y};
        v.push_back(IV{v[0].x + shift.x, v[0].y + shift.y});
        for (std::size_t i = 0; i + 1 < m; ++i)
            piece.push_back(cr[i + 1].sigma - cr[i].sigma);
        piece.push_back(1.0 - cr[m - 1].sigma + cr[0].sigma);
    }
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        out.edges.push_back(directed(L, v[i], v[i + 1]));
        out.partition.push_back(piece[i]);
    }
    for (auto& q : v)
        out.vertices.push_back(L.index(int(q.x & L.mask()), int(q.y & L.mask())));
    return true;
}

} // namespace

DiscreteCurve lattice_path(const Lattice& L, int start, const std::vector<int>& moves)
{
    DiscreteCurve c;
    c.vertices.push_back(start);
    int x = start;
    for (int mv : moves) {
        int j = std::abs(mv), s = mv > 0 ? 1 : -1;
        int y = L.step(x, j, s);
        c.edges.push_back(s > 0 ? EdgeId{x, j, +1} : EdgeId{y, j, -1});
        c.vertices.push_back(y);
        x = y;
    }
    c.partition.assign(c.edges.size(), 1.0 / std::max<std::size_t>(1, c.edges.size()));
    c.closed = !moves.empty() && x == start;
    return c;
}

DiscreteCurve regular_approximation(const SmoothCurve& c, const Lattice& L)
{
    DiscreteCurve out;
    // deterministic nudges of at most eps/100 if the curve meets a lattice corner
    for (int attempt = 0; attempt < 6; ++attempt) {
        double a = attempt * L.eps() / 100.0 / 5.0;
        if (build(c, L, 0.8 * a, 0.6 * a, out))
            return out;
    }
    throw std::invalid_argument("curve meets lattice corners after the perturbation budget");
}

LoopValue loop_observable(const Lattice& L, const GaugeField& A, const DiscreteCurve& c)
{
    require(L, A);
    if (!c.closed)
        throw std::invalid_argument("loop observable needs a closed curve");
    double s = 0;
    for (const auto& e : c.edges)
        s += A(e);
    LoopValue v;
    v.O = L.eps() * s;
    v.O_tilde = std::polar(1.0, v.O);
    return v;
}

cplx string_observable(const Lattice& L, const GaugeField& A, const ScalarField& phi, double lambda,
                       const DiscreteCurve& c, const TestFn& phi1, const TestFn& phi2)
{
    require(L, A);
    require(L, phi);
    if (c.closed)
        throw std::invalid_argument("string observable: ordering undefined on closed curves");
    // sum over x, y of phi1 conj(Phi) e^{-i eps lambda (S_y - S_x)} Phi phi2 factorizes
    // through the prefix sums S of A along the path
    const double e = L.eps();
    cplx left = 0, right = 0;
    double S = 0;
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
        int v = c.vertices[i];
        double x1 = L.x_of(v) * e, x2 = L.y_of(v) * e;
        left += phi1(x1, x2) * std::conj(phi[v]) * std::polar(1.0, e * lambda * S);
        right += phi2(x1, x2) * phi[v] * std::polar(1.0, -e * lambda * S);
        if (i < c.edges.size())
            S += A(c.edges[i]);
    }
    return e * e * left * right;
}

} // namespace lgt
