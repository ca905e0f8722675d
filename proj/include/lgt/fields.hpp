#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "lgt/lattice.hpp"

namespace lgt {

using cplx = std::complex<double>;
using Plane = std::vector<double>;

// Real values on undirected edges: h on (x, x+e1), v on (x, x+e2), both
// indexed by the base vertex x.
struct GaugeField
{
    Plane h, v;

    GaugeField() = default;
    explicit GaugeField(const Lattice& L) : h(L.vertices(), 0.0), v(L.vertices(), 0.0) {}

    Plane& plane(int j) { return j == 1 ? h : v; }
    const Plane& plane(int j) const { return j == 1 ? h : v; }
    double& at(EdgeId e) { return plane(e.dir)[e.base]; }
    // directed evaluation A(e) with A(-e) = -A(e)
    double operator()(EdgeId e) const { return e.orient * plane(e.dir)[e.base]; }
    std::size_t size() const { return h.size(); }
};

// Complex values per vertex (or per vertex-indexed edge), stored as planes.
struct ScalarField
{
    Plane re, im;

    ScalarField() = default;
    explicit ScalarField(const Lattice& L) : re(L.vertices(), 0.0), im(L.vertices(), 0.0) {}

    cplx operator[](int i) const { return {re[i], im[i]}; }
    void set(int i, cplx z)
    {
        re[i] = z.real();
        im[i] = z.imag();
    }
    std::size_t size() const { return re.size(); }
};

struct PlaquetteField
{
    Plane f;

    PlaquetteField() = default;
    explicit PlaquetteField(const Lattice& L) : f(L.plaquettes(), 0.0) {}
    double operator[](int p) const { return f[p]; }
};

// (A, Phi) or (B, Psi) plus the accumulated DeTurck phase int_0^t div B ds
struct SystemState
{
    GaugeField gauge;
    ScalarField scalar;
    Plane phase;
    double t = 0;
    long step = 0;

    SystemState() = default;
    explicit SystemState(const Lattice& L) : gauge(L), scalar(L), phase(L.vertices(), 0.0) {}
};

inline void require(const Lattice& L, const Plane& p)
{
    if (p.size() != static_cast<std::size_t>(L.vertices()))
        throw std::invalid_argument("field does not match lattice");
}
inline void require(const Lattice& L, const GaugeField& A)
{
    require(L, A.h);
    require(L, A.v);
}
inline void require(const Lattice& L, const ScalarField& P)
{
    require(L, P.re);
    require(L, P.im);
}

// elementwise helpers used throughout
GaugeField operator+(const GaugeField& a, const GaugeField& b);
GaugeField operator-(const GaugeField& a, const GaugeField& b);
GaugeField operator*(double c, const GaugeField& a);
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);

double max_abs(const Plane& p);
double max_abs(const GaugeField& A);
double max_abs(const ScalarField& P);

} // namespace lgt
