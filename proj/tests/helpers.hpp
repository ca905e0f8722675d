#pragma once

#include <random>

#include "lgt/fields.hpp"

namespace lgt::testing {

inline Plane random_plane(const Lattice& L, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> n(0.0, scale);
    Plane p(L.vertices());
    for (auto& x : p)
        x = n(rng);
    return p;
}

inline GaugeField random_gauge(const Lattice& L, std::mt19937_64& rng, double scale = 1.0)
{
    GaugeField A(L);
    A.h = random_plane(L, rng, scale);
    A.v = random_plane(L, rng, scale);
    return A;
}

inline ScalarField random_scalar(const Lattice& L, std::mt19937_64& rng, double scale = 1.0)
{
    ScalarField P(L);
    P.re = random_plane(L, rng, scale);
    P.im = random_plane(L, rng, scale);
    return P;
}

inline SystemState random_state(const Lattice& L, std::mt19937_64& rng, double scale = 1.0)
{
    SystemState s(L);
    s.gauge = random_gauge(L, rng, scale);
    s.scalar = random_scalar(L, rng, scale);
    return s;
}

inline double max_diff(const Plane& a, const Plane& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_diff(const GaugeField& a, const GaugeField& b)
{
    return std::max(max_diff(a.h, b.h), max_diff(a.v, b.v));
}

inline double max_diff(const ScalarField& a, const ScalarField& b)
{
    return std::max(max_diff(a.re, b.re), max_diff(a.im, b.im));
}

} // namespace lgt::testing
